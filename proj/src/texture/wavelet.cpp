#include <cmath>

#include "vtpalm/texture.hpp"

namespace vtpalm::texture {

double HaarLevel::energy() const {
  double e = 0.0;
  for (const ScalarField* f : {&lh, &hl, &hh}) {
    for (double x : f->values()) e += x * x;
  }
  return e;
}

HaarDecomposition haar_decompose(const ScalarField& img, int levels) {
  require(levels >= 1 && levels <= 30, ErrorKind::InvalidArgument, "wavelet levels must lie in [1, 30]");
  const std::size_t block = std::size_t{1} << levels;
  require(img.width() >= block && img.height() >= block, ErrorKind::InvalidArgument,
          "image is too small for " + std::to_string(levels) + " wavelet levels");
  require_finite(img.values(), "wavelet input");

  std::size_t w = img.width() / block * block, h = img.height() / block * block;
  ScalarField a(w, h);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) a(u, v) = img(u, v);
  }

  HaarDecomposition out;
  for (int level = 0; level < levels; ++level) {
    w /= 2;
    h /= 2;
    ScalarField ll(w, h), lh(w, h), hl(w, h), hh(w, h);
    for (std::size_t v = 0; v < h; ++v) {
      for (std::size_t u = 0; u < w; ++u) {
        const double p = a(2 * u, 2 * v), q = a(2 * u + 1, 2 * v);
        const double r = a(2 * u, 2 * v + 1), s = a(2 * u + 1, 2 * v + 1);
        ll(u, v) = 0.5 * (p + q + r + s);
        lh(u, v) = 0.5 * (p - q + r - s);  // horizontal detail
        hl(u, v) = 0.5 * (p + q - r - s);  // vertical detail
        hh(u, v) = 0.5 * (p - q - r + s);
      }
    }
    out.details.push_back({std::move(lh), std::move(hl), std::move(hh)});
    a = std::move(ll);
  }
  out.approximation = std::move(a);
  return out;
}

std::vector<double> wavelet_energy(const ScalarField& img, int levels) {
  const HaarDecomposition d = haar_decompose(img, levels);
  std::vector<double> e;
  for (const auto& level : d.details) e.push_back(level.energy());
  return e;
}

}  // namespace vtpalm::texture
