#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "vtpalm/texture.hpp"

namespace vtpalm::texture {

double glcm_contrast(const ScalarField& gray, int levels, int du, int dv) {
  require(levels >= 2, ErrorKind::InvalidArgument, "GLCM needs at least 2 levels");
  const auto w = static_cast<long>(gray.width()), h = static_cast<long>(gray.height());
  require(std::labs(du) < w && std::labs(dv) < h, ErrorKind::InvalidArgument, "image is smaller than the GLCM offset");
  require_finite(gray.values(), "GLCM input");

  std::vector<int> bins(gray.size());
  for (std::size_t i = 0; i < gray.size(); ++i) {
    const double x = std::clamp(gray[i], 0.0, 1.0);
    bins[i] = std::min(levels - 1, static_cast<int>(x * levels));
  }
  const auto L = static_cast<std::size_t>(levels);
  std::vector<double> counts(L * L, 0.0);
  double pairs = 0.0;
  for (long v = std::max(0L, -static_cast<long>(dv)); v < std::min(h, h - dv); ++v) {
    for (long u = std::max(0L, -static_cast<long>(du)); u < std::min(w, w - du); ++u) {
      const auto i = static_cast<std::size_t>(bins[static_cast<std::size_t>(v * w + u)]);
      const auto j = static_cast<std::size_t>(bins[static_cast<std::size_t>((v + dv) * w + (u + du))]);
      counts[i * L + j] += 1.0;
      counts[j * L + i] += 1.0;
      pairs += 2.0;
    }
  }
  if (pairs == 0.0) return 0.0;
  double contrast = 0.0;
  for (std::size_t i = 0; i < L; ++i) {
    for (std::size_t j = 0; j < L; ++j) {
      const double d = static_cast<double>(i) - static_cast<double>(j);
      contrast += d * d * counts[i * L + j] / pairs;
    }
  }
  return contrast;
}

}  // namespace vtpalm::texture
