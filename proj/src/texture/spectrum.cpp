#include <cmath>

#include "core/fft.hpp"
#include "vtpalm/texture.hpp"

namespace vtpalm::texture {

namespace {

ScalarField single_channel(const RasterImage& img) {
  require(img.channels() == 1, ErrorKind::DimensionMismatch, "expected a single-channel image");
  ScalarField f(img.width(), img.height());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = img.data()[i];
  return f;
}

}  // namespace

SpectrumReport amplitude_spectrum(const ScalarField& gray, double cutoff_radius) {
  require(!gray.empty(), ErrorKind::InvalidArgument, "empty image");
  require(cutoff_radius >= 0.0, ErrorKind::InvalidArgument, "cutoff radius must be >= 0");
  require_finite(gray.values(), "spectrum input");
  const std::size_t w = gray.width(), h = gray.height();
  const detail::Spectrum f = detail::fft2(gray);

  SpectrumReport report;
  report.cutoff_radius = cutoff_radius;
  report.log_amplitude = ScalarField(w, h);
  double total = 0.0, high = 0.0;
  for (std::size_t n = 0; n < h; ++n) {
    const double fy = static_cast<double>(detail::signed_index(n, h)) / static_cast<double>(h);
    for (std::size_t m = 0; m < w; ++m) {
      const double fx = static_cast<double>(detail::signed_index(m, w)) / static_cast<double>(w);
      const double amp = std::abs(f(m, n));
      report.log_amplitude((m + w / 2) % w, (n + h / 2) % h) = std::log1p(amp);
      if (m == 0 && n == 0) continue;
      const double energy = amp * amp;
      total += energy;
      // Nyquist is 0.5 cycles per pixel on each axis.
      if (std::hypot(fx / 0.5, fy / 0.5) > cutoff_radius) high += energy;
    }
  }
  // Round-off leaves a few ulps of energy in constant images.
  const double dc = std::abs(f(0, 0));
  report.high_freq_ratio = total > 1e-24 * (1.0 + dc * dc) ? high / total : 0.0;
  return report;
}

SpectrumReport amplitude_spectrum(const RasterImage& gray, double cutoff_radius) {
  return amplitude_spectrum(single_channel(gray), cutoff_radius);
}

double glcm_contrast(const RasterImage& gray, int levels, int du, int dv) {
  return glcm_contrast(single_channel(gray), levels, du, dv);
}

MeshEmulation emulate_mesh(double mesh) {
  require(mesh > 0.0 && std::isfinite(mesh), ErrorKind::InvalidArgument, "mesh count must be > 0");
  const double grit = 15.0 / mesh;
  return {grit, 0.1 * grit};
}

}  // namespace vtpalm::texture
