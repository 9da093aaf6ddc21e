#include <cmath>
#include <numbers>

#include "core/fft.hpp"
#include "vtpalm/recon.hpp"

namespace vtpalm::recon {

namespace {

double wavenumber(std::size_t m, std::size_t n, double pitch) {
  return 2.0 * std::numbers::pi * static_cast<double>(detail::signed_index(m, n)) / (static_cast<double>(n) * pitch);
}

double symbol(double kx, double ky, double pitch, Laplacian lap) {
  if (lap == Laplacian::Continuous) return -(kx * kx + ky * ky);
  return -(4.0 - 2.0 * std::cos(kx * pitch) - 2.0 * std::cos(ky * pitch)) / (pitch * pitch);
}

void check_shape(std::size_t w, std::size_t h) {
  require(w >= 2 && h >= 2, ErrorKind::InvalidArgument, "Poisson solve needs at least a 2x2 field");
}

HeightMap solve_spectrum(detail::Spectrum rho_hat, double pitch, Laplacian lap) {
  const std::size_t w = rho_hat.width, h = rho_hat.height;
  for (std::size_t n = 0; n < h; ++n) {
    const double ky = wavenumber(n, h, pitch);
    for (std::size_t m = 0; m < w; ++m) {
      const double s = symbol(wavenumber(m, w, pitch), ky, pitch, lap);
      rho_hat(m, n) = (m == 0 && n == 0) || s == 0.0 ? detail::Complex(0.0) : rho_hat(m, n) / s;
    }
  }
  return HeightMap(detail::ifft2_real(rho_hat), pitch);
}

}  // namespace

ScalarField divergence(const GradientField& g, double pixel_pitch, bool periodic) {
  require(pixel_pitch > 0.0, ErrorKind::InvalidArgument, "pixel pitch must be > 0");
  const std::size_t w = g.width(), h = g.height();
  ScalarField out(w, h, 0.0);
  auto diff = [&](const ScalarField& f, std::size_t u, std::size_t v, bool along_u) {
    const std::size_t n = along_u ? w : h;
    const std::size_t i = along_u ? u : v;
    if (n < 2) return 0.0;
    auto at = [&](std::size_t k) { return along_u ? f(k, v) : f(u, k); };
    if (periodic) return (at((i + 1) % n) - at((i + n - 1) % n)) / (2.0 * pixel_pitch);
    if (i == 0) return (at(1) - at(0)) / pixel_pitch;
    if (i + 1 == n) return (at(n - 1) - at(n - 2)) / pixel_pitch;
    return (at(i + 1) - at(i - 1)) / (2.0 * pixel_pitch);
  };
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) out(u, v) = diff(g.gu, u, v, true) + diff(g.gv, u, v, false);
  }
  return out;
}

HeightMap poisson_solve(const ScalarField& rho, double pixel_pitch, Laplacian lap) {
  check_shape(rho.width(), rho.height());
  require(pixel_pitch > 0.0, ErrorKind::InvalidArgument, "pixel pitch must be > 0");
  require_finite(rho.values(), "Poisson source");
  return solve_spectrum(detail::fft2(rho), pixel_pitch, lap);
}

HeightMap reconstruct(const GradientField& g, double pixel_pitch, Laplacian lap) {
  check_shape(g.width(), g.height());
  require(pixel_pitch > 0.0, ErrorKind::InvalidArgument, "pixel pitch must be > 0");
  require_finite(g.gu.values(), "gradient u");
  require_finite(g.gv.values(), "gradient v");
  if (lap == Laplacian::Discrete) return poisson_solve(divergence(g, pixel_pitch, true), pixel_pitch, lap);

  const std::size_t w = g.width(), h = g.height();
  const detail::Spectrum gu = detail::fft2(g.gu);
  const detail::Spectrum gv = detail::fft2(g.gv);
  detail::Spectrum rho = gu;
  const detail::Complex i(0.0, 1.0);
  for (std::size_t n = 0; n < h; ++n) {
    // A lone Nyquist bin has no odd part; its derivative is taken as zero.
    const double ky = h % 2 == 0 && n == h / 2 ? 0.0 : wavenumber(n, h, pixel_pitch);
    for (std::size_t m = 0; m < w; ++m) {
      const double kx = w % 2 == 0 && m == w / 2 ? 0.0 : wavenumber(m, w, pixel_pitch);
      rho(m, n) = i * kx * gu(m, n) + i * ky * gv(m, n);
    }
  }
  return solve_spectrum(std::move(rho), pixel_pitch, lap);
}

ScalarField normal_z(const GradientField& g) {
  ScalarField out(g.width(), g.height());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = 1.0 / std::sqrt(1.0 + g.gu[k] * g.gu[k] + g.gv[k] * g.gv[k]);
  return out;
}

}  // namespace vtpalm::recon
