#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "vtpalm/image.hpp"

namespace vtpalm::detail {

using Complex = std::complex<double>;

// Row-major complex grid for 2-D transforms.
struct Spectrum {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Complex> bins;

  Complex& operator()(std::size_t m, std::size_t n) { return bins[n * width + m]; }
  const Complex& operator()(std::size_t m, std::size_t n) const { return bins[n * width + m]; }
};

// Unnormalised forward DFT of a real field.
Spectrum fft2(const ScalarField& field);

// Inverse DFT scaled by 1/(width*height); returns the real part.
ScalarField ifft2_real(const Spectrum& spectrum);

// Signed frequency index for bin m of an n-point transform: m or m - n.
inline long signed_index(std::size_t m, std::size_t n) {
  return m <= n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n);
}

}  // namespace vtpalm::detail
