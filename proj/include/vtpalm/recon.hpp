#pragma once

#include "vtpalm/image.hpp"

namespace vtpalm::recon {

/// Symbol of the Laplacian used by the spectral solve.
/// Continuous: -(kx^2 + ky^2) with k = 2 pi m / (M * pitch).
/// Discrete: -(2 - 2 cos(kx pitch) + 2 - 2 cos(ky pitch)) / pitch^2, the five-point stencil.
enum class Laplacian { Continuous, Discrete };

/// d(gu)/du + d(gv)/dv by central differences, one-sided at the borders
/// (or wrapped when `periodic`).
ScalarField divergence(const GradientField& g, double pixel_pitch = 1.0, bool periodic = false);

/// Periodic solve of lap(phi) = rho; the zero-frequency bin is pinned so the
/// result has zero mean.
HeightMap poisson_solve(const ScalarField& rho, double pixel_pitch, Laplacian lap = Laplacian::Continuous);

/// Heights (mm, zero mean) whose gradient best matches g.
/// Continuous takes the divergence spectrally, which is exact for band-limited
/// periodic fields; Discrete feeds the periodic central-difference divergence
/// to the five-point solve, which is second-order accurate.
HeightMap reconstruct(const GradientField& g, double pixel_pitch, Laplacian lap = Laplacian::Continuous);

/// Vertical component of the unit normal, 1 / sqrt(1 + |g|^2), for display.
ScalarField normal_z(const GradientField& g);

}  // namespace vtpalm::recon
