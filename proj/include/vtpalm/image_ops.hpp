#pragma once

#include "vtpalm/image.hpp"

namespace vtpalm {

/// Single-channel magnitude image: mean over channels of |a - b|.
RasterImage difference_image(const RasterImage& a, const RasterImage& b);

/// Unweighted channel mean; identity for single-channel input.
RasterImage to_grayscale(const RasterImage& img);

ScalarField to_field(const RasterImage& gray);

// Visualisation helpers for fields of arbitrary range.
RasterImage field_to_gray(const ScalarField& field);
RasterImage field_to_heat(const ScalarField& field);

}  // namespace vtpalm
