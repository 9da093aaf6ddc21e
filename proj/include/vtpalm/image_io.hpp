#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vtpalm/image.hpp"

namespace vtpalm {

/// Reads PNG (gray, gray+alpha, RGB, RGBA; 8 or 16 bit) or binary PGM/PPM.
/// Alpha is dropped. Samples are scaled to [0,1].
RasterImage load_image(const std::filesystem::path& path);

/// Writes 8-bit PNG or binary PGM/PPM chosen by extension. Values are
/// clamped to [0,1] and rounded to the nearest 8-bit level.
void save_image(const RasterImage& img, const std::filesystem::path& path);

std::uint8_t quantize_8bit(float value) noexcept;

// Plane containers: the CSV form is one "width,height" line followed by
// row-major rows of each plane in turn; the binary form is "VTP1", u32
// width, u32 height, then little-endian f32 planes.
struct PlaneSet {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::vector<double>> planes;
};

void write_planes_csv(const std::filesystem::path& path, const PlaneSet& planes);
PlaneSet read_planes_csv(const std::filesystem::path& path);
void write_vtp1(const std::filesystem::path& path, const PlaneSet& planes);
PlaneSet read_vtp1(const std::filesystem::path& path);

PlaneSet to_planes(const DepthMap& depth);
PlaneSet to_planes(const SegMask& mask);
PlaneSet to_planes(const GradientField& g);
PlaneSet to_planes(const HeightMap& h);
PlaneSet to_planes(const ScalarField& f);

DepthMap depth_from_planes(const PlaneSet& p);
SegMask mask_from_planes(const PlaneSet& p);
GradientField gradient_from_planes(const PlaneSet& p);
HeightMap height_from_planes(const PlaneSet& p, double pixel_pitch);

}  // namespace vtpalm
