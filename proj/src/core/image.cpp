#include "vtpalm/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace vtpalm {

namespace {

void check_channels(std::size_t channels) {
  require(channels == 1 || channels == 3, ErrorKind::InvalidArgument,
          "channel count must be 1 or 3, got " + std::to_string(channels));
}

}  // namespace

void require_finite(std::span<const double> values, const char* what) {
  for (double x : values) {
    require(std::isfinite(x), ErrorKind::InvalidArgument, std::string(what) + " has non-finite values");
  }
}

RasterImage::RasterImage(std::size_t width, std::size_t height, std::size_t channels, float fill)
    : width_(width), height_(height), channels_(channels),
      data_(width * height * channels, fill) {
  check_channels(channels);
  require(std::isfinite(fill), ErrorKind::InvalidArgument, "non-finite fill value");
}

RasterImage::RasterImage(std::size_t width, std::size_t height, std::size_t channels,
                         std::vector<float> data)
    : width_(width), height_(height), channels_(channels), data_(std::move(data)) {
  check_channels(channels);
  require(data_.size() == width * height * channels, ErrorKind::DimensionMismatch,
          "image payload does not match width*height*channels");
  require(std::all_of(data_.begin(), data_.end(), [](float x) { return std::isfinite(x); }),
          ErrorKind::InvalidArgument, "image has non-finite values");
}

DepthMap::DepthMap(ScalarField values) : values_(std::move(values)) {
  for (double x : values_.values()) {
    require(std::isfinite(x) && x >= 0.0, ErrorKind::InvalidArgument,
            "depth values must be finite and non-negative");
  }
}

DepthMap::DepthMap(std::size_t width, std::size_t height, double fill)
    : DepthMap(ScalarField(width, height, fill)) {}

SegMask::SegMask(Grid<std::uint8_t> values) : values_(std::move(values)) {
  for (auto x : values_.values()) {
    require(x <= 1, ErrorKind::InvalidArgument, "mask values must be 0 or 1");
  }
}

SegMask::SegMask(std::size_t width, std::size_t height, bool fill)
    : values_(width, height, fill ? 1 : 0) {}

std::size_t SegMask::count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(values_.values().begin(), values_.values().end(), [](auto x) { return x != 0; }));
}

GradientField::GradientField(ScalarField gu_, ScalarField gv_) : gu(std::move(gu_)), gv(std::move(gv_)) {
  require(gu.same_shape(gv), ErrorKind::DimensionMismatch, "gradient components differ in shape");
  require_finite(gu.values(), "gu");
  require_finite(gv.values(), "gv");
}

HeightMap::HeightMap(ScalarField z_, double pixel_pitch_) : z(std::move(z_)), pixel_pitch(pixel_pitch_) {
  require(pixel_pitch > 0.0 && std::isfinite(pixel_pitch), ErrorKind::InvalidArgument,
          "pixel pitch must be positive");
  require_finite(z.values(), "height map");
}

}  // namespace vtpalm
