#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vtpalm/error.hpp"

namespace vtpalm {

// Pixel grids are row-major with the origin at the top-left corner.
// u is the column index, v is the row index.
template <typename T>
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t width, std::size_t height, T fill = T{})
      : width_(width), height_(height), values_(width * height, fill) {}
  Grid(std::size_t width, std::size_t height, std::vector<T> values)
      : width_(width), height_(height), values_(std::move(values)) {
    require(values_.size() == width_ * height_, ErrorKind::DimensionMismatch,
            "grid payload does not match width*height");
  }

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  T& operator()(std::size_t u, std::size_t v) { return values_[v * width_ + u]; }
  const T& operator()(std::size_t u, std::size_t v) const { return values_[v * width_ + u]; }
  T& operator[](std::size_t i) { return values_[i]; }
  const T& operator[](std::size_t i) const { return values_[i]; }

  std::span<T> values() noexcept { return values_; }
  std::span<const T> values() const noexcept { return values_; }
  const std::vector<T>& vector() const noexcept { return values_; }

  bool same_shape(const Grid& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  bool operator==(const Grid&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<T> values_;
};

using ScalarField = Grid<double>;

/// Multi-channel frame (1 or 3 channels), float samples nominally in [0,1].
class RasterImage {
 public:
  RasterImage() = default;
  RasterImage(std::size_t width, std::size_t height, std::size_t channels, float fill = 0.0f);
  RasterImage(std::size_t width, std::size_t height, std::size_t channels,
              std::vector<float> data);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return width_ * height_; }

  float& at(std::size_t u, std::size_t v, std::size_t c = 0) {
    return data_[(v * width_ + u) * channels_ + c];
  }
  float at(std::size_t u, std::size_t v, std::size_t c = 0) const {
    return data_[(v * width_ + u) * channels_ + c];
  }

  std::span<float> data() noexcept { return data_; }
  std::span<const float> data() const noexcept { return data_; }

  bool same_shape(const RasterImage& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

  bool operator==(const RasterImage&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::size_t channels_ = 1;
  std::vector<float> data_;
};

/// Relative depth D(u,v) from a monocular estimator; non-negative.
class DepthMap {
 public:
  DepthMap() = default;
  explicit DepthMap(ScalarField values);
  DepthMap(std::size_t width, std::size_t height, double fill = 0.0);

  std::size_t width() const noexcept { return values_.width(); }
  std::size_t height() const noexcept { return values_.height(); }
  double operator()(std::size_t u, std::size_t v) const { return values_(u, v); }
  const ScalarField& field() const noexcept { return values_; }

  bool operator==(const DepthMap&) const = default;

 private:
  ScalarField values_;
};

/// Binary target mask M(u,v).
class SegMask {
 public:
  SegMask() = default;
  explicit SegMask(Grid<std::uint8_t> values);
  SegMask(std::size_t width, std::size_t height, bool fill = false);

  std::size_t width() const noexcept { return values_.width(); }
  std::size_t height() const noexcept { return values_.height(); }
  bool operator()(std::size_t u, std::size_t v) const { return values_(u, v) != 0; }
  void set(std::size_t u, std::size_t v, bool on) { values_(u, v) = on ? 1 : 0; }
  std::size_t count() const noexcept;
  const Grid<std::uint8_t>& grid() const noexcept { return values_; }

  bool operator==(const SegMask&) const = default;

 private:
  Grid<std::uint8_t> values_;
};

/// Per-pixel surface slopes (df/du, df/dv) with f and u,v in millimetres.
struct GradientField {
  ScalarField gu;
  ScalarField gv;

  GradientField() = default;
  GradientField(std::size_t width, std::size_t height)
      : gu(width, height, 0.0), gv(width, height, 0.0) {}
  GradientField(ScalarField gu_, ScalarField gv_);

  std::size_t width() const noexcept { return gu.width(); }
  std::size_t height() const noexcept { return gu.height(); }
};

/// Surface height z = f(u,v) in mm sampled every pixel_pitch mm.
struct HeightMap {
  ScalarField z;
  double pixel_pitch = 1.0;

  HeightMap() = default;
  HeightMap(ScalarField z_, double pixel_pitch_);

  std::size_t width() const noexcept { return z.width(); }
  std::size_t height() const noexcept { return z.height(); }
};

void require_finite(std::span<const double> values, const char* what);

}  // namespace vtpalm
