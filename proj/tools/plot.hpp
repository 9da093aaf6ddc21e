#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>

#include "vtpalm/image.hpp"

// Minimal raster plotting: axes-free line and scatter charts on a white canvas.
namespace vtpalm::plot {

using Rgb = std::array<float, 3>;

inline constexpr Rgb kBlack{0.0f, 0.0f, 0.0f};
inline constexpr Rgb kBlue{0.1f, 0.3f, 0.9f};
inline constexpr Rgb kRed{0.9f, 0.15f, 0.1f};
inline constexpr Rgb kGreen{0.1f, 0.6f, 0.2f};
inline constexpr Rgb kGray{0.6f, 0.6f, 0.6f};

class Canvas {
 public:
  Canvas(std::size_t width, std::size_t height, double x0, double x1, double y0, double y1)
      : img_(width, height, 3, 1.0f), x0_(x0), x1_(x1 > x0 ? x1 : x0 + 1.0), y0_(y0), y1_(y1 > y0 ? y1 : y0 + 1.0) {
    const Rgb frame = kBlack;
    line_px(kMargin, kMargin, static_cast<double>(width) - kMargin, kMargin, frame);
    line_px(kMargin, static_cast<double>(height) - kMargin, static_cast<double>(width) - kMargin,
            static_cast<double>(height) - kMargin, frame);
    line_px(kMargin, kMargin, kMargin, static_cast<double>(height) - kMargin, frame);
    line_px(static_cast<double>(width) - kMargin, kMargin, static_cast<double>(width) - kMargin,
            static_cast<double>(height) - kMargin, frame);
  }

  void line(double xa, double ya, double xb, double yb, const Rgb& c) {
    line_px(px(xa), py(ya), px(xb), py(yb), c);
  }

  void polyline(std::span<const double> xs, std::span<const double> ys, const Rgb& c) {
    for (std::size_t i = 1; i < std::min(xs.size(), ys.size()); ++i) line(xs[i - 1], ys[i - 1], xs[i], ys[i], c);
  }

  void dot(double x, double y, const Rgb& c, int r = 1) {
    const auto cx = static_cast<long>(std::lround(px(x))), cy = static_cast<long>(std::lround(py(y)));
    for (long dy = -r; dy <= r; ++dy)
      for (long dx = -r; dx <= r; ++dx) put(cx + dx, cy + dy, c);
  }

  void vline(double x, const Rgb& c) { line(x, y0_, x, y1_, c); }
  void hline(double y, const Rgb& c) { line(x0_, y, x1_, y, c); }

  const RasterImage& image() const { return img_; }

 private:
  static constexpr double kMargin = 8.0;

  double px(double x) const {
    return kMargin + (x - x0_) / (x1_ - x0_) * (static_cast<double>(img_.width()) - 2.0 * kMargin);
  }
  double py(double y) const {
    return static_cast<double>(img_.height()) - kMargin -
           (y - y0_) / (y1_ - y0_) * (static_cast<double>(img_.height()) - 2.0 * kMargin);
  }

  void put(long u, long v, const Rgb& c) {
    if (u < 0 || v < 0 || u >= static_cast<long>(img_.width()) || v >= static_cast<long>(img_.height())) return;
    for (std::size_t k = 0; k < 3; ++k) img_.at(static_cast<std::size_t>(u), static_cast<std::size_t>(v), k) = c[k];
  }

  void line_px(double xa, double ya, double xb, double yb, const Rgb& c) {
    if (!std::isfinite(xa) || !std::isfinite(ya) || !std::isfinite(xb) || !std::isfinite(yb)) return;
    const double n = std::max({std::fabs(xb - xa), std::fabs(yb - ya), 1.0});
    const auto steps = static_cast<long>(std::min(n, 1e5));
    for (long i = 0; i <= steps; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(steps);
      put(std::lround(xa + t * (xb - xa)), std::lround(ya + t * (yb - ya)), c);
    }
  }

  RasterImage img_;
  double x0_, x1_, y0_, y1_;
};

inline std::array<double, 2> span_of(std::span<const double> v, double pad = 0.05) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double x : v) {
    if (!std::isfinite(x)) continue;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (!(lo <= hi)) return {0.0, 1.0};
  const double d = hi > lo ? (hi - lo) * pad : 1.0;
  return {lo - d, hi + d};
}

}  // namespace vtpalm::plot
