#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

#include "vtpalm/mapper.hpp"

namespace vtpalm::mapper {

namespace {

constexpr double kCoordinateWeight = 0.25;

using Point = std::array<double, kInputs>;

Point embed(const std::array<double, kInputs>& f) {
  return {f[0], f[1], f[2], kCoordinateWeight * f[3], kCoordinateWeight * f[4]};
}

double dist2(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < kInputs; ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Static kd-tree laid out implicitly over a permuted index array.
class KdTree {
 public:
  explicit KdTree(std::vector<Point> points) : points_(std::move(points)), index_(points_.size()) {
    std::iota(index_.begin(), index_.end(), std::size_t{0});
    build(0, index_.size(), 0);
  }

  std::size_t nearest(const Point& q) const {
    best_ = std::numeric_limits<double>::infinity();
    best_index_ = 0;
    search(q, 0, index_.size(), 0);
    return best_index_;
  }

 private:
  void build(std::size_t lo, std::size_t hi, std::size_t depth) {
    if (hi - lo <= 1) return;
    const std::size_t axis = depth % kInputs;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(index_.begin() + static_cast<std::ptrdiff_t>(lo), index_.begin() + static_cast<std::ptrdiff_t>(mid),
                     index_.begin() + static_cast<std::ptrdiff_t>(hi), [&](std::size_t a, std::size_t b) {
                       return points_[a][axis] < points_[b][axis] || (points_[a][axis] == points_[b][axis] && a < b);
                     });
    build(lo, mid, depth + 1);
    build(mid + 1, hi, depth + 1);
  }

  void search(const Point& q, std::size_t lo, std::size_t hi, std::size_t depth) const {
    if (lo >= hi) return;
    const std::size_t mid = lo + (hi - lo) / 2;
    const std::size_t i = index_[mid];
    const double d = dist2(q, points_[i]);
    // Ties go to the lowest dataset index so the result is order-independent.
    if (d < best_ || (d == best_ && i < best_index_)) {
      best_ = d;
      best_index_ = i;
    }
    const std::size_t axis = depth % kInputs;
    const double delta = q[axis] - points_[i][axis];
    const bool left_first = delta < 0.0;
    if (left_first) search(q, lo, mid, depth + 1);
    else search(q, mid + 1, hi, depth + 1);
    if (delta * delta <= best_) {
      if (left_first) search(q, mid + 1, hi, depth + 1);
      else search(q, lo, mid, depth + 1);
    }
  }

  std::vector<Point> points_;
  std::vector<std::size_t> index_;
  mutable double best_ = 0.0;
  mutable std::size_t best_index_ = 0;
};

}  // namespace

GradientField lookup_baseline(std::span<const tactile::GradientSample> dataset, const RasterImage& image,
                              const SegMask* domain) {
  require(!dataset.empty(), ErrorKind::InsufficientSamples, "lookup baseline needs a nonempty dataset");
  require(image.channels() == 3, ErrorKind::DimensionMismatch, "lookup baseline needs an RGB image");
  if (domain) {
    require(domain->width() == image.width() && domain->height() == image.height(), ErrorKind::DimensionMismatch,
            "domain mask does not match the image");
  }
  std::vector<Point> points;
  points.reserve(dataset.size());
  for (const auto& s : dataset) points.push_back(embed({s.i_r, s.i_g, s.i_b, s.u, s.v}));
  const KdTree tree(std::move(points));

  GradientField out(image.width(), image.height());
  for (std::size_t v = 0; v < image.height(); ++v) {
    for (std::size_t u = 0; u < image.width(); ++u) {
      if (domain && !(*domain)(u, v)) continue;
      const auto& s = dataset[tree.nearest(embed(pixel_features(image, u, v)))];
      out.gu(u, v) = s.g_u;
      out.gv(u, v) = s.g_v;
    }
  }
  return out;
}

}  // namespace vtpalm::mapper
