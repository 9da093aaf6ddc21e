#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "vtpalm/image_ops.hpp"
#include "vtpalm/tactile.hpp"

namespace vtpalm::tactile {

namespace {

using Mask = Grid<std::uint8_t>;

Mask majority_filter(const Mask& in) {
  const std::size_t w = in.width(), h = in.height();
  Mask out(w, h, 0);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) {
      int on = 0, total = 0;
      for (int dv = -1; dv <= 1; ++dv) {
        for (int du = -1; du <= 1; ++du) {
          const auto uu = static_cast<std::ptrdiff_t>(u) + du;
          const auto vv = static_cast<std::ptrdiff_t>(v) + dv;
          if (uu < 0 || vv < 0 || uu >= static_cast<std::ptrdiff_t>(w) || vv >= static_cast<std::ptrdiff_t>(h)) continue;
          ++total;
          on += in(static_cast<std::size_t>(uu), static_cast<std::size_t>(vv));
        }
      }
      out(u, v) = 2 * on > total ? 1 : 0;
    }
  }
  return out;
}

// 4-connected flood from `seeds`, writing `label` into every reached pixel where
// `passable` holds. Returns the pixel count.
template <typename Pass>
std::size_t flood(Grid<int>& labels, std::vector<std::size_t> stack, int label, Pass passable) {
  const std::size_t w = labels.width(), h = labels.height();
  std::size_t count = 0;
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    if (labels[i] != 0 || !passable(i)) continue;
    labels[i] = label;
    ++count;
    const std::size_t u = i % w, v = i / w;
    if (u > 0) stack.push_back(i - 1);
    if (u + 1 < w) stack.push_back(i + 1);
    if (v > 0) stack.push_back(i - w);
    if (v + 1 < h) stack.push_back(i + w);
  }
  return count;
}

Mask largest_component(const Mask& in) {
  Grid<int> labels(in.width(), in.height(), 0);
  int best = 0, next = 0;
  std::size_t best_size = 0;
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in[i] || labels[i] != 0) continue;
    const std::size_t n = flood(labels, {i}, ++next, [&](std::size_t j) { return in[j] != 0; });
    if (n > best_size) {
      best_size = n;
      best = next;
    }
  }
  Mask out(in.width(), in.height(), 0);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = best != 0 && labels[i] == best ? 1 : 0;
  return out;
}

Mask fill_holes(const Mask& in) {
  const std::size_t w = in.width(), h = in.height();
  Grid<int> outside(w, h, 0);
  std::vector<std::size_t> border;
  for (std::size_t u = 0; u < w; ++u) {
    border.push_back(u);
    border.push_back((h - 1) * w + u);
  }
  for (std::size_t v = 0; v < h; ++v) {
    border.push_back(v * w);
    border.push_back(v * w + w - 1);
  }
  flood(outside, std::move(border), 1, [&](std::size_t j) { return in[j] == 0; });
  Mask out(w, h, 0);
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = outside[i] == 0 ? 1 : 0;
  return out;
}

}  // namespace

ContactCircle detect_contact_circle(const RasterImage& image, const RasterImage& reference,
                                    const CircleDetectOptions& options) {
  const RasterImage diff = difference_image(image, reference);
  const std::size_t w = diff.width(), h = diff.height();
  Mask support(w, h, 0);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) support(u, v) = diff.at(u, v) > options.threshold ? 1 : 0;
  }
  support = fill_holes(largest_component(majority_filter(support)));

  std::size_t area = 0;
  for (auto x : support.values()) area += x;
  require(area >= options.min_support, ErrorKind::InsufficientSupport,
          "contact support of " + std::to_string(area) + " px is below " + std::to_string(options.min_support));

  // Boundary points: midpoints of pixel edges separating the region from the rest.
  std::vector<std::pair<double, double>> pts;
  auto inside = [&](std::ptrdiff_t u, std::ptrdiff_t v) {
    return u >= 0 && v >= 0 && u < static_cast<std::ptrdiff_t>(w) && v < static_cast<std::ptrdiff_t>(h) &&
           support(static_cast<std::size_t>(u), static_cast<std::size_t>(v)) != 0;
  };
  for (std::ptrdiff_t v = 0; v < static_cast<std::ptrdiff_t>(h); ++v) {
    for (std::ptrdiff_t u = 0; u < static_cast<std::ptrdiff_t>(w); ++u) {
      if (!inside(u, v)) continue;
      const double fu = static_cast<double>(u), fv = static_cast<double>(v);
      if (!inside(u - 1, v)) pts.emplace_back(fu - 0.5, fv);
      if (!inside(u + 1, v)) pts.emplace_back(fu + 0.5, fv);
      if (!inside(u, v - 1)) pts.emplace_back(fu, fv - 0.5);
      if (!inside(u, v + 1)) pts.emplace_back(fu, fv + 0.5);
    }
  }

  // Kasa: u^2 + v^2 = 2a u + 2b v + c, radius^2 = c + a^2 + b^2.
  Eigen::MatrixXd A(static_cast<Eigen::Index>(pts.size()), 3);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto [x, y] = pts[i];
    const auto k = static_cast<Eigen::Index>(i);
    A(k, 0) = 2.0 * x;
    A(k, 1) = 2.0 * y;
    A(k, 2) = 1.0;
    rhs(k) = x * x + y * y;
  }
  const Eigen::Vector3d sol = A.colPivHouseholderQr().solve(rhs);
  const double r2 = sol(2) + sol(0) * sol(0) + sol(1) * sol(1);
  require(std::isfinite(r2) && r2 > 0.0, ErrorKind::BadFit, "circle fit is degenerate");

  ContactCircle c;
  c.center_u = sol(0);
  c.center_v = sol(1);
  c.radius = std::sqrt(r2);
  c.support = area;
  double ss = 0.0;
  for (const auto& [x, y] : pts) {
    const double d = std::hypot(x - c.center_u, y - c.center_v) - c.radius;
    ss += d * d;
  }
  c.rms_residual = std::sqrt(ss / static_cast<double>(pts.size()));
  require(c.rms_residual <= options.max_rms_residual, ErrorKind::BadFit,
          "boundary scatter " + std::to_string(c.rms_residual) + " px exceeds " +
              std::to_string(options.max_rms_residual));
  return c;
}

double estimate_press_depth(const HeightMap& h, const ContactCircle& c, double clamp_fraction, double r) {
  require(clamp_fraction > 0.0 && clamp_fraction <= 1.0, ErrorKind::InvalidArgument, "clamp fraction must lie in (0, 1]");
  const double ring_in = clamp_fraction * c.radius, ring_out = ring_in + 1.5;
  double ring = 0.0, deepest = std::numeric_limits<double>::infinity();
  std::size_t n = 0;
  for (std::size_t v = 0; v < h.height(); ++v) {
    for (std::size_t u = 0; u < h.width(); ++u) {
      const double d = std::hypot(static_cast<double>(u) - c.center_u, static_cast<double>(v) - c.center_v);
      if (d <= ring_in) {
        deepest = std::min(deepest, h.z(u, v));
      } else if (d <= ring_out) {
        ring += h.z(u, v);
        ++n;
      }
    }
  }
  require(n > 0 && std::isfinite(deepest), ErrorKind::InsufficientSupport, "contact disc lies outside the height map");
  const double r_star = std::min(c.radius * h.pixel_pitch, 0.999 * r);
  const double rho = std::min(ring_in * h.pixel_pitch, r_star);
  const double cap_at_ring = sphere_height(r, r_star) - std::sqrt(r * r - rho * rho);
  return ring / static_cast<double>(n) - deepest - cap_at_ring;
}

}  // namespace vtpalm::tactile
