#include <cmath>
#include <string>

#include "vtpalm/proximity.hpp"

namespace vtpalm::proximity {

DoubleExpModel::DoubleExpModel(double a, double b, double c, double d) : a_(a), b_(b), c_(c), d_(d) {
  require(std::isfinite(a) && std::isfinite(c), ErrorKind::InvalidArgument, "model coefficients must be finite");
  require(std::isfinite(b) && b > 0.0 && std::isfinite(d) && d > 0.0, ErrorKind::InvalidArgument,
          "decay rates b and d must be positive (got b=" + std::to_string(b) + ", d=" + std::to_string(d) + ")");
}

DoubleExpModel DoubleExpModel::reference() { return {85.9058, 0.3754, 1.5110e6, 4.0941}; }

double DoubleExpModel::operator()(double x) const noexcept { return a_ * std::exp(-b_ * x) + c_ * std::exp(-d_ * x); }

double DoubleExpModel::derivative(double x) const noexcept {
  return -a_ * b_ * std::exp(-b_ * x) - c_ * d_ * std::exp(-d_ * x);
}

double predict_distance(const DoubleExpModel& model, double z_img) {
  require(std::isfinite(z_img) && z_img >= 0.0, ErrorKind::InvalidArgument, "z_img must be finite and >= 0");
  return model(z_img);
}

double mask_mean_depth(const DepthMap& depth, const SegMask& mask) {
  require(depth.width() == mask.width() && depth.height() == mask.height(), ErrorKind::DimensionMismatch,
          "depth map and mask differ in size");
  double sum = 0.0;
  std::size_t count = 0;
  const auto& m = mask.grid();
  const auto& d = depth.field();
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i]) {
      sum += d[i];
      ++count;
    }
  }
  require(count > 0, ErrorKind::EmptyMask, "segmentation mask has no pixels");
  return sum / static_cast<double>(count);
}

}  // namespace vtpalm::proximity
