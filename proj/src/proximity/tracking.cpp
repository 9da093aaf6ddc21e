#include <cmath>
#include <limits>
#include <string>

#include "vtpalm/proximity.hpp"

namespace vtpalm::proximity {

TrackingReport evaluate_tracking(const DoubleExpModel& model, std::span<const TrackingFrame> sequence,
                                 std::span<const double> checkpoints) {
  require(!sequence.empty(), ErrorKind::InvalidArgument, "tracking sequence is empty");
  TrackingReport report;
  report.frames.reserve(sequence.size());
  for (std::size_t k = 0; k < sequence.size(); ++k) {
    const auto& f = sequence[k];
    double z = 0.0;
    try {
      z = mask_mean_depth(f.depth, f.mask);
    } catch (const Error& e) {
      throw Error(e.kind(), "frame " + std::to_string(k) + ": " + e.what());
    }
    const double predicted = predict_distance(model, z);
    report.frames.push_back({k, z, f.truth_cm, predicted, std::fabs(predicted - f.truth_cm)});
  }

  double max_step = 0.0;
  for (std::size_t k = 1; k < sequence.size(); ++k) {
    max_step = std::max(max_step, std::fabs(sequence[k].truth_cm - sequence[k - 1].truth_cm));
  }

  double total = 0.0;
  for (double target : checkpoints) {
    const FrameEstimate* nearest = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& est : report.frames) {
      const double gap = std::fabs(est.truth_cm - target);
      if (gap < best) {
        best = gap;
        nearest = &est;
      }
    }
    if (nearest == nullptr || best > std::max(max_step, 1e-9)) continue;
    report.checkpoints.push_back({target, *nearest});
    total += nearest->abs_error_cm;
  }
  require(!report.checkpoints.empty(), ErrorKind::InsufficientSamples,
          "sequence does not pass any tracking checkpoint");
  report.mae_cm = total / static_cast<double>(report.checkpoints.size());
  return report;
}

double ranging_accuracy(const TrackingReport& report, double tolerance_cm) {
  if (report.checkpoints.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& c : report.checkpoints) hits += c.estimate.abs_error_cm < tolerance_cm ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(report.checkpoints.size());
}

}  // namespace vtpalm::proximity
