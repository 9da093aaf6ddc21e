#include <cmath>
#include <cstdio>

#include "vtpalm/random.hpp"
#include "vtpalm/scene.hpp"

namespace vtpalm::scene {

std::vector<proximity::CalibrationSample> synthesize_calibration_runs(const CalibrationRuns& cfg,
                                                                      const proximity::DoubleExpModel& reference) {
  require(cfg.runs > 0 && !cfg.speeds.empty(), ErrorKind::InvalidArgument, "need at least one run and one speed");
  require(cfg.step_cm > 0.0 && cfg.min_cm >= 0.0 && cfg.max_cm > cfg.min_cm, ErrorKind::InvalidArgument,
          "bad distance sweep");
  require(cfg.noise_cm >= 0.0, ErrorKind::InvalidArgument, "noise must be >= 0");
  Rng rng(cfg.seed);
  const double lo = reference(cfg.z_max);
  std::vector<proximity::CalibrationSample> out;
  const auto steps = static_cast<std::size_t>(std::floor((cfg.max_cm - cfg.min_cm) / cfg.step_cm + 1e-9));
  for (std::size_t run = 0; run < cfg.runs; ++run) {
    char id[16];
    std::snprintf(id, sizeof id, "run%02zu", run + 1);
    const double speed = cfg.speeds[run % cfg.speeds.size()];
    for (std::size_t k = 0; k <= steps; ++k) {
      const double truth = cfg.max_cm - static_cast<double>(k) * cfg.step_cm;
      const double x = invert_model(reference, std::max(truth, lo), cfg.z_max);
      const double slope = std::fabs(reference.derivative(x));
      const double jitter = cfg.noise_cm > 0.0 ? cfg.noise_cm / slope * rng.normal() : 0.0;
      out.push_back({std::max(0.0, x + jitter), truth, speed, id});
    }
  }
  return out;
}

}  // namespace vtpalm::scene
