#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "vtpalm/image.hpp"
#include "vtpalm/keyvalue.hpp"
#include "vtpalm/proximity.hpp"

namespace vtpalm::scene {

/// Per-pixel z_img noise that gives the reference tracking error scale.
inline constexpr double kCalibratedNoiseSigma = 0.10;

/// A square target approaching the palm camera at constant speed.
struct ApproachScenario {
  double speed = 17.5;           // cm/s
  double start_distance = 50.0;  // cm
  double end_distance = 0.0;     // cm, last frame is at or just above this
  double frame_rate = 30.0;      // fps
  double target_size = 5.0;      // cm, side of the square target
  double noise_sigma = 0.0;      // z_img units, per pixel
  std::uint64_t seed = 42;

  std::size_t width = 160;
  std::size_t height = 120;
  double focal_scale = 160.0;      // px: apparent side = focal_scale * target_size / distance
  double background_depth = 1.0;   // z_img value outside the target
  double z_max = 40.0;             // upper end of the invertible z_img range

  void validate() const;
  static ApproachScenario from_config(const KeyValueConfig& cfg);
};

struct SceneFrame {
  DepthMap depth;
  SegMask mask;
  double truth_cm = 0.0;
  double timestamp_s = 0.0;
};

/// Frame k sits at t = k / frame_rate with truth = start - speed * t (clamped at 0).
/// In-mask depth is the model inverse of the truth plus Gaussian noise; truths the
/// model cannot reach saturate at z_max.
std::vector<SceneFrame> generate_sequence(const ApproachScenario& s,
                                          const proximity::DoubleExpModel& reference =
                                              proximity::DoubleExpModel::reference());

/// Bisection inverse of a decreasing model on [0, z_max] to |f(x) - z_world| < 1e-9 cm.
double invert_model(const proximity::DoubleExpModel& model, double z_world, double z_max = 40.0);

/// Calibration runs in the style of the rig experiments: each run sweeps z_world
/// from max_cm down to min_cm in step_cm and records z_img = inverse(z_world) with
/// Gaussian noise of noise_cm expressed in cm (scaled through the local slope).
struct CalibrationRuns {
  std::size_t runs = 22;
  double min_cm = 10.0;
  double max_cm = 50.0;
  double step_cm = 1.0;
  double noise_cm = 2.0;
  std::vector<double> speeds{2.0, 4.0, 10.0, 12.5, 17.5, 22.5};  // cycled over runs
  std::uint64_t seed = 42;
  double z_max = 40.0;
};

std::vector<proximity::CalibrationSample> synthesize_calibration_runs(
    const CalibrationRuns& cfg, const proximity::DoubleExpModel& reference = proximity::DoubleExpModel::reference());

std::vector<proximity::TrackingFrame> to_tracking(const std::vector<SceneFrame>& frames);

// Directory layout: frame_NNNNN.vtp (depth plane, mask plane) and manifest.csv.
void write_sequence(const std::filesystem::path& dir, const std::vector<SceneFrame>& frames);
std::vector<SceneFrame> read_sequence(const std::filesystem::path& dir);

}  // namespace vtpalm::scene
