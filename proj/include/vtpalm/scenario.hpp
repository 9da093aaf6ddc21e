#pragma once

#include <optional>
#include <vector>

#include "vtpalm/control.hpp"
#include "vtpalm/mapper.hpp"
#include "vtpalm/proximity.hpp"
#include "vtpalm/scene.hpp"
#include "vtpalm/tactile.hpp"

namespace vtpalm::control {

/// What the tactile camera sees once the belt is deployed.
struct PressScript {
  double depth = 1.2;  // mm
  double r = 5.0;      // mm, a grasped object, larger than the calibration ball
  double center_u = 128.0;
  double center_v = 96.0;
  std::size_t width = 256;
  std::size_t height = 192;
  double pixel_pitch = 0.04;
  std::size_t idle_frames = 2;  // no-contact frames after the reference
  tactile::LightingRig rig = tactile::LightingRig::standard(45.0, 0.6, 0.2, 0.01);
  std::uint64_t seed = 7;
  double clamp_fraction = 0.95;

  void validate() const;
  static PressScript from_config(const KeyValueConfig& cfg);
};

struct ScenarioConfig {
  scene::ApproachScenario approach;
  PressScript press;
  SwitchConfig control;
};

struct FrameLog {
  double t = 0.0;
  double truth_cm = 0.0;
  std::optional<double> estimate_cm;  // only while ranging
  Mode mode = Mode::Proximity;
};

struct ScenarioReport {
  std::vector<DeviceCommand> commands;
  std::vector<FrameLog> frames;  // approach frames, then tactile frames
  std::optional<double> switch_time;
  std::optional<double> switch_measured_cm;
  std::optional<double> switch_truth_cm;
  std::optional<double> contact_time;
  Mode final_mode = Mode::Proximity;
  proximity::TrackingReport tracking;
  double ranging_accuracy = 0.0;
  std::optional<tactile::ContactCircle> contact;
  std::optional<HeightMap> reconstruction;
  double reconstructed_depth = 0.0;  // mm, rim level minus deepest point
};

/// Approach frames at sense_rate feed the state machine, interleaved in time order
/// with control ticks at control_rate. Once Tactile, scripted frames follow: a flat
/// reference, idle_frames flat frames, then the press until contact is confirmed.
/// The pressed frame is then pushed through the mapper and reconstructed.
ScenarioReport run_grasp_scenario(const ScenarioConfig& cfg, const proximity::DoubleExpModel& model,
                                  const mapper::MlpWeights& weights);

}  // namespace vtpalm::control
