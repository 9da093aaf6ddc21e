#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vtpalm/image.hpp"
#include "vtpalm/keyvalue.hpp"

namespace vtpalm::control {

enum class Mode { Proximity, Switching, Tactile, Grasping };
const char* mode_name(Mode m);

struct SwitchConfig {
  double distance_threshold = 10.0;  // cm
  int deploy_pulse = 100;            // us, counter-clockwise: belt out
  int retract_pulse = 2500;          // us, clockwise: belt back
  double deploy_duration = 1200.0;   // ms
  double contact_threshold = 0.05;   // mean |frame - reference|
  int contact_frames = 3;
  double control_rate = 50.0;  // Hz
  double sense_rate = 30.0;    // fps

  void validate() const;
  static SwitchConfig from_config(const KeyValueConfig& cfg);
};

/// Belt travel is tracked in integer micro-steps so that opposite adjustments cancel exactly.
inline constexpr std::int64_t kBeltSteps = 1'000'000;

struct PalmState {
  Mode mode = Mode::Proximity;
  std::optional<double> last_distance;  // cm, frozen once switching starts
  std::int64_t belt_steps = 0;
  bool led_on = false;
  double switch_time = 0.0;  // s, when the deploy pulse went out
  double last_event_time = 0.0;
  int contact_streak = 0;
  std::optional<RasterImage> reference;  // first tactile frame after deployment

  double belt_position() const { return static_cast<double>(belt_steps) / static_cast<double>(kBeltSteps); }
  bool operator==(const PalmState&) const = default;
};

struct DistanceMeasured {
  double t = 0.0;
  double distance_cm = 0.0;
};
struct TactileFrame {
  double t = 0.0;
  RasterImage frame;
};
struct Tick {
  double t = 0.0;
};
struct Reset {
  double t = 0.0;
};
using SensorEvent = std::variant<DistanceMeasured, TactileFrame, Tick, Reset>;

const char* event_name(const SensorEvent& e);
double event_time(const SensorEvent& e);

enum class CommandKind { ServoPulse, LedSet, GraspSignal, BeltAdjust };
const char* command_name(CommandKind k);

struct DeviceCommand {
  CommandKind kind = CommandKind::ServoPulse;
  int pulse_us = 0;
  double duration_ms = 0.0;
  double value = 0.0;
  double t = 0.0;  // s, on the control grid

  /// t=<s> kind=<name> pulse_us=<n> dur_ms=<n> val=<x>
  std::string to_line() const;
  bool operator==(const DeviceCommand&) const = default;
};

/// First control tick at or after t.
double control_time(double t, double control_rate);

struct StepResult {
  PalmState state;
  std::vector<DeviceCommand> commands;
};

/// Pure transition function. Events must arrive in time order. DistanceMeasured is
/// rejected in Tactile/Grasping and TactileFrame in Proximity/Switching (InvalidEvent).
/// In Tactile the first frame becomes the no-contact reference.
StepResult step(const PalmState& state, const SensorEvent& event, const SwitchConfig& cfg);

/// Debounced contact test; `streak` carries the consecutive above-threshold count.
bool detect_contact(const RasterImage& frame, const RasterImage& reference, const SwitchConfig& cfg, int& streak);

/// Grasping only. Moves the belt by `delta` of its travel; BeltAdjust pulse direction
/// follows the sign and its duration is |delta| * deploy_duration.
StepResult belt_adjust(const PalmState& state, double delta, double t, const SwitchConfig& cfg);

std::string format_log(const std::vector<DeviceCommand>& commands);

}  // namespace vtpalm::control
