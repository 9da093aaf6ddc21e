#include <cmath>
#include <cstdio>

#include "vtpalm/control.hpp"
#include "vtpalm/image_ops.hpp"

namespace vtpalm::control {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Proximity: return "Proximity";
    case Mode::Switching: return "Switching";
    case Mode::Tactile: return "Tactile";
    case Mode::Grasping: return "Grasping";
  }
  return "?";
}

const char* command_name(CommandKind k) {
  switch (k) {
    case CommandKind::ServoPulse: return "ServoPulse";
    case CommandKind::LedSet: return "LedSet";
    case CommandKind::GraspSignal: return "GraspSignal";
    case CommandKind::BeltAdjust: return "BeltAdjust";
  }
  return "?";
}

const char* event_name(const SensorEvent& e) {
  static constexpr const char* names[] = {"DistanceMeasured", "TactileFrame", "Tick", "Reset"};
  return names[e.index()];
}

double event_time(const SensorEvent& e) {
  return std::visit([](const auto& ev) { return ev.t; }, e);
}

void SwitchConfig::validate() const {
  require(distance_threshold > 0.0 && std::isfinite(distance_threshold), ErrorKind::InvalidArgument,
          "distance threshold must be > 0");
  require(deploy_pulse > 0 && retract_pulse > 0, ErrorKind::InvalidArgument, "servo pulses must be > 0");
  require(deploy_duration > 0.0, ErrorKind::InvalidArgument, "deploy duration must be > 0");
  require(contact_threshold > 0.0 && contact_frames >= 1, ErrorKind::InvalidArgument,
          "contact threshold and frame count must be positive");
  require(control_rate > 0.0 && sense_rate > 0.0, ErrorKind::InvalidArgument, "rates must be > 0");
}

SwitchConfig SwitchConfig::from_config(const KeyValueConfig& cfg) {
  SwitchConfig c;
  c.distance_threshold = cfg.get_double("distance_threshold", c.distance_threshold);
  c.deploy_pulse = static_cast<int>(cfg.get_long("deploy_pulse", c.deploy_pulse));
  c.retract_pulse = static_cast<int>(cfg.get_long("retract_pulse", c.retract_pulse));
  c.deploy_duration = cfg.get_double("deploy_duration", c.deploy_duration);
  c.contact_threshold = cfg.get_double("contact_threshold", c.contact_threshold);
  c.contact_frames = static_cast<int>(cfg.get_long("contact_frames", c.contact_frames));
  c.control_rate = cfg.get_double("control_rate", c.control_rate);
  c.sense_rate = cfg.get_double("sense_rate", c.sense_rate);
  c.validate();
  return c;
}

std::string DeviceCommand::to_line() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "t=%.3f kind=%s pulse_us=%d dur_ms=%g val=%g", t, command_name(kind), pulse_us,
                duration_ms, value);
  return buf;
}

std::string format_log(const std::vector<DeviceCommand>& commands) {
  std::string out;
  for (const auto& c : commands) out += c.to_line() + "\n";
  return out;
}

double control_time(double t, double control_rate) {
  // Tolerance keeps times already on the grid from being bumped a tick later.
  return std::ceil(t * control_rate - 1e-9) / control_rate;
}

bool detect_contact(const RasterImage& frame, const RasterImage& reference, const SwitchConfig& cfg, int& streak) {
  const RasterImage diff = difference_image(frame, reference);
  double mean = 0.0;
  for (float x : diff.data()) mean += x;
  mean /= static_cast<double>(diff.pixel_count());
  streak = mean > cfg.contact_threshold ? streak + 1 : 0;
  return streak >= cfg.contact_frames;
}

namespace {

[[noreturn]] void reject(Mode m, const SensorEvent& e) {
  fail(ErrorKind::InvalidEvent, std::string(event_name(e)) + " is not valid in mode " + mode_name(m));
}

}  // namespace

StepResult step(const PalmState& state, const SensorEvent& event, const SwitchConfig& cfg) {
  cfg.validate();
  const double t = event_time(event);
  require(std::isfinite(t) && t >= state.last_event_time, ErrorKind::InvalidArgument,
          "event at t=" + std::to_string(t) + " s arrives before t=" + std::to_string(state.last_event_time));
  StepResult r{state, {}};
  PalmState& s = r.state;
  s.last_event_time = t;
  const double tc = control_time(t, cfg.control_rate);

  if (std::holds_alternative<Reset>(event)) {
    if (state.mode != Mode::Proximity) {
      r.commands.push_back({CommandKind::ServoPulse, cfg.retract_pulse, cfg.deploy_duration, 0.0, tc});
      r.commands.push_back({CommandKind::LedSet, 0, 0.0, 0.0, tc});
    }
    s = PalmState{};
    s.last_event_time = t;
    return r;
  }

  switch (state.mode) {
    case Mode::Proximity:
      if (const auto* d = std::get_if<DistanceMeasured>(&event)) {
        require(std::isfinite(d->distance_cm), ErrorKind::InvalidArgument, "distance must be finite");
        s.last_distance = d->distance_cm;
        if (d->distance_cm <= cfg.distance_threshold) {
          r.commands.push_back({CommandKind::ServoPulse, cfg.deploy_pulse, cfg.deploy_duration, 1.0, tc});
          // Lights come on once the belt is in place, deploy_duration from now.
          r.commands.push_back({CommandKind::LedSet, 0, cfg.deploy_duration, 1.0, tc});
          s.mode = Mode::Switching;
          s.switch_time = tc;
        }
      } else if (std::holds_alternative<TactileFrame>(event)) {
        reject(state.mode, event);
      }
      break;

    case Mode::Switching:
      if (std::holds_alternative<Tick>(event)) {
        if (t - s.switch_time >= cfg.deploy_duration / 1000.0 - 1e-9) {
          s.mode = Mode::Tactile;
          s.belt_steps = kBeltSteps;
          s.led_on = true;
          s.contact_streak = 0;
          s.reference.reset();
        }
      } else if (std::holds_alternative<TactileFrame>(event)) {
        reject(state.mode, event);
      }
      break;

    case Mode::Tactile:
      if (const auto* f = std::get_if<TactileFrame>(&event)) {
        if (!s.reference) {
          s.reference = f->frame;
          break;
        }
        if (detect_contact(f->frame, *s.reference, cfg, s.contact_streak)) {
          r.commands.push_back({CommandKind::GraspSignal, 0, 0.0, 1.0, tc});
          s.mode = Mode::Grasping;
        }
      } else if (std::holds_alternative<DistanceMeasured>(event)) {
        reject(state.mode, event);
      }
      break;

    case Mode::Grasping:
      if (!std::holds_alternative<Tick>(event)) reject(state.mode, event);
      break;
  }
  return r;
}

StepResult belt_adjust(const PalmState& state, double delta, double t, const SwitchConfig& cfg) {
  cfg.validate();
  require(state.mode == Mode::Grasping, ErrorKind::WrongMode,
          std::string("belt adjustment needs Grasping, mode is ") + mode_name(state.mode));
  require(std::isfinite(delta) && std::isfinite(t), ErrorKind::InvalidArgument, "belt delta and time must be finite");
  require(t >= state.last_event_time, ErrorKind::InvalidArgument, "belt adjustment arrives out of order");
  const auto steps = static_cast<std::int64_t>(std::llround(delta * static_cast<double>(kBeltSteps)));
  StepResult r{state, {}};
  if (steps == 0) return r;
  const std::int64_t target = state.belt_steps + steps;
  require(target >= 0 && target <= kBeltSteps, ErrorKind::OutOfRange, "belt position would leave [0, 1]");
  r.state.belt_steps = target;
  r.state.last_event_time = t;
  const double magnitude = static_cast<double>(std::llabs(steps)) / static_cast<double>(kBeltSteps);
  r.commands.push_back({CommandKind::BeltAdjust, steps > 0 ? cfg.deploy_pulse : cfg.retract_pulse,
                        magnitude * cfg.deploy_duration, r.state.belt_position(), control_time(t, cfg.control_rate)});
  return r;
}

}  // namespace vtpalm::control
