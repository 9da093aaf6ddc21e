#include <algorithm>
#include <cmath>

#include "vtpalm/recon.hpp"
#include "vtpalm/scenario.hpp"

namespace vtpalm::control {

void PressScript::validate() const {
  require(r > 0.0 && depth > 0.0 && depth < r, ErrorKind::InvalidArgument, "press depth must lie in (0, r)");
  require(width >= 8 && height >= 8 && pixel_pitch > 0.0, ErrorKind::InvalidArgument, "bad tactile frame geometry");
  require(clamp_fraction > 0.0 && clamp_fraction <= 1.0, ErrorKind::InvalidArgument, "clamp fraction must lie in (0, 1]");
  rig.validate();
}

PressScript PressScript::from_config(const KeyValueConfig& cfg) {
  PressScript p;
  p.depth = cfg.get_double("press_depth", p.depth);
  p.r = cfg.get_double("sphere_radius", p.r);
  p.width = static_cast<std::size_t>(cfg.get_long("tactile_width", static_cast<long>(p.width)));
  p.height = static_cast<std::size_t>(cfg.get_long("tactile_height", static_cast<long>(p.height)));
  p.center_u = cfg.get_double("press_center_u", 0.5 * static_cast<double>(p.width));
  p.center_v = cfg.get_double("press_center_v", 0.5 * static_cast<double>(p.height));
  p.pixel_pitch = cfg.get_double("pixel_pitch", p.pixel_pitch);
  p.idle_frames = static_cast<std::size_t>(cfg.get_long("idle_frames", static_cast<long>(p.idle_frames)));
  p.rig = tactile::LightingRig::from_config(cfg);
  p.seed = static_cast<std::uint64_t>(cfg.get_long("press_seed", static_cast<long>(p.seed)));
  p.clamp_fraction = cfg.get_double("clamp_fraction", p.clamp_fraction);
  p.validate();
  return p;
}

namespace {

struct Machine {
  const SwitchConfig& cfg;
  ScenarioReport& report;
  PalmState state;

  void feed(const SensorEvent& e) {
    const Mode before = state.mode;
    StepResult r = step(state, e, cfg);
    state = std::move(r.state);
    report.commands.insert(report.commands.end(), r.commands.begin(), r.commands.end());
    if (before == Mode::Proximity && state.mode == Mode::Switching) report.switch_time = state.switch_time;
    if (before == Mode::Tactile && state.mode == Mode::Grasping) report.contact_time = event_time(e);
  }
};

}  // namespace

ScenarioReport run_grasp_scenario(const ScenarioConfig& cfg, const proximity::DoubleExpModel& model,
                                  const mapper::MlpWeights& weights) {
  cfg.control.validate();
  cfg.press.validate();
  weights.validate();
  ScenarioReport report;

  const auto frames = scene::generate_sequence(cfg.approach);
  const auto tracking_frames = scene::to_tracking(frames);
  report.tracking = proximity::evaluate_tracking(model, tracking_frames);
  report.ranging_accuracy = proximity::ranging_accuracy(report.tracking);

  Machine m{cfg.control, report, {}};
  // k / rate matches control_time() bit for bit, so ties merge consistently.
  std::size_t next_tick = 0;
  auto tick_at = [&](std::size_t k) { return static_cast<double>(k) / cfg.control.control_rate; };
  auto tick_until = [&](double t) {
    while (tick_at(next_tick) <= t) m.feed(Tick{tick_at(next_tick++)});
  };

  // Approach: ranging while Proximity or Switching.
  for (std::size_t k = 0; k < frames.size(); ++k) {
    const auto& f = frames[k];
    tick_until(f.timestamp_s);
    if (m.state.mode != Mode::Proximity && m.state.mode != Mode::Switching) break;
    FrameLog log{f.timestamp_s, f.truth_cm, std::nullopt, m.state.mode};
    double estimate = 0.0;
    try {
      estimate = proximity::predict_distance(model, proximity::mask_mean_depth(f.depth, f.mask));
    } catch (const Error& e) {
      throw Error(e.kind(), "approach frame " + std::to_string(k) + ": " + e.what());
    }
    log.estimate_cm = estimate;
    const Mode before = m.state.mode;
    m.feed(DistanceMeasured{f.timestamp_s, estimate});
    if (before == Mode::Proximity && m.state.mode == Mode::Switching) {
      report.switch_measured_cm = estimate;
      report.switch_truth_cm = f.truth_cm;
    }
    log.mode = m.state.mode;
    report.frames.push_back(log);
  }
  if (m.state.mode == Mode::Switching) {
    const double ready = *report.switch_time + cfg.control.deploy_duration / 1000.0;
    while (m.state.mode == Mode::Switching && tick_at(next_tick) <= ready + 1.0) m.feed(Tick{tick_at(next_tick++)});
  }
  if (m.state.mode != Mode::Tactile) {
    report.final_mode = m.state.mode;
    return report;
  }

  // Tactile phase.
  const PressScript& p = cfg.press;
  const auto flat = tactile::make_height_sphere_press(p.r, 0.0, p.center_u, p.center_v, p.width, p.height, p.pixel_pitch);
  const auto pressed = tactile::make_height_sphere_press(p.r, p.depth, p.center_u, p.center_v, p.width, p.height,
                                                         p.pixel_pitch);
  const double frame_dt = 1.0 / cfg.control.sense_rate;
  double t = std::ceil(m.state.last_event_time / frame_dt - 1e-9) * frame_dt;
  if (t <= m.state.last_event_time) t += frame_dt;
  RasterImage reference, last_pressed;
  const std::size_t limit = 1 + p.idle_frames + static_cast<std::size_t>(cfg.control.contact_frames) + 10;
  for (std::size_t i = 0; i < limit && m.state.mode == Mode::Tactile; ++i, t += frame_dt) {
    const bool touching = i > p.idle_frames;
    RasterImage img = tactile::render(touching ? pressed.height : flat.height, p.rig, p.seed + i);
    if (i == 0) reference = img;
    if (touching) last_pressed = img;
    report.frames.push_back({t, 0.0, std::nullopt, m.state.mode});
    m.feed(TactileFrame{t, std::move(img)});
    report.frames.back().mode = m.state.mode;
  }
  report.final_mode = m.state.mode;
  if (m.state.mode != Mode::Grasping) return report;

  const tactile::ContactCircle c = tactile::detect_contact_circle(last_pressed, reference);
  report.contact = c;
  const SegMask domain = tactile::disc_mask(p.width, p.height, c.center_u, c.center_v, p.clamp_fraction * c.radius);
  const GradientField g = mapper::infer_gradients(weights, last_pressed, &domain);
  report.reconstruction = recon::reconstruct(g, p.pixel_pitch);
  report.reconstructed_depth = tactile::estimate_press_depth(*report.reconstruction, c, p.clamp_fraction, p.r);
  return report;
}

}  // namespace vtpalm::control
