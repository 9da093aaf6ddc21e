#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "vtpalm/image_io.hpp"
#include "vtpalm/random.hpp"
#include "vtpalm/scene.hpp"

namespace vtpalm::scene {

namespace fs = std::filesystem;

void ApproachScenario::validate() const {
  require(std::isfinite(speed) && speed > 0.0, ErrorKind::InvalidArgument, "speed must be > 0");
  require(std::isfinite(start_distance) && start_distance > 0.0, ErrorKind::InvalidArgument,
          "start distance must be > 0");
  require(std::isfinite(frame_rate) && frame_rate > 0.0, ErrorKind::InvalidArgument, "frame rate must be > 0");
  require(end_distance >= 0.0 && end_distance < start_distance, ErrorKind::InvalidArgument,
          "end distance must lie in [0, start)");
  require(target_size > 0.0 && focal_scale > 0.0, ErrorKind::InvalidArgument, "target geometry must be positive");
  require(noise_sigma >= 0.0, ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  require(width > 0 && height > 0, ErrorKind::InvalidArgument, "frame size must be positive");
  require(background_depth >= 0.0 && z_max > 0.0, ErrorKind::InvalidArgument, "depth range must be positive");
}

ApproachScenario ApproachScenario::from_config(const KeyValueConfig& cfg) {
  ApproachScenario s;
  s.speed = cfg.get_double("speed", s.speed);
  s.start_distance = cfg.get_double("start_distance", s.start_distance);
  s.end_distance = cfg.get_double("end_distance", s.end_distance);
  s.frame_rate = cfg.get_double("frame_rate", s.frame_rate);
  s.target_size = cfg.get_double("target_size", s.target_size);
  s.noise_sigma = cfg.get_double("noise_sigma", s.noise_sigma);
  s.seed = static_cast<std::uint64_t>(cfg.get_long("seed", static_cast<long>(s.seed)));
  s.width = static_cast<std::size_t>(cfg.get_long("width", static_cast<long>(s.width)));
  s.height = static_cast<std::size_t>(cfg.get_long("height", static_cast<long>(s.height)));
  s.focal_scale = cfg.get_double("focal_scale", s.focal_scale);
  s.background_depth = cfg.get_double("background_depth", s.background_depth);
  s.z_max = cfg.get_double("z_max", s.z_max);
  s.validate();
  return s;
}

double invert_model(const proximity::DoubleExpModel& model, double z_world, double z_max) {
  const double hi_value = model(0.0);
  const double lo_value = model(z_max);
  require(std::isfinite(z_world) && z_world <= hi_value && z_world >= lo_value, ErrorKind::OutOfRange,
          "distance " + std::to_string(z_world) + " cm is outside the model range [" + std::to_string(lo_value) +
              ", " + std::to_string(hi_value) + "]");
  double lo = 0.0, hi = z_max;
  double mid = 0.5 * (lo + hi);
  for (int i = 0; i < 200; ++i) {
    mid = 0.5 * (lo + hi);
    const double f = model(mid) - z_world;
    if (std::fabs(f) < 1e-10) break;
    // Decreasing model: too large a distance means x is too small.
    if (f > 0.0) lo = mid;
    else hi = mid;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, hi)) break;
  }
  return mid;
}

std::vector<SceneFrame> generate_sequence(const ApproachScenario& s, const proximity::DoubleExpModel& reference) {
  s.validate();
  Rng rng(s.seed);
  const double floor_distance = reference(s.z_max);

  std::vector<SceneFrame> frames;
  for (std::size_t k = 0;; ++k) {
    const double t = static_cast<double>(k) / s.frame_rate;
    const double truth = std::max(0.0, s.start_distance - s.speed * t);
    if (truth < s.end_distance) break;

    const double z = truth >= floor_distance ? invert_model(reference, truth, s.z_max) : s.z_max;
    const double apparent = truth > 0.0 ? s.focal_scale * s.target_size / truth : 1e9;
    const std::size_t side_u = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(std::min(apparent, 1e6))), 1, s.width);
    const std::size_t side_v = std::min(side_u, s.height);
    const std::size_t u0 = (s.width - side_u) / 2;
    const std::size_t v0 = (s.height - side_v) / 2;

    ScalarField depth(s.width, s.height, s.background_depth);
    Grid<std::uint8_t> mask(s.width, s.height, 0);
    for (std::size_t v = v0; v < v0 + side_v; ++v) {
      for (std::size_t u = u0; u < u0 + side_u; ++u) {
        mask(u, v) = 1;
        const double jitter = s.noise_sigma > 0.0 ? s.noise_sigma * rng.normal() : 0.0;
        depth(u, v) = std::max(0.0, z + jitter);
      }
    }
    frames.push_back({DepthMap(std::move(depth)), SegMask(std::move(mask)), truth, t});
    if (truth == 0.0) break;
  }
  return frames;
}

std::vector<proximity::TrackingFrame> to_tracking(const std::vector<SceneFrame>& frames) {
  std::vector<proximity::TrackingFrame> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back({f.depth, f.mask, f.truth_cm});
  return out;
}

void write_sequence(const fs::path& dir, const std::vector<SceneFrame>& frames) {
  fs::create_directories(dir);
  std::ofstream manifest(dir / "manifest.csv");
  require(manifest.good(), ErrorKind::IoFailure, "cannot write manifest in " + dir.string());
  manifest.precision(17);
  manifest << "frame,timestamp_s,truth_cm\n";
  for (std::size_t k = 0; k < frames.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.vtp", k);
    PlaneSet planes = to_planes(frames[k].depth);
    planes.planes.push_back(to_planes(frames[k].mask).planes[0]);
    write_vtp1(dir / name, planes);
    manifest << k << "," << frames[k].timestamp_s << "," << frames[k].truth_cm << "\n";
  }
}

std::vector<SceneFrame> read_sequence(const fs::path& dir) {
  std::ifstream manifest(dir / "manifest.csv");
  if (!manifest.good()) fail(ErrorKind::MissingFile, (dir / "manifest.csv").string());
  std::vector<SceneFrame> frames;
  std::string line;
  std::getline(manifest, line);
  while (std::getline(manifest, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::size_t k = 0;
    double t = 0.0, truth = 0.0;
    require(static_cast<bool>(ls >> k >> t >> truth), ErrorKind::CorruptData, "bad manifest row: " + line);
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.vtp", k);
    const PlaneSet p = read_vtp1(dir / name);
    require(p.planes.size() == 2, ErrorKind::CorruptData, std::string(name) + ": expected depth and mask planes");
    frames.push_back({depth_from_planes({p.width, p.height, {p.planes[0]}}),
                      mask_from_planes({p.width, p.height, {p.planes[1]}}), truth, t});
  }
  return frames;
}

}  // namespace vtpalm::scene
