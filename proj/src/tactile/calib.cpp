#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "vtpalm/image_io.hpp"
#include "vtpalm/tactile.hpp"

namespace vtpalm::tactile {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::istringstream ls(line);
  std::string cell;
  while (std::getline(ls, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, const std::string& where) {
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  require(end != cell.c_str() && *end == '\0' && std::isfinite(x), ErrorKind::CorruptData,
          where + ": not a number '" + cell + "'");
  return x;
}

std::ifstream open_input(const fs::path& path) {
  std::ifstream in(path);
  if (!in.good()) fail(fs::exists(path) ? ErrorKind::IoFailure : ErrorKind::MissingFile, path.string());
  return in;
}

}  // namespace

double sphere_height(double r, double r_star) {
  require(r > 0.0 && r_star >= 0.0, ErrorKind::InvalidArgument, "sphere radius must be > 0, contact radius >= 0");
  require(r_star < r, ErrorKind::OutOfRange, "contact radius must be smaller than the sphere radius");
  return std::sqrt(r * r - r_star * r_star);
}

std::pair<double, double> sphere_gradient(double u, double v, double r) {
  require(r > 0.0, ErrorKind::InvalidArgument, "sphere radius must be > 0");
  const double s = r * r - u * u - v * v;
  require(s > 0.0, ErrorKind::OutOfRange, "point lies on or beyond the sphere rim");
  const double root = std::sqrt(s);
  return {u / root, v / root};
}

std::pair<double, double> sphere_gradient(double u, double v, double r, double domain_radius) {
  require(u * u + v * v <= domain_radius * domain_radius, ErrorKind::OutOfRange,
          "point lies outside the clamped contact disc");
  return sphere_gradient(u, v, r);
}

void SpherePress::validate() const {
  require(image.channels() == 3, ErrorKind::InvalidArgument, "press image must be RGB");
  require(image.same_shape(reference), ErrorKind::DimensionMismatch, "press and reference frames differ in shape");
  require(r > 0.0 && pixel_pitch > 0.0, ErrorKind::InvalidArgument, "sphere radius and pixel pitch must be > 0");
  require(r_star > 0.0 && r_star < r, ErrorKind::InvalidArgument, "contact radius must lie in (0, r)");
  require(std::isfinite(center_u) && std::isfinite(center_v), ErrorKind::InvalidArgument, "contact centre is not finite");
}

SegMask disc_mask(std::size_t width, std::size_t height, double cu, double cv, double radius) {
  SegMask mask(width, height, false);
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      const double du = static_cast<double>(u) - cu;
      const double dv = static_cast<double>(v) - cv;
      if (du * du + dv * dv <= radius * radius) mask.set(u, v, true);
    }
  }
  return mask;
}

std::vector<GradientSample> build_dataset(std::span<const SpherePress> presses, double clamp_fraction,
                                          std::vector<std::string>* skipped) {
  require(clamp_fraction >= 0.0 && clamp_fraction <= 1.0, ErrorKind::InvalidArgument,
          "clamp fraction must lie in [0, 1]");
  std::vector<GradientSample> out;
  for (std::size_t k = 0; k < presses.size(); ++k) {
    const SpherePress& p = presses[k];
    try {
      p.validate();
    } catch (const Error& e) {
      if (skipped) skipped->push_back("press " + std::to_string(k) + ": " + e.what());
      continue;
    }
    const double limit_px = clamp_fraction * p.r_star / p.pixel_pitch;
    const double limit_mm = clamp_fraction * p.r_star;
    const std::size_t w = p.image.width(), h = p.image.height();
    for (std::size_t v = 0; v < h; ++v) {
      for (std::size_t u = 0; u < w; ++u) {
        const double du = static_cast<double>(u) - p.center_u;
        const double dv = static_cast<double>(v) - p.center_v;
        if (du * du + dv * dv > limit_px * limit_px) continue;
        const double um = du * p.pixel_pitch, vm = dv * p.pixel_pitch;
        // Rounding in mm can nudge rim pixels past the domain; clamp to the limit.
        const double rho = std::hypot(um, vm);
        const double scale = rho > limit_mm && rho > 0.0 ? limit_mm / rho : 1.0;
        const auto [gu, gv] = sphere_gradient(um * scale, vm * scale, p.r);
        GradientSample s;
        s.i_r = p.image.at(u, v, 0);
        s.i_g = p.image.at(u, v, 1);
        s.i_b = p.image.at(u, v, 2);
        s.u = normalized_coordinate(u, w);
        s.v = normalized_coordinate(v, h);
        s.g_u = static_cast<float>(gu);
        s.g_v = static_cast<float>(gv);
        out.push_back(s);
      }
    }
  }
  return out;
}

void write_dataset_csv(const fs::path& path, std::span<const GradientSample> samples) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.precision(9);
  out << "i_r,i_g,i_b,u,v,g_u,g_v\n";
  for (const auto& s : samples) {
    out << s.i_r << ',' << s.i_g << ',' << s.i_b << ',' << s.u << ',' << s.v << ',' << s.g_u << ',' << s.g_v << '\n';
  }
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

std::vector<GradientSample> read_dataset_csv(const fs::path& path) {
  std::ifstream in = open_input(path);
  std::vector<GradientSample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("i_r", 0) == 0) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto cells = split_csv(line);
    require(cells.size() == 7, ErrorKind::CorruptData, where + ": expected 7 columns");
    float x[7];
    for (int i = 0; i < 7; ++i) x[i] = static_cast<float>(parse_number(cells[i], where));
    samples.push_back({x[0], x[1], x[2], x[3], x[4], x[5], x[6]});
  }
  return samples;
}

void write_dataset_vtp1(const fs::path& path, std::span<const GradientSample> samples) {
  require(!samples.empty(), ErrorKind::InvalidArgument, "cannot store an empty dataset");
  PlaneSet p{samples.size(), 1, std::vector<std::vector<double>>(7, std::vector<double>(samples.size()))};
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const float x[7] = {s.i_r, s.i_g, s.i_b, s.u, s.v, s.g_u, s.g_v};
    for (int c = 0; c < 7; ++c) p.planes[c][i] = x[c];
  }
  write_vtp1(path, p);
}

std::vector<GradientSample> read_dataset_vtp1(const fs::path& path) {
  const PlaneSet p = read_vtp1(path);
  require(p.planes.size() == 7 && p.height == 1, ErrorKind::CorruptData,
          path.string() + ": expected 7 sample planes of height 1");
  std::vector<GradientSample> samples(p.width);
  for (std::size_t i = 0; i < p.width; ++i) {
    auto f = [&](int c) { return static_cast<float>(p.planes[c][i]); };
    samples[i] = {f(0), f(1), f(2), f(3), f(4), f(5), f(6)};
  }
  return samples;
}

std::vector<PressManifestEntry> read_press_manifest(const fs::path& path) {
  std::ifstream in = open_input(path);
  const fs::path base = path.parent_path();
  std::vector<PressManifestEntry> entries;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (lineno == 1 && line.rfind("image", 0) == 0) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    const auto cells = split_csv(line);
    require(cells.size() == 2 || cells.size() == 5, ErrorKind::CorruptData, where + ": expected 2 or 5 columns");
    PressManifestEntry e;
    e.image = fs::path(cells[0]).is_absolute() ? fs::path(cells[0]) : base / cells[0];
    e.reference = fs::path(cells[1]).is_absolute() ? fs::path(cells[1]) : base / cells[1];
    if (cells.size() == 5 && !cells[2].empty()) {
      ContactCircle c;
      c.center_u = parse_number(cells[2], where);
      c.center_v = parse_number(cells[3], where);
      c.radius = parse_number(cells[4], where);
      require(c.radius > 0.0, ErrorKind::CorruptData, where + ": radius must be > 0");
      e.known = c;
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_press_manifest(const fs::path& path, std::span<const PressManifestEntry> entries) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.precision(17);
  out << "image,reference,center_u,center_v,r_star_px\n";
  for (const auto& e : entries) {
    out << e.image.string() << ',' << e.reference.string();
    if (e.known) out << ',' << e.known->center_u << ',' << e.known->center_v << ',' << e.known->radius;
    out << '\n';
  }
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

}  // namespace vtpalm::tactile
