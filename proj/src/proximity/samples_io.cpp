#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "vtpalm/keyvalue.hpp"
#include "vtpalm/proximity.hpp"

namespace vtpalm::proximity {

namespace {

double parse_number(const std::string& cell, const std::string& where) {
  char* end = nullptr;
  const double x = std::strtod(cell.c_str(), &end);
  require(end != cell.c_str() && *end == '\0' && std::isfinite(x), ErrorKind::CorruptData,
          where + ": not a number '" + cell + "'");
  return x;
}

}  // namespace

std::vector<CalibrationSample> read_samples_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) {
    fail(std::filesystem::exists(path) ? ErrorKind::IoFailure : ErrorKind::MissingFile, path.string());
  }
  std::vector<CalibrationSample> samples;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1 && line.rfind("run_id", 0) == 0) continue;
    const std::string where = path.string() + " line " + std::to_string(lineno);
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    require(cells.size() == 4, ErrorKind::CorruptData, where + ": expected 4 columns, found " + std::to_string(cells.size()));
    CalibrationSample s;
    s.run_id = cells[0];
    s.speed = parse_number(cells[1], where);
    s.z_world = parse_number(cells[2], where);
    s.z_img = parse_number(cells[3], where);
    require(s.z_img >= 0.0, ErrorKind::CorruptData, where + ": z_img must be >= 0");
    require(s.z_world >= 0.0 && s.z_world <= 50.0, ErrorKind::CorruptData, where + ": z_world outside [0, 50] cm");
    samples.push_back(std::move(s));
  }
  return samples;
}

void write_samples_csv(const std::filesystem::path& path, std::span<const CalibrationSample> samples) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.precision(17);
  out << "run_id,speed_cmps,z_world_cm,z_img\n";
  for (const auto& s : samples) out << s.run_id << "," << s.speed << "," << s.z_world << "," << s.z_img << "\n";
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

void write_model(const std::filesystem::path& path, const DoubleExpModel& model) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.precision(17);
  out << "a=" << model.a() << "\nb=" << model.b() << "\nc=" << model.c() << "\nd=" << model.d() << "\n";
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

DoubleExpModel read_model(const std::filesystem::path& path) {
  const KeyValueConfig kv = KeyValueConfig::load(path);
  for (const char* key : {"a", "b", "c", "d"}) {
    require(kv.contains(key), ErrorKind::CorruptData, path.string() + ": missing model coefficient '" + key + "'");
  }
  return DoubleExpModel(kv.get_double("a", 0), kv.get_double("b", 0), kv.get_double("c", 0), kv.get_double("d", 0));
}

}  // namespace vtpalm::proximity
