#include "vtpalm/keyvalue.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vtpalm/error.hpp"

namespace vtpalm {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text, const std::string& origin) {
  KeyValueConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos && eq > 0, ErrorKind::CorruptData,
            origin + ":" + std::to_string(lineno) + ": expected key=value");
    cfg.entries_[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in.good()) {
    fail(std::filesystem::exists(path) ? ErrorKind::IoFailure : ErrorKind::MissingFile, path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str(), path.string());
}

std::optional<std::string> KeyValueConfig::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

double KeyValueConfig::get_double(const std::string& key, double fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  const double x = std::strtod(v->c_str(), &end);
  require(end != v->c_str() && *end == '\0' && std::isfinite(x), ErrorKind::InvalidArgument,
          "config key '" + key + "' is not a number: " + *v);
  return x;
}

long KeyValueConfig::get_long(const std::string& key, long fallback) const {
  const auto v = get(key);
  if (!v) return fallback;
  char* end = nullptr;
  const long x = std::strtol(v->c_str(), &end, 10);
  require(end != v->c_str() && *end == '\0', ErrorKind::InvalidArgument,
          "config key '" + key + "' is not an integer: " + *v);
  return x;
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

std::string KeyValueConfig::to_text() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
  return out.str();
}

}  // namespace vtpalm
