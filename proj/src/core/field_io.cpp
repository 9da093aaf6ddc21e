#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "vtpalm/image_io.hpp"

namespace vtpalm {

namespace fs = std::filesystem;

namespace {

constexpr std::array<char, 4> kMagic = {'V', 'T', 'P', '1'};

void put_u32(std::ostream& out, std::uint32_t x) {
  const std::array<unsigned char, 4> b = {static_cast<unsigned char>(x), static_cast<unsigned char>(x >> 8),
                                          static_cast<unsigned char>(x >> 16), static_cast<unsigned char>(x >> 24)};
  out.write(reinterpret_cast<const char*>(b.data()), 4);
}

std::uint32_t get_u32(std::istream& in, const fs::path& path) {
  std::array<unsigned char, 4> b{};
  in.read(reinterpret_cast<char*>(b.data()), 4);
  require(in.gcount() == 4, ErrorKind::CorruptData, path.string() + ": truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void check_planes(const PlaneSet& p) {
  for (const auto& plane : p.planes) {
    require(plane.size() == p.width * p.height, ErrorKind::DimensionMismatch, "plane size mismatch");
  }
}

}  // namespace

void write_planes_csv(const fs::path& path, const PlaneSet& p) {
  check_planes(p);
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.precision(17);
  out << p.width << "," << p.height << "\n";
  for (const auto& plane : p.planes) {
    for (std::size_t v = 0; v < p.height; ++v) {
      for (std::size_t u = 0; u < p.width; ++u) {
        if (u) out << ',';
        out << plane[v * p.width + u];
      }
      out << '\n';
    }
  }
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

PlaneSet read_planes_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in.good()) fail(fs::exists(path) ? ErrorKind::IoFailure : ErrorKind::MissingFile, path.string());
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::CorruptData, path.string() + ": empty file");
  PlaneSet p;
  {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream hs(line);
    require(static_cast<bool>(hs >> p.width >> p.height), ErrorKind::CorruptData,
            path.string() + ": header must be 'width,height'");
  }
  std::vector<double> values;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      require(end != cell.c_str() && std::isfinite(x), ErrorKind::CorruptData,
              path.string() + ":" + std::to_string(lineno) + ": bad value '" + cell + "'");
      values.push_back(x);
    }
  }
  const std::size_t n = p.width * p.height;
  require(n > 0 && values.size() % n == 0, ErrorKind::CorruptData,
          path.string() + ": value count is not a multiple of width*height");
  for (std::size_t k = 0; k < values.size() / n; ++k) {
    p.planes.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(k * n),
                          values.begin() + static_cast<std::ptrdiff_t>((k + 1) * n));
  }
  return p;
}

void write_vtp1(const fs::path& path, const PlaneSet& p) {
  check_planes(p);
  std::ofstream out(path, std::ios::binary);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out.write(kMagic.data(), 4);
  put_u32(out, static_cast<std::uint32_t>(p.width));
  put_u32(out, static_cast<std::uint32_t>(p.height));
  for (const auto& plane : p.planes) {
    for (double x : plane) {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
    }
  }
  require(out.good(), ErrorKind::IoFailure, "write failed: " + path.string());
}

PlaneSet read_vtp1(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) fail(fs::exists(path) ? ErrorKind::IoFailure : ErrorKind::MissingFile, path.string());
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  require(in.gcount() == 4 && magic == kMagic, ErrorKind::UnsupportedFormat, path.string() + ": missing VTP1 magic");
  PlaneSet p;
  p.width = get_u32(in, path);
  p.height = get_u32(in, path);
  const std::size_t n = p.width * p.height;
  require(n > 0, ErrorKind::CorruptData, path.string() + ": zero-sized planes");

  const auto payload_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload_bytes = static_cast<std::size_t>(in.tellg() - payload_start);
  in.seekg(payload_start);
  require(payload_bytes % (4 * n) == 0, ErrorKind::CorruptData, path.string() + ": payload is not whole planes");

  for (std::size_t k = 0; k < payload_bytes / (4 * n); ++k) {
    std::vector<double> plane(n);
    for (auto& x : plane) x = std::bit_cast<float>(get_u32(in, path));
    p.planes.push_back(std::move(plane));
  }
  return p;
}

PlaneSet to_planes(const ScalarField& f) { return {f.width(), f.height(), {f.vector()}}; }

PlaneSet to_planes(const DepthMap& depth) { return to_planes(depth.field()); }

PlaneSet to_planes(const SegMask& mask) {
  std::vector<double> plane(mask.grid().values().begin(), mask.grid().values().end());
  return {mask.width(), mask.height(), {std::move(plane)}};
}

PlaneSet to_planes(const GradientField& g) { return {g.width(), g.height(), {g.gu.vector(), g.gv.vector()}}; }

PlaneSet to_planes(const HeightMap& h) { return to_planes(h.z); }

namespace {
void expect_planes(const PlaneSet& p, std::size_t count, const char* what) {
  require(p.planes.size() == count, ErrorKind::CorruptData,
          std::string(what) + ": expected " + std::to_string(count) + " plane(s), found " +
              std::to_string(p.planes.size()));
}
}  // namespace

DepthMap depth_from_planes(const PlaneSet& p) {
  expect_planes(p, 1, "depth map");
  return DepthMap(ScalarField(p.width, p.height, p.planes[0]));
}

SegMask mask_from_planes(const PlaneSet& p) {
  expect_planes(p, 1, "mask");
  Grid<std::uint8_t> g(p.width, p.height);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = p.planes[0][i] != 0.0 ? 1 : 0;
  return SegMask(std::move(g));
}

GradientField gradient_from_planes(const PlaneSet& p) {
  expect_planes(p, 2, "gradient field");
  return GradientField(ScalarField(p.width, p.height, p.planes[0]), ScalarField(p.width, p.height, p.planes[1]));
}

HeightMap height_from_planes(const PlaneSet& p, double pixel_pitch) {
  expect_planes(p, 1, "height map");
  return HeightMap(ScalarField(p.width, p.height, p.planes[0]), pixel_pitch);
}

}  // namespace vtpalm
