#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "core/fft.hpp"
#include "vtpalm/random.hpp"
#include "vtpalm/tactile.hpp"

namespace vtpalm::tactile {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

// df/dx along one axis: central differences inside, one-sided at the ends.
double axis_derivative(const ScalarField& z, std::size_t u, std::size_t v, bool along_u, double pitch) {
  const std::size_t n = along_u ? z.width() : z.height();
  const std::size_t i = along_u ? u : v;
  if (n < 2) return 0.0;
  auto at = [&](std::size_t k) { return along_u ? z(k, v) : z(u, k); };
  if (i == 0) return (at(1) - at(0)) / pitch;
  if (i + 1 == n) return (at(n - 1) - at(n - 2)) / pitch;
  return (at(i + 1) - at(i - 1)) / (2.0 * pitch);
}

}  // namespace

LightingRig LightingRig::standard(double elevation_deg, double gain, double ambient, double noise_sigma,
                                  double falloff) {
  LightingRig rig;
  const double el = elevation_deg * kDeg;
  for (int c = 0; c < 3; ++c) {
    const double az = 120.0 * c * kDeg;
    rig.directions[c] = {std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), -std::sin(el)};
    rig.gains[c] = gain;
    rig.ambient[c] = ambient;
  }
  rig.noise_sigma = noise_sigma;
  rig.falloff = falloff;
  rig.validate();
  return rig;
}

LightingRig LightingRig::from_config(const KeyValueConfig& cfg) {
  return standard(cfg.get_double("light_elevation_deg", 45.0), cfg.get_double("light_gain", 0.6),
                  cfg.get_double("light_ambient", 0.2), cfg.get_double("tactile_noise", 0.01),
                  cfg.get_double("light_falloff", 0.1));
}

void LightingRig::validate() const {
  for (int c = 0; c < 3; ++c) {
    require(std::fabs(std::sqrt(dot(directions[c], directions[c])) - 1.0) < 1e-9, ErrorKind::InvalidArgument,
            "light directions must be unit vectors");
    require(gains[c] >= 0.0 && ambient[c] >= 0.0, ErrorKind::InvalidArgument, "gains and ambients must be >= 0");
    require(ambient[c] + gains[c] * (1.0 + falloff) <= 1.0 + 1e-12, ErrorKind::InvalidArgument,
            "ambient + gain exceeds the linear range");
  }
  require(falloff >= 0.0 && falloff < 1.0, ErrorKind::InvalidArgument, "falloff must lie in [0, 1)");
  require(noise_sigma >= 0.0, ErrorKind::InvalidArgument, "noise sigma must be >= 0");
}

KeyValueConfig LightingRig::to_config() const {
  KeyValueConfig kv;
  for (int c = 0; c < 3; ++c) {
    const std::string tag = std::string(1, "rgb"[c]);
    kv.set("light_" + tag + "_dir", std::to_string(directions[c][0]) + " " + std::to_string(directions[c][1]) +
                                         " " + std::to_string(directions[c][2]));
    kv.set("light_" + tag + "_gain", std::to_string(gains[c]));
    kv.set("light_" + tag + "_ambient", std::to_string(ambient[c]));
  }
  kv.set("light_falloff", std::to_string(falloff));
  kv.set("tactile_noise", std::to_string(noise_sigma));
  return kv;
}

NormalField normals_from_height(const HeightMap& h) {
  NormalField out{h.width(), h.height(), std::vector<Vec3>(h.z.size())};
  for (std::size_t v = 0; v < h.height(); ++v) {
    for (std::size_t u = 0; u < h.width(); ++u) {
      const double fu = axis_derivative(h.z, u, v, true, h.pixel_pitch);
      const double fv = axis_derivative(h.z, u, v, false, h.pixel_pitch);
      const double norm = std::sqrt(fu * fu + fv * fv + 1.0);
      out.normals[v * h.width() + u] = {fu / norm, fv / norm, -1.0 / norm};
    }
  }
  return out;
}

RasterImage shade(const NormalField& normals, const LightingRig& rig, std::uint64_t seed) {
  rig.validate();
  Rng rng(seed);
  RasterImage img(normals.width, normals.height, 3);
  std::array<std::array<double, 2>, 3> toward{};
  for (int c = 0; c < 3; ++c) {
    const double hx = rig.directions[c][0], hy = rig.directions[c][1];
    const double hn = std::hypot(hx, hy);
    toward[c] = hn > 0.0 ? std::array<double, 2>{hx / hn, hy / hn} : std::array<double, 2>{0.0, 0.0};
  }
  const double w = static_cast<double>(normals.width);
  const double hgt = static_cast<double>(normals.height);
  for (std::size_t v = 0; v < normals.height; ++v) {
    const double py = 2.0 * (static_cast<double>(v) + 0.5) / hgt - 1.0;
    for (std::size_t u = 0; u < normals.width; ++u) {
      const double px = 2.0 * (static_cast<double>(u) + 0.5) / w - 1.0;
      const Vec3& n = normals(u, v);
      for (int c = 0; c < 3; ++c) {
        const double position = std::clamp(px * toward[c][0] + py * toward[c][1], -1.0, 1.0);
        const double gain = rig.gains[c] * (1.0 + rig.falloff * position);
        double value = rig.ambient[c] + gain * std::max(0.0, dot(n, rig.directions[c]));
        if (rig.noise_sigma > 0.0) value += rig.noise_sigma * rng.normal();
        img.at(u, v, static_cast<std::size_t>(c)) = static_cast<float>(std::clamp(value, 0.0, 1.0));
      }
    }
  }
  return img;
}

RasterImage render(const HeightMap& h, const LightingRig& rig, std::uint64_t seed) {
  return shade(normals_from_height(h), rig, seed);
}

PressGeometry make_height_sphere_press(double r, double depth, double center_u, double center_v,
                                       std::size_t width, std::size_t height, double pixel_pitch) {
  require(r > 0.0 && depth >= 0.0, ErrorKind::InvalidArgument, "sphere radius must be > 0 and depth >= 0");
  require(depth < r, ErrorKind::InvalidArgument, "press depth must be smaller than the sphere radius");
  require(pixel_pitch > 0.0, ErrorKind::InvalidArgument, "pixel pitch must be > 0");
  const double h = r - depth;
  const double r_star = std::sqrt(r * r - h * h);
  ScalarField z(width, height, 0.0);
  for (std::size_t v = 0; v < height; ++v) {
    for (std::size_t u = 0; u < width; ++u) {
      const double du = (static_cast<double>(u) - center_u) * pixel_pitch;
      const double dv = (static_cast<double>(v) - center_v) * pixel_pitch;
      const double rho2 = du * du + dv * dv;
      if (rho2 < r_star * r_star) z(u, v) = h - std::sqrt(r * r - rho2);
    }
  }
  return {HeightMap(std::move(z), pixel_pitch), r_star};
}

HeightMap make_height_rough(double grit_scale, double amplitude, std::size_t width, std::size_t height,
                            double pixel_pitch, std::uint64_t seed) {
  require(grit_scale > 0.0, ErrorKind::InvalidArgument, "grit scale must be > 0");
  require(amplitude >= 0.0, ErrorKind::InvalidArgument, "amplitude must be >= 0");
  require(width > 0 && height > 0 && pixel_pitch > 0.0, ErrorKind::InvalidArgument, "bad surface geometry");
  if (amplitude == 0.0) return HeightMap(ScalarField(width, height, 0.0), pixel_pitch);

  Rng rng(seed);
  ScalarField noise(width, height);
  for (auto& x : noise.values()) x = rng.normal();

  auto spectrum = detail::fft2(noise);
  for (std::size_t n = 0; n < height; ++n) {
    const double fy = static_cast<double>(detail::signed_index(n, height)) / (static_cast<double>(height) * pixel_pitch);
    for (std::size_t m = 0; m < width; ++m) {
      const double fx = static_cast<double>(detail::signed_index(m, width)) / (static_cast<double>(width) * pixel_pitch);
      const double f2 = (fx * fx + fy * fy) * grit_scale * grit_scale;
      spectrum(m, n) *= std::exp(-0.5 * f2);
    }
  }
  spectrum(0, 0) = 0.0;
  ScalarField z = detail::ifft2_real(spectrum);

  double mean = 0.0;
  for (double x : z.values()) mean += x;
  mean /= static_cast<double>(z.size());
  double ss = 0.0;
  for (double& x : z.values()) {
    x -= mean;
    ss += x * x;
  }
  const double rms = std::sqrt(ss / static_cast<double>(z.size()));
  if (rms > 0.0) {
    for (double& x : z.values()) x *= amplitude / rms;
  }
  return HeightMap(std::move(z), pixel_pitch);
}

void write_sidecar(const std::filesystem::path& path, const KeyValueConfig& values) {
  std::ofstream out(path);
  require(out.good(), ErrorKind::IoFailure, "cannot write " + path.string());
  out << values.to_text();
}

}  // namespace vtpalm::tactile
