#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vtpalm/image.hpp"
#include "vtpalm/keyvalue.hpp"

namespace vtpalm::tactile {

// ---------------------------------------------------------------------------
// Synthetic rendering
// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;

/// Three coloured point-like lights, one per RGB channel, shading the elastomer
/// with I_c = clamp(ambient_c + gain_c(u,v) * max(0, n . l_c) + noise).
/// gain_c varies linearly by up to +-falloff across the field, brighter on the
/// side the light sits on.
struct LightingRig {
  std::array<Vec3, 3> directions{};
  std::array<double, 3> gains{0.6, 0.6, 0.6};
  std::array<double, 3> ambient{0.2, 0.2, 0.2};
  double falloff = 0.1;
  double noise_sigma = 0.0;

  /// Azimuths 0/120/240 degrees at the given elevation.
  static LightingRig standard(double elevation_deg = 45.0, double gain = 0.6, double ambient = 0.2,
                              double noise_sigma = 0.0, double falloff = 0.1);
  static LightingRig from_config(const KeyValueConfig& cfg);
  void validate() const;
  KeyValueConfig to_config() const;
};

struct NormalField {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<Vec3> normals;

  const Vec3& operator()(std::size_t u, std::size_t v) const { return normals[v * width + u]; }
};

/// N = (df/du, df/dv, -1), normalised; central differences inside, one-sided at borders.
NormalField normals_from_height(const HeightMap& h);

RasterImage shade(const NormalField& normals, const LightingRig& rig, std::uint64_t seed);

RasterImage render(const HeightMap& h, const LightingRig& rig, std::uint64_t seed);

struct PressGeometry {
  HeightMap height;
  double r_star = 0.0;  // mm
};

/// Spherical cap of radius r pressed `depth` mm into a flat surface:
/// z = h - sqrt(r^2 - rho^2) inside the contact circle and 0 outside, so the
/// apex sits at z = -depth. Centre is in pixels.
PressGeometry make_height_sphere_press(double r, double depth, double center_u, double center_v,
                                       std::size_t width, std::size_t height, double pixel_pitch);

/// Band-limited random surface: white noise shaped by exp(-(f*grit)^2/2) in the
/// frequency domain, mean removed, scaled to RMS `amplitude` mm.
HeightMap make_height_rough(double grit_scale, double amplitude, std::size_t width, std::size_t height,
                            double pixel_pitch, std::uint64_t seed);

void write_sidecar(const std::filesystem::path& path, const KeyValueConfig& values);

// ---------------------------------------------------------------------------
// Calibration from sphere presses
// ---------------------------------------------------------------------------

/// Distance from the sphere centre to the sensing plane: sqrt(r^2 - r*^2).
double sphere_height(double r, double r_star);

/// Analytic slope of the cap at (u, v) mm from the contact centre:
/// (u, v) / sqrt(r^2 - u^2 - v^2). Points at or beyond the sphere rim are rejected.
std::pair<double, double> sphere_gradient(double u, double v, double r);

/// As above, restricted to u^2 + v^2 <= domain_radius^2.
std::pair<double, double> sphere_gradient(double u, double v, double r, double domain_radius);

struct ContactCircle {
  double center_u = 0.0;  // px
  double center_v = 0.0;  // px
  double radius = 0.0;    // px
  std::size_t support = 0;
  double rms_residual = 0.0;  // px
};

struct CircleDetectOptions {
  double threshold = 0.08;
  std::size_t min_support = 30;
  double max_rms_residual = 1.5;  // px, boundary scatter around the fitted circle
};

/// Thresholds |image - reference|, cleans the support (3x3 majority filter,
/// largest component, holes filled) and fits a circle to the region boundary
/// by algebraic (Kasa) least squares.
ContactCircle detect_contact_circle(const RasterImage& image, const RasterImage& reference,
                                    const CircleDetectOptions& options = {});

/// Indentation depth of a reconstructed sphere press: mean height on a thin ring
/// just outside clamp * radius minus the deepest point inside it, plus the ideal
/// cap's own depth at the ring radius (the ring is not at the undeformed level).
double estimate_press_depth(const HeightMap& h, const ContactCircle& c, double clamp_fraction, double r);

struct SpherePress {
  RasterImage image;
  RasterImage reference;
  double center_u = 0.0;  // px
  double center_v = 0.0;  // px
  double r_star = 0.0;    // mm
  double r = 2.5;         // mm, sphere radius
  double pixel_pitch = 0.04;  // mm / px

  void validate() const;
};

struct GradientSample {
  float i_r = 0, i_g = 0, i_b = 0;
  float u = 0, v = 0;  // normalised image coordinates
  float g_u = 0, g_v = 0;
};

inline float normalized_coordinate(std::size_t index, std::size_t extent) {
  return extent > 1 ? static_cast<float>(index) / static_cast<float>(extent - 1) : 0.0f;
}

/// One sample per pixel within clamp_fraction * r* of the contact centre, in
/// (press, row, column) order. Invalid presses are skipped and described in
/// `skipped` when given.
std::vector<GradientSample> build_dataset(std::span<const SpherePress> presses, double clamp_fraction = 0.95,
                                          std::vector<std::string>* skipped = nullptr);

/// Pixels of a w x h image within `radius` px of (cu, cv).
SegMask disc_mask(std::size_t width, std::size_t height, double cu, double cv, double radius);

void write_dataset_csv(const std::filesystem::path& path, std::span<const GradientSample> samples);
std::vector<GradientSample> read_dataset_csv(const std::filesystem::path& path);
void write_dataset_vtp1(const std::filesystem::path& path, std::span<const GradientSample> samples);
std::vector<GradientSample> read_dataset_vtp1(const std::filesystem::path& path);

/// Manifest rows: image,reference[,center_u,center_v,r_star_px]
struct PressManifestEntry {
  std::filesystem::path image;
  std::filesystem::path reference;
  std::optional<ContactCircle> known;
};

std::vector<PressManifestEntry> read_press_manifest(const std::filesystem::path& path);
void write_press_manifest(const std::filesystem::path& path, std::span<const PressManifestEntry> entries);

}  // namespace vtpalm::tactile
