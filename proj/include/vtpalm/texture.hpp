#pragma once

#include <string>
#include <vector>

#include "vtpalm/image.hpp"

namespace vtpalm::texture {

struct SpectrumReport {
  ScalarField log_amplitude;  // log(1 + |F|), zero frequency at (W/2, H/2)
  double high_freq_ratio = 0.0;
  double cutoff_radius = 0.25;  // fraction of Nyquist
};

/// High-frequency share is |F|^2 outside cutoff_radius * Nyquist (radial, per-axis
/// normalised) over all non-DC energy; 0 when there is no non-DC energy.
SpectrumReport amplitude_spectrum(const ScalarField& gray, double cutoff_radius = 0.25);
SpectrumReport amplitude_spectrum(const RasterImage& gray, double cutoff_radius = 0.25);

/// Gray values are binned over the fixed range [0, 1] (clamped) into `levels` bins.
double glcm_contrast(const ScalarField& gray, int levels = 32, int du = 1, int dv = 0);
double glcm_contrast(const RasterImage& gray, int levels = 32, int du = 1, int dv = 0);

struct HaarLevel {
  ScalarField lh, hl, hh;
  double energy() const;
};

struct HaarDecomposition {
  std::vector<HaarLevel> details;  // finest first
  ScalarField approximation;
};

/// Orthonormal 2-D Haar transform. The input is cropped to a multiple of
/// 2^levels in each direction first.
HaarDecomposition haar_decompose(const ScalarField& img, int levels = 3);

/// Per-level detail energy (LH + HL + HH sums of squares), finest first.
std::vector<double> wavelet_energy(const ScalarField& img, int levels = 3);

struct TextureFeatures {
  std::vector<double> wavelet_energies;
  double glcm_contrast = 0.0;

  /// wavelet_L1..wavelet_Ln, glcm_contrast
  std::vector<double> flatten() const;
  static std::vector<std::string> names(int levels);
};

struct DiscriminateConfig {
  int wavelet_levels = 3;
  int glcm_levels = 32;
  int glcm_du = 1;
  int glcm_dv = 0;
  int tiles = 4;  // tiles x tiles sub-windows per input
};

TextureFeatures compute_features(const ScalarField& gray, const DiscriminateConfig& cfg = {});

struct FeatureMargin {
  std::string name;
  double value_a = 0.0;
  double value_b = 0.0;
  double abs_difference = 0.0;
  double margin = 0.0;  // |mean_a - mean_b| / pooled tile std
};

struct DiscriminationReport {
  TextureFeatures a;
  TextureFeatures b;
  std::vector<FeatureMargin> features;
  double best_margin = 0.0;
  std::string best_feature;
};

/// Grayscale inputs in [0, 1] are compared as-is.
DiscriminationReport discriminate(const ScalarField& a, const ScalarField& b, const DiscriminateConfig& cfg = {});
DiscriminationReport discriminate(const RasterImage& a, const RasterImage& b, const DiscriminateConfig& cfg = {});
/// Height maps are first mapped to [0, 1] by one shared min-max.
DiscriminationReport discriminate(const HeightMap& a, const HeightMap& b, const DiscriminateConfig& cfg = {});

/// Surface statistics emulating abrasive paper of the given mesh count:
/// correlation length 15/mesh mm and RMS height 0.1 of that.
struct MeshEmulation {
  double grit_scale = 0.0;  // mm
  double amplitude = 0.0;   // mm
};
MeshEmulation emulate_mesh(double mesh);

}  // namespace vtpalm::texture
