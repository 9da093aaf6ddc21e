#include <algorithm>
#include <cmath>
#include <limits>

#include "vtpalm/image_ops.hpp"
#include "vtpalm/texture.hpp"

namespace vtpalm::texture {

namespace {

ScalarField crop(const ScalarField& f, std::size_t u0, std::size_t v0, std::size_t w, std::size_t h) {
  ScalarField out(w, h);
  for (std::size_t v = 0; v < h; ++v) {
    for (std::size_t u = 0; u < w; ++u) out(u, v) = f(u0 + u, v0 + v);
  }
  return out;
}

std::vector<std::vector<double>> tile_features(const ScalarField& f, const DiscriminateConfig& cfg) {
  const auto t = static_cast<std::size_t>(cfg.tiles);
  const std::size_t tw = f.width() / t, th = f.height() / t;
  std::vector<std::vector<double>> out;
  for (std::size_t j = 0; j < t; ++j) {
    for (std::size_t i = 0; i < t; ++i) out.push_back(compute_features(crop(f, i * tw, j * th, tw, th), cfg).flatten());
  }
  return out;
}

void mean_var(const std::vector<std::vector<double>>& rows, std::size_t k, double& mean, double& var) {
  mean = 0.0;
  for (const auto& r : rows) mean += r[k];
  mean /= static_cast<double>(rows.size());
  var = 0.0;
  for (const auto& r : rows) var += (r[k] - mean) * (r[k] - mean);
  var /= static_cast<double>(rows.size() - 1);
}

}  // namespace

std::vector<double> TextureFeatures::flatten() const {
  std::vector<double> v = wavelet_energies;
  v.push_back(glcm_contrast);
  return v;
}

std::vector<std::string> TextureFeatures::names(int levels) {
  std::vector<std::string> n;
  for (int l = 1; l <= levels; ++l) n.push_back("wavelet_L" + std::to_string(l));
  n.emplace_back("glcm_contrast");
  return n;
}

TextureFeatures compute_features(const ScalarField& gray, const DiscriminateConfig& cfg) {
  return {wavelet_energy(gray, cfg.wavelet_levels), glcm_contrast(gray, cfg.glcm_levels, cfg.glcm_du, cfg.glcm_dv)};
}

DiscriminationReport discriminate(const ScalarField& a, const ScalarField& b, const DiscriminateConfig& cfg) {
  require(cfg.tiles >= 2, ErrorKind::InvalidArgument, "at least 2x2 tiles are needed for a spread estimate");
  require(a.same_shape(b), ErrorKind::DimensionMismatch, "texture inputs differ in shape");

  DiscriminationReport report;
  report.a = compute_features(a, cfg);
  report.b = compute_features(b, cfg);
  const auto ta = tile_features(a, cfg);
  const auto tb = tile_features(b, cfg);

  const auto names = TextureFeatures::names(cfg.wavelet_levels);
  const auto fa = report.a.flatten(), fb = report.b.flatten();
  bool any_spread = false;
  for (std::size_t k = 0; k < names.size(); ++k) {
    double ma, va, mb, vb;
    mean_var(ta, k, ma, va);
    mean_var(tb, k, mb, vb);
    const double pooled = std::sqrt(0.5 * (va + vb));
    const double diff = std::fabs(ma - mb);
    FeatureMargin m{names[k], fa[k], fb[k], std::fabs(fa[k] - fb[k]), 0.0};
    if (pooled > 0.0) {
      any_spread = true;
      m.margin = diff / pooled;
    } else if (diff > 0.0) {
      m.margin = std::numeric_limits<double>::infinity();
    }
    report.features.push_back(m);
  }
  require(any_spread, ErrorKind::Degenerate, "every texture feature has zero spread across tiles");
  for (const auto& m : report.features) {
    if (report.best_feature.empty() || m.margin > report.best_margin) {
      report.best_margin = m.margin;
      report.best_feature = m.name;
    }
  }
  return report;
}

DiscriminationReport discriminate(const RasterImage& a, const RasterImage& b, const DiscriminateConfig& cfg) {
  return discriminate(to_field(to_grayscale(a)), to_field(to_grayscale(b)), cfg);
}

DiscriminationReport discriminate(const HeightMap& a, const HeightMap& b, const DiscriminateConfig& cfg) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const HeightMap* m : {&a, &b}) {
    for (double z : m->z.values()) {
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
  }
  const double span = hi > lo ? hi - lo : 1.0;
  auto normalise = [&](const HeightMap& m) {
    ScalarField f = m.z;
    for (double& z : f.values()) z = (z - lo) / span;
    return f;
  };
  return discriminate(normalise(a), normalise(b), cfg);
}

}  // namespace vtpalm::texture
