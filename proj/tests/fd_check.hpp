#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "vtpalm/mapper.hpp"

namespace testing {

// Sign pattern of every ReLU pre-activation and every L1 residual over a batch.
// The loss is piecewise linear; a central difference only measures the derivative
// when both probes sit in the same piece as the base point.
inline std::vector<bool> kink_pattern(const vtpalm::mapper::MlpWeights& w,
                                      std::span<const vtpalm::tactile::GradientSample> batch) {
  std::vector<bool> pattern;
  std::vector<double> a, next;
  for (const auto& s : batch) {
    a = {s.i_r, s.i_g, s.i_b, s.u, s.v};
    for (std::size_t l = 0; l < w.layers.size(); ++l) {
      const auto& layer = w.layers[l];
      next.assign(layer.out, 0.0);
      for (std::size_t o = 0; o < layer.out; ++o) {
        double z = layer.bias[o];
        for (std::size_t i = 0; i < layer.in; ++i) z += layer.weight[o * layer.in + i] * a[i];
        const bool hidden = l + 1 < w.layers.size();
        pattern.push_back(hidden ? z > 0.0 : z > (o == 0 ? s.g_u : s.g_v));
        next[o] = hidden ? std::max(0.0, z) : z;
      }
      a.swap(next);
    }
  }
  return pattern;
}

struct FdReport {
  double rel_error = 0.0;  // ||fd - analytic|| / ||analytic|| over the scored parameters
  std::size_t scored = 0;
  std::size_t straddling = 0;  // probes crossing a kink, not scored
};

// Central differences over every weight and bias. With skip_kinks false all
// parameters are scored regardless of kinks.
inline FdReport finite_difference_check(const vtpalm::mapper::MlpWeights& w,
                                        std::span<const vtpalm::tactile::GradientSample> batch, double h,
                                        bool skip_kinks) {
  using namespace vtpalm::mapper;
  const auto lg = loss_and_gradient(w, batch);
  const auto base = kink_pattern(w, batch);
  FdReport r;
  double diff2 = 0, ref2 = 0;
  for (std::size_t l = 0; l < w.layers.size(); ++l) {
    for (int which = 0; which < 2; ++which) {
      const std::size_t n = which == 0 ? w.layers[l].weight.size() : w.layers[l].bias.size();
      for (std::size_t k = 0; k < n; ++k) {
        MlpWeights p = w, m = w;
        (which == 0 ? p.layers[l].weight : p.layers[l].bias)[k] += h;
        (which == 0 ? m.layers[l].weight : m.layers[l].bias)[k] -= h;
        if (skip_kinks && (kink_pattern(p, batch) != base || kink_pattern(m, batch) != base)) {
          ++r.straddling;
          continue;
        }
        const double fd = (loss_and_gradient(p, batch).loss - loss_and_gradient(m, batch).loss) / (2 * h);
        const double an = (which == 0 ? lg.grads[l].weight : lg.grads[l].bias)[k];
        diff2 += (fd - an) * (fd - an);
        ref2 += an * an;
        ++r.scored;
      }
    }
  }
  r.rel_error = std::sqrt(diff2 / ref2);
  return r;
}

}  // namespace testing
