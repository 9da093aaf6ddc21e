#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vtpalm/mapper.hpp"
#include "vtpalm/random.hpp"

namespace vtpalm::mapper::detail {

using Matrix = Eigen::MatrixXd;
using RowMajorMap = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
using ConstRowMajorMap = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

inline ConstRowMajorMap weight_of(const Layer& l) {
  return ConstRowMajorMap(l.weight.data(), static_cast<Eigen::Index>(l.out), static_cast<Eigen::Index>(l.in));
}

/// Inputs as columns (kInputs x n) and targets (kOutputs x n).
void pack_batch(std::span<const tactile::GradientSample> samples, std::span<const std::size_t> index, Matrix& x,
                Matrix& t);

struct Activations {
  std::vector<Matrix> pre;    // Z per layer
  std::vector<Matrix> post;   // input, then A per hidden layer
  Matrix dropout;             // scaled keep mask on the last hidden layer, empty when off
};

/// Forward pass; applies dropout on the last hidden layer when `rng` is given and p > 0.
const Matrix& forward(const MlpWeights& w, const Matrix& x, Activations& act, double dropout_p, Rng* rng);

/// Mean L1 over all outputs; fills `grads` (same layout as the weights).
double backward(const MlpWeights& w, const Activations& act, const Matrix& target, std::vector<Layer>& grads);

}  // namespace vtpalm::mapper::detail
