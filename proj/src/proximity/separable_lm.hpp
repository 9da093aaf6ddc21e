#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace vtpalm::proximity::detail {

// A model y = sum_j alpha_j * phi_j(x; theta) that is linear in alpha and
// nonlinear in theta.
struct SeparableModel {
  std::size_t linear_count = 0;
  std::size_t nonlinear_count = 0;
  // Fills phi[j] and dphi[j * nonlinear_count + k] = d phi_j / d theta_k.
  // Returns false when theta is outside the admissible region for x.
  std::function<bool(double x, std::span<const double> theta, std::span<double> phi, std::span<double> dphi)>
      basis;
};

struct LmOptions {
  std::size_t max_iterations = 2000;
  double initial_lambda = 1e-3;
};

struct LmResult {
  std::vector<double> alpha;
  std::vector<double> theta;
  double sse = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  bool valid = false;
};

// Linear least squares for alpha at fixed theta. Returns false when the basis
// cannot be evaluated.
bool solve_linear(const SeparableModel& model, std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> theta, std::vector<double>& alpha, double& sse);

// Levenberg-Marquardt over (alpha, theta) with the analytic Jacobian and
// Marquardt diagonal scaling, starting from theta0 and the matching linear
// least-squares alpha.
LmResult fit_separable(const SeparableModel& model, std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> theta0, const LmOptions& options);

}  // namespace vtpalm::proximity::detail
