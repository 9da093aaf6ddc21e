#include "proximity/separable_lm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace vtpalm::proximity::detail {

namespace {

struct Evaluation {
  Eigen::VectorXd residual;  // f(x) - y
  Eigen::MatrixXd jacobian;
  double sse = 0.0;
};

bool evaluate(const SeparableModel& model, std::span<const double> xs, std::span<const double> ys,
              const Eigen::VectorXd& params, bool with_jacobian, Evaluation& out) {
  const std::size_t n = xs.size();
  const std::size_t nl = model.linear_count;
  const std::size_t nk = model.nonlinear_count;
  std::vector<double> phi(nl), dphi(nl * nk);
  std::span<const double> theta(params.data() + nl, nk);

  out.residual.resize(static_cast<Eigen::Index>(n));
  if (with_jacobian) out.jacobian.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nl + nk));
  for (std::size_t i = 0; i < n; ++i) {
    if (!model.basis(xs[i], theta, phi, dphi)) return false;
    double f = 0.0;
    for (std::size_t j = 0; j < nl; ++j) f += params[static_cast<Eigen::Index>(j)] * phi[j];
    if (!std::isfinite(f)) return false;
    out.residual[static_cast<Eigen::Index>(i)] = f - ys[i];
    if (with_jacobian) {
      for (std::size_t j = 0; j < nl; ++j) out.jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phi[j];
      for (std::size_t k = 0; k < nk; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < nl; ++j) s += params[static_cast<Eigen::Index>(j)] * dphi[j * nk + k];
        out.jacobian(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(nl + k)) = s;
      }
    }
  }
  out.sse = out.residual.squaredNorm();
  return std::isfinite(out.sse);
}

}  // namespace

bool solve_linear(const SeparableModel& model, std::span<const double> xs, std::span<const double> ys,
                  std::span<const double> theta, std::vector<double>& alpha, double& sse) {
  const std::size_t n = xs.size();
  const std::size_t nl = model.linear_count;
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(nl));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  std::vector<double> phi(nl), dphi(nl * model.nonlinear_count);
  for (std::size_t i = 0; i < n; ++i) {
    if (!model.basis(xs[i], theta, phi, dphi)) return false;
    for (std::size_t j = 0; j < nl; ++j) basis(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phi[j];
    y[static_cast<Eigen::Index>(i)] = ys[i];
  }
  const Eigen::VectorXd a = basis.completeOrthogonalDecomposition().solve(y);
  if (!a.allFinite()) return false;
  alpha.assign(a.data(), a.data() + a.size());
  sse = (basis * a - y).squaredNorm();
  return std::isfinite(sse);
}

LmResult fit_separable(const SeparableModel& model, std::span<const double> xs, std::span<const double> ys,
                       std::span<const double> theta0, const LmOptions& options) {
  LmResult result;
  std::vector<double> alpha;
  double sse0 = 0.0;
  if (!solve_linear(model, xs, ys, theta0, alpha, sse0)) return result;

  const std::size_t nl = model.linear_count;
  const std::size_t np = nl + model.nonlinear_count;
  Eigen::VectorXd params(static_cast<Eigen::Index>(np));
  for (std::size_t j = 0; j < nl; ++j) params[static_cast<Eigen::Index>(j)] = alpha[j];
  for (std::size_t k = 0; k < model.nonlinear_count; ++k) params[static_cast<Eigen::Index>(nl + k)] = theta0[k];

  Evaluation current;
  if (!evaluate(model, xs, ys, params, true, current)) return result;
  result.valid = true;

  double y_scale = 0.0;
  for (double y : ys) y_scale += y * y;
  const double sse_floor = 1e-30 * (y_scale + 1.0);

  double lambda = options.initial_lambda;
  std::size_t stalled = 0;
  Evaluation trial;
  std::size_t iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    if (current.sse <= sse_floor) {
      result.converged = true;
      break;
    }
    const Eigen::MatrixXd& J = current.jacobian;
    Eigen::VectorXd scale = J.colwise().squaredNorm().transpose();
    const double max_scale = std::max(scale.maxCoeff(), 1e-300);
    for (Eigen::Index j = 0; j < scale.size(); ++j) scale[j] = std::max(scale[j], 1e-30 * max_scale);

    bool accepted = false;
    while (!accepted) {
      // Damped step from the augmented least-squares system [J; sqrt(lambda*D)] delta = [-r; 0].
      Eigen::MatrixXd aug(J.rows() + J.cols(), J.cols());
      aug.topRows(J.rows()) = J;
      aug.bottomRows(J.cols()) = (lambda * scale).cwiseSqrt().asDiagonal();
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(aug.rows());
      rhs.head(J.rows()) = -current.residual;
      const Eigen::VectorXd delta = aug.colPivHouseholderQr().solve(rhs);

      const Eigen::VectorXd candidate = params + delta;
      if (delta.allFinite() && evaluate(model, xs, ys, candidate, true, trial) && trial.sse < current.sse) {
        const double decrease = (current.sse - trial.sse) / current.sse;
        const double step = (delta.array().abs() / (candidate.array().abs() + 1e-12)).maxCoeff();
        params = candidate;
        std::swap(current, trial);
        lambda = std::max(lambda / 3.0, 1e-15);
        accepted = true;
        stalled = (decrease < 1e-14 && step < 1e-10) ? stalled + 1 : 0;
      } else {
        lambda *= 4.0;
        if (lambda > 1e16) break;
      }
    }
    if (!accepted || stalled >= 3) {
      // No descent direction left at machine precision: a stationary point.
      result.converged = true;
      ++iter;
      break;
    }
  }
  if (current.sse <= sse_floor) result.converged = true;

  result.alpha.assign(params.data(), params.data() + nl);
  result.theta.assign(params.data() + nl, params.data() + np);
  result.sse = current.sse;
  result.iterations = iter;
  return result;
}

}  // namespace vtpalm::proximity::detail
