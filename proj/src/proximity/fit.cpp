#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>

#include "proximity/separable_lm.hpp"
#include "vtpalm/proximity.hpp"

namespace vtpalm::proximity {

namespace {

using detail::SeparableModel;

struct FitData {
  std::vector<double> xs;
  std::vector<double> ys;
  double x0 = 0.0;  // centring offset for the exponential bases
};

FitData select(std::span<const CalibrationSample> samples, const FitConfig& cfg) {
  FitData data;
  for (const auto& s : samples) {
    require(std::isfinite(s.z_img) && std::isfinite(s.z_world), ErrorKind::InvalidArgument,
            "calibration sample has non-finite values");
    if (s.z_world < cfg.min_z_world) continue;
    data.xs.push_back(s.z_img);
    data.ys.push_back(s.z_world);
  }
  if (!data.xs.empty()) data.x0 = *std::min_element(data.xs.begin(), data.xs.end());
  return data;
}

std::size_t distinct_count(const std::vector<double>& xs) { return std::set<double>(xs.begin(), xs.end()).size(); }

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = n > 1 ? static_cast<double>(k) / static_cast<double>(n - 1) : 0.0;
    g[k] = lo * std::pow(hi / lo, t);
  }
  return g;
}

SeparableModel double_exp_basis(double x0) {
  SeparableModel m;
  m.linear_count = 2;
  m.nonlinear_count = 2;
  m.basis = [x0](double x, std::span<const double> theta, std::span<double> phi, std::span<double> dphi) {
    const double b = std::exp(theta[0]);
    const double d = std::exp(theta[1]);
    phi[0] = std::exp(-b * (x - x0));
    phi[1] = std::exp(-d * (x - x0));
    dphi[0] = -b * (x - x0) * phi[0];
    dphi[1] = 0.0;
    dphi[2] = 0.0;
    dphi[3] = -d * (x - x0) * phi[1];
    return std::isfinite(phi[0]) && std::isfinite(phi[1]);
  };
  return m;
}

SeparableModel single_exp_basis(double x0) {
  SeparableModel m;
  m.linear_count = 2;
  m.nonlinear_count = 1;
  m.basis = [x0](double x, std::span<const double> theta, std::span<double> phi, std::span<double> dphi) {
    const double b = std::exp(theta[0]);
    phi[0] = std::exp(-b * (x - x0));
    phi[1] = 1.0;
    dphi[0] = -b * (x - x0) * phi[0];
    dphi[1] = 0.0;
    return std::isfinite(phi[0]);
  };
  return m;
}

SeparableModel inverse_basis() {
  SeparableModel m;
  m.linear_count = 2;
  m.nonlinear_count = 1;
  m.basis = [](double x, std::span<const double> theta, std::span<double> phi, std::span<double> dphi) {
    const double s = x + theta[0];
    if (!(s > 0.0)) return false;
    phi[0] = 1.0 / s;
    phi[1] = 1.0;
    dphi[0] = -1.0 / (s * s);
    dphi[1] = 0.0;
    return std::isfinite(phi[0]);
  };
  return m;
}

SeparableModel power_basis(double x0) {
  SeparableModel m;
  m.linear_count = 2;
  m.nonlinear_count = 1;
  m.basis = [x0](double x, std::span<const double> theta, std::span<double> phi, std::span<double> dphi) {
    if (!(x > 0.0)) return false;
    const double b = std::exp(theta[0]);
    const double lr = std::log(x / x0);
    phi[0] = std::exp(-b * lr);
    phi[1] = 1.0;
    dphi[0] = -b * lr * phi[0];
    dphi[1] = 0.0;
    return std::isfinite(phi[0]);
  };
  return m;
}

// Runs every start and keeps the lowest SSE (ties go to the earlier start).
detail::LmResult multi_start(const SeparableModel& model, const FitData& data,
                             const std::vector<std::vector<double>>& starts, const FitConfig& cfg) {
  detail::LmResult best;
  best.sse = std::numeric_limits<double>::infinity();
  detail::LmOptions opts;
  opts.max_iterations = cfg.max_iterations;
  for (const auto& theta0 : starts) {
    auto r = detail::fit_separable(model, data.xs, data.ys, theta0, opts);
    if (r.valid && r.sse < best.sse) best = std::move(r);
  }
  return best;
}

FitStatistics statistics_for(ModelFamily family, std::span<const double> params, const FitData& data,
                             const detail::LmResult& lm) {
  std::vector<double> predictions(data.xs.size());
  for (std::size_t i = 0; i < data.xs.size(); ++i) predictions[i] = evaluate_family(family, params, data.xs[i]);
  FitStatistics stats = compute_statistics(data.ys, predictions);
  stats.iterations = lm.iterations;
  stats.converged = lm.converged;
  return stats;
}

std::vector<double> natural_params(ModelFamily family, const detail::LmResult& r, double x0) {
  switch (family) {
    case ModelFamily::DoubleExponential: {
      double b = std::max(std::exp(r.theta[0]), std::numeric_limits<double>::min());
      double d = std::max(std::exp(r.theta[1]), std::numeric_limits<double>::min());
      double a = r.alpha[0] * std::exp(b * x0);
      double c = r.alpha[1] * std::exp(d * x0);
      if (b > d) {
        std::swap(a, c);
        std::swap(b, d);
      }
      return {a, b, c, d};
    }
    case ModelFamily::SingleExponential: {
      const double b = std::max(std::exp(r.theta[0]), std::numeric_limits<double>::min());
      return {r.alpha[0] * std::exp(b * x0), b, r.alpha[1]};
    }
    case ModelFamily::InverseProportional:
      return {r.alpha[0], r.theta[0], r.alpha[1]};
    case ModelFamily::PowerLaw: {
      const double b = std::exp(r.theta[0]);
      return {r.alpha[0] * std::pow(x0, b), b, r.alpha[1]};
    }
  }
  return {};
}

FamilyReport fit_family(ModelFamily family, const FitData& data, const FitConfig& cfg) {
  FamilyReport report{family, {}, {}, {}};
  const std::size_t param_count = 3;
  if (distinct_count(data.xs) < param_count + 1) {
    report.failure = "needs at least " + std::to_string(param_count + 1) + " distinct z_img values";
    return report;
  }
  const auto grid = log_grid(cfg.start_min, cfg.start_max, cfg.starts);
  std::vector<std::vector<double>> starts;
  SeparableModel model;
  switch (family) {
    case ModelFamily::SingleExponential:
      model = single_exp_basis(data.x0);
      for (double b : grid) starts.push_back({std::log(b)});
      break;
    case ModelFamily::PowerLaw:
      if (data.x0 <= 0.0) {
        report.failure = "power law requires z_img > 0";
        return report;
      }
      model = power_basis(data.x0);
      for (double b : grid) starts.push_back({std::log(b)});
      break;
    case ModelFamily::InverseProportional: {
      model = inverse_basis();
      const double span = std::max(1e-6, *std::max_element(data.xs.begin(), data.xs.end()) - data.x0);
      const double xmin = data.x0;
      for (double shift : {-0.9 * xmin, -0.5 * xmin, 0.0, 0.1 * span, 0.5 * span, span, 3.0 * span, 10.0 * span}) {
        if (xmin + shift > 0.0) starts.push_back({shift});
      }
      break;
    }
    case ModelFamily::DoubleExponential:
      report.failure = "use fit_double_exp";
      return report;
  }
  const auto best = multi_start(model, data, starts, cfg);
  if (!best.valid) {
    report.failure = "no start produced a finite fit";
    return report;
  }
  report.params = natural_params(family, best, data.x0);
  report.stats = statistics_for(family, report.params, data, best);
  if (!report.stats.converged) report.failure = "did not converge within max_iterations";
  return report;
}

}  // namespace

std::string_view family_name(ModelFamily family) {
  switch (family) {
    case ModelFamily::DoubleExponential: return "double_exponential";
    case ModelFamily::SingleExponential: return "single_exponential";
    case ModelFamily::InverseProportional: return "inverse_proportional";
    case ModelFamily::PowerLaw: return "power_law";
  }
  return "unknown";
}

double evaluate_family(ModelFamily family, std::span<const double> p, double x) {
  switch (family) {
    case ModelFamily::DoubleExponential: return p[0] * std::exp(-p[1] * x) + p[2] * std::exp(-p[3] * x);
    case ModelFamily::SingleExponential: return p[0] * std::exp(-p[1] * x) + p[2];
    case ModelFamily::InverseProportional: return p[0] / (x + p[1]) + p[2];
    case ModelFamily::PowerLaw: return p[0] * std::pow(x, -p[1]) + p[2];
  }
  return std::numeric_limits<double>::quiet_NaN();
}

FitStatistics compute_statistics(std::span<const double> ys, std::span<const double> predictions) {
  FitStatistics s;
  const std::size_t n = ys.size();
  if (n == 0) return s;
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(n);
  double ss_tot = 0.0;
  s.residuals.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.residuals[i] = ys[i] - predictions[i];
    s.sse += s.residuals[i] * s.residuals[i];
    ss_tot += (ys[i] - mean) * (ys[i] - mean);
  }
  s.rmse = std::sqrt(s.sse / static_cast<double>(n));
  if (ss_tot > 0.0) {
    s.r_squared = 1.0 - s.sse / ss_tot;
  } else {
    // Constant targets: a perfect fit explains everything, anything else nothing.
    s.r_squared = s.sse <= 1e-24 * (1.0 + mean * mean) * static_cast<double>(n) ? 1.0 : 0.0;
  }
  return s;
}

FitReport fit_double_exp(std::span<const CalibrationSample> samples, const FitConfig& cfg) {
  const FitData data = select(samples, cfg);
  require(data.xs.size() >= 4, ErrorKind::InsufficientSamples,
          "double-exponential fit needs at least 4 samples in range, got " + std::to_string(data.xs.size()));
  const std::size_t distinct = distinct_count(data.xs);
  require(distinct >= cfg.min_distinct_z_img, ErrorKind::InsufficientSamples,
          "double-exponential fit needs " + std::to_string(cfg.min_distinct_z_img) + " distinct z_img values, got " +
              std::to_string(distinct));

  // Pairs (g_k, g_{k+3 mod n}) from a log-spaced grid keep b and d distinct.
  const auto grid = log_grid(cfg.start_min, cfg.start_max, cfg.starts);
  std::vector<std::vector<double>> starts;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    starts.push_back({std::log(grid[k]), std::log(grid[(k + 3) % grid.size()])});
  }
  const auto best = multi_start(double_exp_basis(data.x0), data, starts, cfg);
  require(best.valid, ErrorKind::BadFit, "no start produced a finite double-exponential fit");

  const auto p = natural_params(ModelFamily::DoubleExponential, best, data.x0);
  FitReport report{DoubleExpModel(p[0], p[1], p[2], p[3]), {}};
  report.stats = statistics_for(ModelFamily::DoubleExponential, p, data, best);
  return report;
}

std::vector<FamilyReport> fit_alternative_models(std::span<const CalibrationSample> samples, const FitConfig& cfg) {
  const FitData data = select(samples, cfg);
  std::vector<FamilyReport> out;
  for (auto family : {ModelFamily::SingleExponential, ModelFamily::InverseProportional, ModelFamily::PowerLaw}) {
    try {
      out.push_back(fit_family(family, data, cfg));
    } catch (const std::exception& e) {
      out.push_back(FamilyReport{family, {}, {}, e.what()});
    }
  }
  return out;
}

std::vector<FamilyReport> rank_families(const FitReport& double_exp, std::vector<FamilyReport> alternatives) {
  const auto& m = double_exp.model;
  alternatives.push_back(FamilyReport{ModelFamily::DoubleExponential, {m.a(), m.b(), m.c(), m.d()}, double_exp.stats, {}});
  std::stable_sort(alternatives.begin(), alternatives.end(), [](const FamilyReport& l, const FamilyReport& r) {
    if (l.ok() != r.ok()) return l.ok();
    return l.stats.rmse < r.stats.rmse;
  });
  return alternatives;
}

}  // namespace vtpalm::proximity
