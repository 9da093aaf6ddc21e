#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vtpalm/image.hpp"

namespace vtpalm::proximity {

/// Maps mean relative depth z_img to metric distance in cm:
///   y = a*exp(-b*x) + c*exp(-d*x),  b > 0, d > 0.
class DoubleExpModel {
 public:
  DoubleExpModel(double a, double b, double c, double d);

  /// Reference coefficients of the physical sensor.
  static DoubleExpModel reference();

  double a() const noexcept { return a_; }
  double b() const noexcept { return b_; }
  double c() const noexcept { return c_; }
  double d() const noexcept { return d_; }

  double operator()(double z_img) const noexcept;
  double derivative(double z_img) const noexcept;

  bool operator==(const DoubleExpModel&) const = default;

 private:
  double a_, b_, c_, d_;
};

double predict_distance(const DoubleExpModel& model, double z_img);

/// Mean depth over the nonzero mask pixels. Throws EmptyMask when the mask is empty.
double mask_mean_depth(const DepthMap& depth, const SegMask& mask);

struct CalibrationSample {
  double z_img = 0.0;
  double z_world = 0.0;  // cm
  double speed = 0.0;    // cm/s, provenance only
  std::string run_id;
};

struct FitConfig {
  // Samples closer than this are excluded; set to 0 to fit everything.
  double min_z_world = 10.0;
  std::size_t max_iterations = 2000;
  std::size_t starts = 8;
  double start_min = 0.05;
  double start_max = 8.0;
  std::size_t min_distinct_z_img = 8;
};

struct FitStatistics {
  double r_squared = 0.0;
  double rmse = 0.0;
  double sse = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::vector<double> residuals;  // y_i - f(x_i), cm
};

struct FitReport {
  DoubleExpModel model;
  FitStatistics stats;
};

FitReport fit_double_exp(std::span<const CalibrationSample> samples, const FitConfig& cfg = {});

enum class ModelFamily { DoubleExponential, SingleExponential, InverseProportional, PowerLaw };

std::string_view family_name(ModelFamily family);

/// Parameters in the family's natural form:
///   DoubleExponential   (a, b, c, d)  a*exp(-b x) + c*exp(-d x)
///   SingleExponential   (a, b, c)     a*exp(-b x) + c
///   InverseProportional (a, b, c)     a/(x + b) + c
///   PowerLaw            (a, b, c)     a*x^(-b) + c
double evaluate_family(ModelFamily family, std::span<const double> params, double x);

struct FamilyReport {
  ModelFamily family;
  std::vector<double> params;
  FitStatistics stats;
  std::string failure;  // non-empty when this family could not be fitted

  bool ok() const noexcept { return failure.empty(); }
};

/// Fits the single-exponential, inverse-proportional and power-law families.
/// A failure in one family is recorded in its report and never aborts the others.
std::vector<FamilyReport> fit_alternative_models(std::span<const CalibrationSample> samples,
                                                 const FitConfig& cfg = {});

/// All four families, sorted by ascending RMSE (failed families last).
std::vector<FamilyReport> rank_families(const FitReport& double_exp, std::vector<FamilyReport> alternatives);

// Model files are key=value text with keys a, b, c, d.
void write_model(const std::filesystem::path& path, const DoubleExpModel& model);
DoubleExpModel read_model(const std::filesystem::path& path);

FitStatistics compute_statistics(std::span<const double> ys, std::span<const double> predictions);

struct TrackingFrame {
  DepthMap depth;
  SegMask mask;
  double truth_cm = 0.0;
};

struct FrameEstimate {
  std::size_t frame = 0;
  double z_img = 0.0;
  double truth_cm = 0.0;
  double predicted_cm = 0.0;
  double abs_error_cm = 0.0;
};

struct CheckpointResult {
  double target_cm = 0.0;
  FrameEstimate estimate;
};

struct TrackingReport {
  std::vector<FrameEstimate> frames;
  std::vector<CheckpointResult> checkpoints;
  double mae_cm = 0.0;  // over checkpoints
};

inline const std::vector<double>& default_checkpoints() {
  static const std::vector<double> d = {50, 45, 40, 35, 30, 25, 20, 15, 10};
  return d;
}

/// Each checkpoint is scored on the frame whose truth is nearest to it; checkpoints
/// the sequence never comes within one frame step of are skipped.
TrackingReport evaluate_tracking(const DoubleExpModel& model, std::span<const TrackingFrame> sequence,
                                 std::span<const double> checkpoints = default_checkpoints());

/// Fraction of checkpoints with |error| < tolerance_cm.
double ranging_accuracy(const TrackingReport& report, double tolerance_cm = 1.0);

// CSV columns: run_id,speed_cmps,z_world_cm,z_img
std::vector<CalibrationSample> read_samples_csv(const std::filesystem::path& path);
void write_samples_csv(const std::filesystem::path& path, std::span<const CalibrationSample> samples);

}  // namespace vtpalm::proximity
