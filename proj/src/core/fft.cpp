#include "core/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace vtpalm::detail {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class Plan {
 public:
  Plan(std::size_t width, std::size_t height, Complex* in, Complex* out, int sign) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_2d(static_cast<int>(height), static_cast<int>(width),
                             reinterpret_cast<fftw_complex*>(in), reinterpret_cast<fftw_complex*>(out), sign,
                             FFTW_ESTIMATE);
    require(plan_ != nullptr, ErrorKind::InvalidArgument, "fftw planning failed");
  }
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;

  void execute() { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

}  // namespace

Spectrum fft2(const ScalarField& field) {
  require(!field.empty(), ErrorKind::InvalidArgument, "fft2 of an empty field");
  std::vector<Complex> in(field.values().begin(), field.values().end());
  Spectrum out{field.width(), field.height(), std::vector<Complex>(field.size())};
  Plan plan(field.width(), field.height(), in.data(), out.bins.data(), FFTW_FORWARD);
  plan.execute();
  return out;
}

ScalarField ifft2_real(const Spectrum& spectrum) {
  std::vector<Complex> in = spectrum.bins;
  std::vector<Complex> out(in.size());
  Plan plan(spectrum.width, spectrum.height, in.data(), out.data(), FFTW_BACKWARD);
  plan.execute();
  ScalarField result(spectrum.width, spectrum.height);
  const double scale = 1.0 / static_cast<double>(in.size());
  for (std::size_t i = 0; i < out.size(); ++i) result[i] = out[i].real() * scale;
  return result;
}

}  // namespace vtpalm::detail
