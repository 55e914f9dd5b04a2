#include "fft.hpp"

#include <fftw3.h>

#include <stdexcept>

namespace hypfill::detail {
namespace {

void run(Spectrum& data, int dim, int m, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan = dim == 1 ? fftw_plan_dft_1d(m, buf, buf, sign, FFTW_ESTIMATE)
                            : fftw_plan_dft_2d(m, m, buf, buf, sign, FFTW_ESTIMATE);
  if (!plan) throw std::runtime_error("fft: plan creation failed");
  fftw_execute(plan);
  fftw_destroy_plan(plan);
}

void check(std::size_t n, int dim, int m) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("fft: dim must be 1 or 2");
  const std::size_t want = dim == 1 ? std::size_t(m) : std::size_t(m) * std::size_t(m);
  if (n != want) throw std::invalid_argument("fft: size mismatch");
}

}  // namespace

Spectrum fft_forward(const std::vector<double>& values, int dim, int m) {
  check(values.size(), dim, m);
  Spectrum data(values.begin(), values.end());
  run(data, dim, m, FFTW_FORWARD);
  return data;
}

std::vector<double> fft_inverse_real(Spectrum spec, int dim, int m) {
  check(spec.size(), dim, m);
  run(spec, dim, m, FFTW_BACKWARD);
  const double scale = 1.0 / double(spec.size());
  std::vector<double> out(spec.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = spec[i].real() * scale;
  return out;
}

}  // namespace hypfill::detail
