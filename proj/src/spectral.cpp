#include "mesochain/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <stdexcept>

namespace mesochain {

namespace {
constexpr double kPi = 3.14159265358979323846;
// FFTW plan creation is not thread-safe; execution is.
std::mutex fftw_mutex;
}  // namespace

std::vector<std::complex<double>> dft_coefficients(const std::vector<double>& values) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw std::invalid_argument("dft_coefficients: need at least 2 samples");
  std::vector<std::complex<double>> half(n / 2 + 1);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex);
    std::vector<double> in(values);
    fftw_plan plan = fftw_plan_dft_r2c_1d(
        n, in.data(), reinterpret_cast<fftw_complex*>(half.data()), FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
  }
  // Expand to the full spectrum with the 1/n normalization.
  std::vector<std::complex<double>> out(n);
  for (int k = 0; k <= n / 2; ++k) out[k] = half[k] / double(n);
  for (int k = n / 2 + 1; k < n; ++k) out[k] = std::conj(out[n - k]);
  return out;
}

SpectrumTable dft_field(const std::vector<double>& values) {
  const auto coeffs = dft_coefficients(values);
  const int n = static_cast<int>(values.size());
  SpectrumTable table;
  table.wavenumbers.resize(n / 2 + 1);
  table.amplitudes.resize(n / 2 + 1);
  for (int k = 0; k <= n / 2; ++k) {
    table.wavenumbers[k] = k;
    table.amplitudes[k] = std::abs(coeffs[k]);
  }
  return table;
}

double lowpass_identity_check(const ChainState& state,
                              const std::vector<double>& weights,
                              const WindowKernel& kernel, const MesoGrid& grid) {
  if (weights.size() != state.q.size())
    throw std::invalid_argument("lowpass_identity_check: weight count mismatch");
  const int B = grid.B;
  const double L = grid.L;

  // Windowed average and the grid-sampled kernel.
  std::vector<double> avg(B, 0.0), samp(B, 0.0);
  for (int k = 0; k < B; ++k) {
    const double xk = grid.coarse_node(k);
    for (std::size_t i = 0; i < state.q.size(); ++i)
      avg[k] += weights[i] * kernel.eval_periodic(xk - state.q[i]);
    samp[k] = kernel.eval_periodic(xk);
  }

  // Riemann-sum transforms with the physical phase exp(-2 pi i k x / L).
  double worst = 0.0;
  for (int k = 0; k <= B / 2; ++k) {
    std::complex<double> lhs(0.0, 0.0), psi_hat(0.0, 0.0), g_sm(0.0, 0.0);
    for (int j = 0; j < B; ++j) {
      const double phase = -2.0 * kPi * k * grid.coarse_node(j) / L;
      const std::complex<double> e(std::cos(phase), std::sin(phase));
      lhs += avg[j] * e;
      psi_hat += samp[j] * e;
    }
    lhs *= L / B;
    psi_hat *= L / B;
    for (std::size_t i = 0; i < state.q.size(); ++i) {
      const double phase = -2.0 * kPi * k * state.q[i] / L;
      g_sm += weights[i] * std::complex<double>(std::cos(phase), std::sin(phase));
    }
    worst = std::max(worst, std::abs(lhs - psi_hat * g_sm));
  }
  return worst;
}

SpectrumComparison spectrum_report(const std::vector<double>& exact,
                                   const std::vector<double>& approx) {
  if (exact.size() != approx.size())
    throw std::invalid_argument("spectrum_report: length mismatch");
  SpectrumComparison cmp;
  cmp.exact = dft_field(exact);
  cmp.approx = dft_field(approx);
  const int kmax = static_cast<int>(cmp.exact.amplitudes.size()) - 1;
  int k_match = kmax;
  for (int k = 0; k <= kmax; ++k) {
    const double ae = cmp.exact.amplitudes[k];
    if (ae < kSpectrumAmplitudeFloor) continue;
    if (std::abs(cmp.approx.amplitudes[k] - ae) > kSpectrumMatchTolerance * ae) {
      k_match = k - 1;
      break;
    }
  }
  cmp.k_match = k_match;
  return cmp;
}

}  // namespace mesochain
