// Discrete Fourier diagnostics: field spectra, exact-vs-approximate spectrum
// comparison, and the low-pass identity of windowed averaging.

#pragma once

#include <complex>
#include <vector>

#include "mesochain/dynamics.hpp"
#include "mesochain/meso.hpp"
#include "mesochain/windows.hpp"

namespace mesochain {

struct SpectrumTable {
  std::vector<int> wavenumbers;      // 0 .. n/2
  std::vector<double> amplitudes;    // |c_k| with 1/n normalization
};

// Forward DFT coefficients c_k = (1/n) sum_j u_j exp(-2 pi i k j / n),
// k = 0..n-1.
std::vector<std::complex<double>> dft_coefficients(const std::vector<double>& values);

// Amplitudes |c_k| for the non-negative wavenumbers.
SpectrumTable dft_field(const std::vector<double>& values);

// Max modulus deviation over k = 0..B/2 between the DFT of the windowed
// average sum_i g_i psi_eta(x_k - q_i) and psi_hat(k) g_hat_sm(k), where
// g_hat_sm is the exact particle sum and psi_hat the transform of the kernel
// sampled on the same grid. Exact up to kernel aliasing.
double lowpass_identity_check(const ChainState& state,
                              const std::vector<double>& weights,
                              const WindowKernel& kernel, const MesoGrid& grid);

struct SpectrumComparison {
  SpectrumTable exact;
  SpectrumTable approx;
  int k_match = 0;  // largest k with all significant modes up to k matching
};

// Modes with exact amplitude >= 1e-10 must agree within relative 0.2 to
// count as matched; weaker modes are skipped.
SpectrumComparison spectrum_report(const std::vector<double>& exact,
                                   const std::vector<double>& approx);

constexpr double kSpectrumAmplitudeFloor = 1e-10;
constexpr double kSpectrumMatchTolerance = 0.2;

}  // namespace mesochain
