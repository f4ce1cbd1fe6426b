// Experiment orchestration: configuration, the simulate -> average ->
// deconvolve -> reinsert -> compare pipeline, parameter sweeps, and CSV
// emission with a JSON manifest.

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mesochain/closure.hpp"
#include "mesochain/dynamics.hpp"
#include "mesochain/meso.hpp"
#include "mesochain/regularize.hpp"

namespace mesochain {

// Invalid configuration input; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  TestCase test_case = TestCase::Sine;
  int N = 1000;
  int B = 500;
  int Nfine = 0;  // 0 means N' = N
  std::vector<double> etas = {0.1};
  std::vector<WindowKind> windows = {WindowKind::Gaussian};
  std::vector<int> N_list;  // sweep-n entries; empty means {N}
  double dt = 0.0;          // 0 requests the calibrated default
  double t_end = 1.0;
  std::vector<double> sample_times;  // empty selects the default grid
  bool fine_trace = false;           // 0.01-spaced samples
  FilterSpec filter;
  double sigma_cut = 1e-13;
  double rhs_tol = 1e-13;
  double L = 1.0;
  double M = 1.0;
  double sigma_lj = 0.0;  // 0 derives sigma from the lattice spacing
  double epsilon_well = 0.025;
  int workers = 1;
  std::string output_dir = "out";

  int resolved_Nfine(int n) const { return Nfine > 0 ? Nfine : n; }
  std::vector<double> resolved_sample_times() const;
  PotentialSpec potential(int n) const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config_json(const std::string& text);
std::string resolved_config_json(const ExperimentConfig& config);

struct ErrorPair {
  double abs = 0.0;
  double rel = 0.0;
  bool rel_defined = true;
};

// l-inf absolute difference and its ratio to the exact field's l-inf.
ErrorPair relative_error(const std::vector<double>& exact,
                         const std::vector<double>& approx);

struct ErrorSample {
  double t = 0.0;
  ErrorPair J, v, Tc, Tint;
  double energy = 0.0;
};

struct ErrorReport {
  TestCase test_case = TestCase::Sine;
  WindowKind window = WindowKind::Gaussian;
  double eta = 0.1;
  int N = 0, B = 0, Nfine = 0;
  int retained_rank = 0;
  double dt = 0.0;
  std::vector<ErrorSample> samples;

  std::string label() const;
};

// All per-time fields of one run, for CSV emission and diagnostics.
struct RunDetail {
  ErrorReport report;
  std::vector<MesoFields> meso;
  std::vector<FineFields> fine;
  std::vector<ReconstructedFields> recon;
  std::vector<std::vector<double>> stress_conv_approx;
  std::vector<std::vector<double>> stress_int_approx;
  std::shared_ptr<const ConvolutionSystem> system;
  std::shared_ptr<const Trajectory> trajectory;
};

// One full pipeline run for the first (window, eta) entry of the config.
// The SVD is computed once per configuration and reused at every time.
ErrorReport run_experiment(const ExperimentConfig& config);
RunDetail run_experiment_detailed(const ExperimentConfig& config);

// Trajectory cache shared by all runs of a sweep: one integration per
// (test case, N, dt). dt <= 0 applies the calibrated default: 1e-4 scaled by
// t_end, halved up to four times until the energy criterion holds.
struct TrajectoryHandle {
  std::shared_ptr<const Trajectory> trajectory;
  double dt = 0.0;
};
TrajectoryHandle cached_trajectory(const ExperimentConfig& config, int n);

struct SweepOutcome {
  std::vector<ErrorReport> reports;
  std::vector<std::string> failures;  // per-run diagnostics; sweep continues
};

SweepOutcome sweep_window(const ExperimentConfig& config);
SweepOutcome sweep_eta(const ExperimentConfig& config);
SweepOutcome sweep_scale(const ExperimentConfig& config);

// One CSV per report plus manifest.json echoing the resolved config and the
// per-file checksums. Returns the written paths (manifest last).
std::vector<std::filesystem::path> emit_reports(const SweepOutcome& outcome,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir);

}  // namespace mesochain
