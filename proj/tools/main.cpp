// Command-line driver: reproduces the experiment tables as CSV files.

#include <CLI11.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <string>
#include <vector>

#include "mesochain/bounds.hpp"
#include "mesochain/csvio.hpp"
#include "mesochain/harness.hpp"
#include "mesochain/spectral.hpp"

namespace fs = std::filesystem;
using namespace mesochain;

namespace {

double linf(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double min_gap(const ChainState& state) {
  std::vector<double> q = state.q;
  std::sort(q.begin(), q.end());
  double gap = q.front() + state.L - q.back();
  for (std::size_t i = 0; i + 1 < q.size(); ++i) gap = std::min(gap, q[i + 1] - q[i]);
  return gap;
}

void cmd_simulate(const ExperimentConfig& config, const fs::path& out) {
  fs::create_directories(out);
  const TrajectoryHandle traj = cached_trajectory(config, config.N);
  const std::string prefix =
      std::string(test_case_name(config.test_case)) + "_N" + std::to_string(config.N);

  CsvWriter snap({"t", "index", "q", "v"});
  for (const ChainState& s : traj.trajectory->snapshots)
    for (int i = 0; i < s.N; ++i)
      snap.add_row({format_number(s.t), std::to_string(i), format_number(s.q[i]),
                    format_number(s.v[i])});
  snap.write(out / (prefix + "_trajectory.csv"));

  const PotentialSpec spec = config.potential(config.N);
  CsvWriter energy({"t", "kinetic", "potential", "total"});
  for (const ChainState& s : traj.trajectory->snapshots)
    energy.add_row({format_number(s.t), format_number(kinetic_energy(s)),
                    format_number(potential_energy(s, spec)),
                    format_number(total_energy(s, spec))});
  energy.write(out / (prefix + "_energy.csv"));
  std::printf("wrote %s_{trajectory,energy}.csv (dt=%g)\n", prefix.c_str(), traj.dt);
}

void write_detail_csvs(const RunDetail& detail, const ExperimentConfig& config,
                       const fs::path& out) {
  const MesoGrid grid(config.B, config.resolved_Nfine(detail.report.N), config.L);
  const std::string label = detail.report.label();

  CsvWriter meso({"t", "x", "density", "momentum", "velocity", "stress_conv",
                  "stress_int", "stress_conv_approx", "stress_int_approx"});
  for (std::size_t s = 0; s < detail.meso.size(); ++s) {
    const MesoFields& f = detail.meso[s];
    for (int k = 0; k < grid.B; ++k)
      meso.add_row({f.t, grid.coarse_node(k), f.density[k], f.momentum[k],
                    f.velocity[k], f.stress_conv[k], f.stress_int[k],
                    detail.stress_conv_approx[s][k], detail.stress_int_approx[s][k]});
  }
  meso.write(out / (label + "_meso.csv"));

  CsvWriter fine({"t", "y", "J_exact", "J_approx", "v_exact", "v_approx"});
  for (std::size_t s = 0; s < detail.fine.size(); ++s) {
    const FineFields& f = detail.fine[s];
    const ReconstructedFields& r = detail.recon[s];
    for (int m = 0; m < grid.Nf; ++m)
      fine.add_row({f.t, grid.fine_node(m), f.J_exact[m], r.J_approx[m],
                    f.v_exact[m], r.v_approx[m]});
  }
  fine.write(out / (label + "_fine.csv"));
}

int cmd_close(const ExperimentConfig& config, const fs::path& out) {
  fs::create_directories(out);
  const RunDetail detail = run_experiment_detailed(config);
  write_detail_csvs(detail, config, out);
  SweepOutcome outcome;
  outcome.reports.push_back(detail.report);
  emit_reports(outcome, config, out);
  std::printf("run %s: rank=%d, %zu sample times\n", detail.report.label().c_str(),
              detail.report.retained_rank, detail.report.samples.size());
  return 0;
}

int cmd_sweep(const ExperimentConfig& config, const fs::path& out,
              SweepOutcome (*sweep)(const ExperimentConfig&)) {
  const SweepOutcome outcome = sweep(config);
  emit_reports(outcome, config, out);
  for (const std::string& failure : outcome.failures)
    std::fprintf(stderr, "run failed: %s\n", failure.c_str());
  std::printf("%zu runs written to %s\n", outcome.reports.size(), out.string().c_str());
  return outcome.failures.empty() ? 0 : 1;
}

int cmd_spectra(const ExperimentConfig& config, const fs::path& out) {
  fs::create_directories(out);
  const RunDetail detail = run_experiment_detailed(config);
  const std::size_t last = detail.fine.size() - 1;
  const std::string label = detail.report.label();

  const auto write_spectrum = [&](const std::string& name,
                                  const std::vector<double>& exact,
                                  const std::vector<double>& approx) {
    const SpectrumComparison cmp = spectrum_report(exact, approx);
    CsvWriter csv({"k", "amp_exact", "amp_approx"});
    for (std::size_t k = 0; k < cmp.exact.amplitudes.size(); ++k)
      csv.add_row({double(cmp.exact.wavenumbers[k]), cmp.exact.amplitudes[k],
                   cmp.approx.amplitudes[k]});
    csv.write(out / (label + "_spectrum_" + name + ".csv"));
    std::printf("%s: k_match=%d\n", name.c_str(), cmp.k_match);
  };
  write_spectrum("J", detail.fine[last].J_exact, detail.recon[last].J_approx);
  write_spectrum("v", detail.fine[last].v_exact, detail.recon[last].v_approx);
  write_spectrum("Tc", detail.meso[last].stress_conv, detail.stress_conv_approx[last]);
  write_spectrum("Tint", detail.meso[last].stress_int, detail.stress_int_approx[last]);

  CsvWriter sigma({"j", "sigma"});
  for (int j = 0; j < detail.system->retained_rank(); ++j)
    sigma.add_row({double(j + 1), detail.system->svd.sigma(j)});
  sigma.write(out / (label + "_sigma.csv"));
  return 0;
}

int cmd_bounds(const ExperimentConfig& config, const fs::path& out) {
  fs::create_directories(out);
  const RunDetail detail = run_experiment_detailed(config);
  const ConvolutionSystem& system = *detail.system;
  const WindowKernel kernel(detail.report.window, config.L, detail.report.eta);
  const PotentialSpec spec = config.potential(detail.report.N);

  double r_min = config.L;
  for (const ChainState& s : detail.trajectory->snapshots)
    r_min = std::min(r_min, min_gap(s));
  r_min *= 0.95;

  BoundInputs inputs;
  inputs.svd = system.svd;
  inputs.filter = config.filter;
  inputs.filter.sigma_cut = config.sigma_cut;
  inputs.p = 1.0;
  inputs.q = 2.0;

  CsvWriter csv({"t", "bound_e13", "bound_e14", "bound_theorem",
                 "observed_error_Tint", "ratio"});
  for (std::size_t s = 0; s < detail.fine.size(); ++s) {
    const std::vector<double>& J = detail.fine[s].J_exact;
    const std::vector<double>& Q = detail.recon[s].J_approx;

    Eigen::Map<const Eigen::VectorXd> jv(J.data(), J.size());
    Eigen::VectorXd b_exact = system.A * jv;
    const std::vector<double>& density = detail.meso[s].density;
    std::vector<double> delta(density.size());
    for (std::size_t k = 0; k < density.size(); ++k)
      delta[k] = (config.L / config.M) * density[k] - b_exact(k);

    inputs.x = J;
    inputs.delta = delta;
    inputs.x_inf = linf(J);
    inputs.delta_inf = linf(delta);
    const double e13 = filtered_error_bound(inputs);
    const double e14 = holder_error_bound(inputs);

    const double m_bound = *std::max_element(J.begin(), J.end());
    const double theorem =
        interaction_stress_bound(J, Q, kernel, spec, m_bound, r_min);
    std::vector<double> diff(detail.meso[s].stress_int.size());
    for (std::size_t k = 0; k < diff.size(); ++k)
      diff[k] = detail.meso[s].stress_int[k] - detail.stress_int_approx[s][k];
    const double observed = linf(diff);
    const double ratio = observed > 0.0 ? theorem / observed
                                        : std::numeric_limits<double>::infinity();
    csv.add_row({detail.fine[s].t, e13, e14, theorem, observed, ratio});
  }
  csv.write(out / (detail.report.label() + "_bounds.csv"));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"1D chain deconvolution closure experiments"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_override;
  int workers_override = 0;
  app.add_option("--config", config_path, "JSON experiment configuration")->required();
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_option("--workers", workers_override, "concurrent sweep workers");

  auto* sc_simulate = app.add_subcommand("simulate", "integrate the chain, dump trajectory/energy");
  auto* sc_close = app.add_subcommand("close", "single closure run with full field output");
  auto* sc_sweep_window = app.add_subcommand("sweep-window", "one run per window kind");
  auto* sc_sweep_eta = app.add_subcommand("sweep-eta", "one run per eta");
  auto* sc_sweep_n = app.add_subcommand("sweep-n", "one run per particle count");
  auto* sc_spectra = app.add_subcommand("spectra", "exact vs approximate field spectra");
  auto* sc_bounds = app.add_subcommand("bounds", "error bounds along the trajectory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig config = load_config(config_path);
    if (workers_override > 0) config.workers = workers_override;
    const fs::path out = out_override.empty() ? fs::path(config.output_dir)
                                              : fs::path(out_override);
    if (sc_simulate->parsed()) {
      cmd_simulate(config, out);
      return 0;
    }
    if (sc_close->parsed()) return cmd_close(config, out);
    if (sc_sweep_window->parsed()) return cmd_sweep(config, out, sweep_window);
    if (sc_sweep_eta->parsed()) return cmd_sweep(config, out, sweep_eta);
    if (sc_sweep_n->parsed()) return cmd_sweep(config, out, sweep_scale);
    if (sc_spectra->parsed()) return cmd_spectra(config, out);
    if (sc_bounds->parsed()) return cmd_bounds(config, out);
    return 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
