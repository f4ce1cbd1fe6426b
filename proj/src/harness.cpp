#include "mesochain/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

#include "mesochain/csvio.hpp"

namespace mesochain {

namespace {

using nlohmann::json;

std::string eta_string(double eta) {
  std::ostringstream os;
  os << eta;
  return os.str();
}

void parallel_runs(std::size_t count, int workers,
                   const std::function<void(std::size_t)>& fn) {
  workers = std::max(1, workers);
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const int n_threads = std::min<std::size_t>(workers, count);
  for (int w = 0; w < n_threads; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  for (auto& th : pool) th.join();
}

}  // namespace

std::vector<double> ExperimentConfig::resolved_sample_times() const {
  if (!sample_times.empty()) return sample_times;
  if (t_end <= 0.0) return {0.0};
  // Default grid: 0.1 spacing at t_end scale; "fine" tracing uses 0.01.
  const int n = fine_trace ? 100 : 10;
  std::vector<double> times;
  for (int i = 0; i <= n; ++i) times.push_back(t_end * i / n);
  return times;
}

PotentialSpec ExperimentConfig::potential(int n) const {
  PotentialSpec spec = PotentialSpec::for_chain(n, L);
  spec.epsilon_well = epsilon_well;
  if (sigma_lj > 0.0) spec.sigma = sigma_lj;
  return spec;
}

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig c;
  try {
    if (j.contains("test_case")) c.test_case = test_case_from_name(j["test_case"]);
    if (j.contains("N")) c.N = j["N"];
    if (j.contains("B")) c.B = j["B"];
    if (j.contains("Nfine")) c.Nfine = j["Nfine"];
    if (j.contains("eta")) {
      c.etas.clear();
      if (j["eta"].is_array())
        for (const auto& e : j["eta"]) c.etas.push_back(e);
      else
        c.etas.push_back(j["eta"]);
    }
    if (j.contains("window")) {
      c.windows.clear();
      if (j["window"].is_array())
        for (const auto& w : j["window"]) c.windows.push_back(window_from_name(w));
      else
        c.windows.push_back(window_from_name(j["window"]));
    }
    if (j.contains("N_list"))
      for (const auto& n : j["N_list"]) c.N_list.push_back(n);
    if (j.contains("dt")) c.dt = j["dt"];
    if (j.contains("t_end")) c.t_end = j["t_end"];
    if (j.contains("sample_times"))
      for (const auto& t : j["sample_times"]) c.sample_times.push_back(t);
    if (j.contains("trace")) c.fine_trace = j["trace"] == "fine";
    if (j.contains("filter")) {
      const auto& f = j["filter"];
      const std::string variant = f.value("variant", "tsvd");
      if (variant == "tsvd")
        c.filter.variant = FilterVariant::Tsvd;
      else if (variant == "tikhonov")
        c.filter.variant = FilterVariant::Tikhonov;
      else if (variant == "landweber")
        c.filter.variant = FilterVariant::Landweber;
      else
        throw ConfigError("unknown filter.variant: " + variant);
      if (f.contains("alpha")) c.filter.alpha = f["alpha"];
      if (f.contains("n")) c.filter.n = f["n"];
    }
    if (j.contains("sigma_cut")) c.sigma_cut = j["sigma_cut"];
    if (j.contains("rhs_tol")) c.rhs_tol = j["rhs_tol"];
    if (j.contains("L")) c.L = j["L"];
    if (j.contains("M")) c.M = j["M"];
    if (j.contains("sigma_lj")) c.sigma_lj = j["sigma_lj"];
    if (j.contains("epsilon_well")) c.epsilon_well = j["epsilon_well"];
    if (j.contains("workers")) c.workers = j["workers"];
    if (j.contains("output_dir")) c.output_dir = j["output_dir"];
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field error: ") + e.what());
  }
  c.filter.sigma_cut = c.sigma_cut;

  if (c.N < 8) throw ConfigError("config: N must be at least 8");
  if (c.B < 2) throw ConfigError("config: B must be at least 2");
  if (c.etas.empty()) throw ConfigError("config: eta list is empty");
  for (double eta : c.etas)
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("config: eta must lie in (0, 1)");
  if (c.t_end < 0.0) throw ConfigError("config: t_end must be non-negative");
  if (c.L <= 0.0 || c.M <= 0.0) throw ConfigError("config: L and M must be positive");
  for (double ts : c.sample_times)
    if (ts < 0.0 || ts > c.t_end)
      throw ConfigError("config: sample time outside [0, t_end]");
  for (int n : c.N_list)
    if (n < 8) throw ConfigError("config: N_list entries must be at least 8");
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

std::string resolved_config_json(const ExperimentConfig& c) {
  json j;
  j["test_case"] = test_case_name(c.test_case);
  j["N"] = c.N;
  j["B"] = c.B;
  j["Nfine"] = c.resolved_Nfine(c.N);
  j["eta"] = c.etas;
  json windows = json::array();
  for (WindowKind w : c.windows) windows.push_back(window_name(w));
  j["window"] = windows;
  if (!c.N_list.empty()) j["N_list"] = c.N_list;
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["sample_times"] = c.resolved_sample_times();
  switch (c.filter.variant) {
    case FilterVariant::Tsvd: j["filter"]["variant"] = "tsvd"; break;
    case FilterVariant::Tikhonov: j["filter"]["variant"] = "tikhonov"; break;
    case FilterVariant::Landweber: j["filter"]["variant"] = "landweber"; break;
  }
  j["filter"]["alpha"] = c.filter.alpha;
  j["filter"]["n"] = c.filter.n;
  j["sigma_cut"] = c.sigma_cut;
  j["rhs_tol"] = c.rhs_tol;
  j["L"] = c.L;
  j["M"] = c.M;
  j["sigma_lj"] = c.sigma_lj;
  j["epsilon_well"] = c.epsilon_well;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir;
  return j.dump(2);
}

ErrorPair relative_error(const std::vector<double>& exact,
                         const std::vector<double>& approx) {
  if (exact.size() != approx.size())
    throw std::invalid_argument("relative_error: length mismatch");
  double abs = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    abs = std::max(abs, std::abs(exact[i] - approx[i]));
    scale = std::max(scale, std::abs(exact[i]));
  }
  ErrorPair e;
  e.abs = abs;
  if (scale > 0.0) {
    e.rel = abs / scale;
  } else {
    e.rel = 0.0;
    e.rel_defined = false;
  }
  return e;
}

std::string ErrorReport::label() const {
  std::ostringstream os;
  os << test_case_name(test_case) << '_' << window_name(window) << "_eta"
     << eta_string(eta) << "_N" << N << "_B" << B;
  return os.str();
}

TrajectoryHandle cached_trajectory(const ExperimentConfig& config, int n) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const Trajectory>> cache;

  const std::vector<double> samples = config.resolved_sample_times();
  const PotentialSpec spec = config.potential(n);

  const auto key_for = [&](double dt) {
    std::ostringstream key;
    key << test_case_name(config.test_case) << '|' << n << '|' << dt << '|'
        << config.L << '|' << config.M << '|' << config.t_end << '|'
        << spec.sigma << '|' << spec.epsilon_well;
    for (double t : samples) key << ',' << t;
    return key.str();
  };

  const auto fetch = [&](double dt) {
    const std::string key = key_for(dt);
    {
      std::lock_guard<std::mutex> lock(mutex);
      auto it = cache.find(key);
      if (it != cache.end()) return it->second;
    }
    auto traj = std::make_shared<const Trajectory>(simulate(
        n, config.L, config.test_case, dt, config.t_end, samples, spec));
    std::lock_guard<std::mutex> lock(mutex);
    return cache.emplace(key, traj).first->second;
  };

  if (config.dt > 0.0) return {fetch(config.dt), config.dt};

  // Calibrated default: dt = 1e-4 at t_end scale, halved up to four times
  // until the relative energy deviation stays within 5e-4.
  double dt = 1e-4 * (config.t_end > 0.0 ? config.t_end : 1.0);
  std::shared_ptr<const Trajectory> traj;
  for (int attempt = 0; attempt <= 4; ++attempt) {
    traj = fetch(dt);
    const double e0 = traj->energy_trace.front().second;
    double dev = 0.0;
    for (const auto& [t, e] : traj->energy_trace)
      dev = std::max(dev, std::abs(e - e0));
    if (dev <= 5e-4 * std::abs(e0) || attempt == 4) break;
    dt *= 0.5;
  }
  return {traj, dt};
}

namespace {

RunDetail run_single(const ExperimentConfig& config, WindowKind window, double eta,
                     int n, bool capture) {
  ExperimentConfig local = config;
  local.windows = {window};
  local.etas = {eta};
  local.N = n;

  const int nfine = config.resolved_Nfine(n);
  const MesoGrid grid(config.B, nfine, config.L);
  const WindowKernel kernel(window, config.L, eta);
  const PotentialSpec spec = config.potential(n);
  FilterSpec filter = config.filter;
  filter.sigma_cut = config.sigma_cut;

  const TrajectoryHandle traj = cached_trajectory(config, n);
  const auto system = cached_system(kernel, grid, config.sigma_cut, config.rhs_tol);

  RunDetail detail;
  detail.system = system;
  detail.trajectory = traj.trajectory;
  ErrorReport& report = detail.report;
  report.test_case = config.test_case;
  report.window = window;
  report.eta = eta;
  report.N = n;
  report.B = config.B;
  report.Nfine = nfine;
  report.retained_rank = system->retained_rank();
  report.dt = traj.dt;

  const Trajectory& tr = *traj.trajectory;
  for (std::size_t s = 0; s < tr.snapshots.size(); ++s) {
    const ChainState& state = tr.snapshots[s];
    MesoFields fields = meso_fields(state, kernel, grid, spec);
    FineFields fine = exact_recoverables(state, grid);
    ReconstructedFields recon =
        reconstruct_fields(*system, fields.density, fields.momentum, filter,
                           state.t, n, config.M);
    auto [tc_approx, tint_approx] = approximate_stresses(
        recon.q_approx, recon.v_particles, kernel, grid, spec, config.M);

    ErrorSample sample;
    sample.t = state.t;
    sample.J = relative_error(fine.J_exact, recon.J_approx);
    sample.v = relative_error(fine.v_exact, recon.v_approx);
    sample.Tc = relative_error(fields.stress_conv, tc_approx);
    sample.Tint = relative_error(fields.stress_int, tint_approx);
    sample.energy = tr.energy_trace[s].second;
    report.samples.push_back(sample);

    if (capture) {
      detail.meso.push_back(std::move(fields));
      detail.fine.push_back(std::move(fine));
      detail.recon.push_back(std::move(recon));
      detail.stress_conv_approx.push_back(std::move(tc_approx));
      detail.stress_int_approx.push_back(std::move(tint_approx));
    }
  }
  return detail;
}

SweepOutcome sweep_over(const ExperimentConfig& config,
                        const std::vector<std::tuple<WindowKind, double, int>>& entries) {
  SweepOutcome outcome;
  outcome.reports.resize(entries.size());
  std::vector<std::string> failures(entries.size());

  // Share one trajectory per particle count before going parallel.
  std::vector<int> distinct_n;
  for (const auto& [w, e, n] : entries)
    if (std::find(distinct_n.begin(), distinct_n.end(), n) == distinct_n.end())
      distinct_n.push_back(n);
  for (int n : distinct_n) cached_trajectory(config, n);

  parallel_runs(entries.size(), config.workers, [&](std::size_t i) {
    const auto& [window, eta, n] = entries[i];
    try {
      outcome.reports[i] =
          run_single(config, window, eta, n, /*capture=*/false).report;
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << window_name(window) << " eta=" << eta << " N=" << n << ": " << e.what();
      failures[i] = os.str();
    }
  });

  // Drop failed slots, keep order.
  SweepOutcome cleaned;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (failures[i].empty())
      cleaned.reports.push_back(std::move(outcome.reports[i]));
    else
      cleaned.failures.push_back(failures[i]);
  }
  return cleaned;
}

}  // namespace

ErrorReport run_experiment(const ExperimentConfig& config) {
  return run_single(config, config.windows.front(), config.etas.front(), config.N,
                    false)
      .report;
}

RunDetail run_experiment_detailed(const ExperimentConfig& config) {
  return run_single(config, config.windows.front(), config.etas.front(), config.N,
                    true);
}

SweepOutcome sweep_window(const ExperimentConfig& config) {
  std::vector<std::tuple<WindowKind, double, int>> entries;
  for (WindowKind w : config.windows)
    entries.emplace_back(w, config.etas.front(), config.N);
  return sweep_over(config, entries);
}

SweepOutcome sweep_eta(const ExperimentConfig& config) {
  std::vector<std::tuple<WindowKind, double, int>> entries;
  for (double eta : config.etas)
    entries.emplace_back(config.windows.front(), eta, config.N);
  return sweep_over(config, entries);
}

SweepOutcome sweep_scale(const ExperimentConfig& config) {
  std::vector<std::tuple<WindowKind, double, int>> entries;
  const std::vector<int> ns = config.N_list.empty() ? std::vector<int>{config.N}
                                                    : config.N_list;
  for (int n : ns) entries.emplace_back(config.windows.front(), config.etas.front(), n);
  return sweep_over(config, entries);
}

std::vector<std::filesystem::path> emit_reports(const SweepOutcome& outcome,
                                                const ExperimentConfig& config,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  json manifest;
  manifest["config"] = json::parse(resolved_config_json(config));
  manifest["runs"] = json::array();

  for (const ErrorReport& report : outcome.reports) {
    CsvWriter csv({"t", "abs_J", "rel_J", "abs_v", "rel_v", "abs_Tc", "rel_Tc",
                   "abs_Tint", "rel_Tint", "energy", "rank", "rel_defined_mask"});
    for (const ErrorSample& s : report.samples) {
      const int mask = (s.J.rel_defined ? 1 : 0) | (s.v.rel_defined ? 2 : 0) |
                       (s.Tc.rel_defined ? 4 : 0) | (s.Tint.rel_defined ? 8 : 0);
      csv.add_row({format_number(s.t), format_number(s.J.abs), format_number(s.J.rel),
                   format_number(s.v.abs), format_number(s.v.rel),
                   format_number(s.Tc.abs), format_number(s.Tc.rel),
                   format_number(s.Tint.abs), format_number(s.Tint.rel),
                   format_number(s.energy), std::to_string(report.retained_rank),
                   std::to_string(mask)});
    }
    const std::filesystem::path path = out_dir / (report.label() + ".csv");
    const std::string content = csv.str();
    write_text_file(path, content);
    written.push_back(path);

    json entry;
    entry["label"] = report.label();
    entry["file"] = path.filename().string();
    entry["checksum"] = fnv1a_hex(content);
    entry["window"] = window_name(report.window);
    entry["eta"] = report.eta;
    entry["N"] = report.N;
    entry["B"] = report.B;
    entry["Nfine"] = report.Nfine;
    entry["retained_rank"] = report.retained_rank;
    entry["dt"] = report.dt;
    manifest["runs"].push_back(entry);
  }
  for (const std::string& failure : outcome.failures)
    manifest["failures"].push_back(failure);

  const std::filesystem::path manifest_path = out_dir / "manifest.json";
  write_text_file(manifest_path, manifest.dump(2) + "\n");
  written.push_back(manifest_path);
  return written;
}

}  // namespace mesochain
