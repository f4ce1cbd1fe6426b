#include "mesochain/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mesochain {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_position(double x, double L) {
  x -= L * std::floor(x / L);
  if (x >= L) x -= L;  // guard against floor rounding at the boundary
  return x;
}

double minimal_image(double d, double L) { return d - L * std::round(d / L); }
}  // namespace

const char* test_case_name(TestCase tc) {
  return tc == TestCase::Sine ? "sine" : "quartic";
}

TestCase test_case_from_name(const std::string& name) {
  if (name == "sine" || name == "1") return TestCase::Sine;
  if (name == "quartic" || name == "2") return TestCase::Quartic;
  throw std::invalid_argument("unknown test case: " + name);
}

double PotentialSpec::equilibrium() const { return std::pow(2.0, 1.0 / 6.0) * sigma; }
double PotentialSpec::cutoff() const { return cutoff_factor * equilibrium(); }

PotentialSpec PotentialSpec::for_chain(int N, double L) {
  PotentialSpec spec;
  spec.sigma = (L / N) / std::pow(2.0, 1.0 / 6.0);
  spec.force_scale = 1.0 / N;
  return spec;
}

double initial_velocity(TestCase test_case, double x, double L) {
  const double u = x / L;
  if (test_case == TestCase::Sine) return 1e-2 * std::sin(2.0 * kPi * u);
  if (u < 1.0 / 3.0 || u > 2.0 / 3.0) return 0.0;
  const double a = u - 1.0 / 3.0, b = u - 2.0 / 3.0;
  return 25.0 * a * a * b * b;
}

ChainState init_chain(int N, double L, TestCase test_case) {
  if (N < 4) throw std::invalid_argument("init_chain: N must be at least 4");
  if (L <= 0.0) throw std::invalid_argument("init_chain: L must be positive");
  ChainState state;
  state.L = L;
  state.N = N;
  state.q.resize(N);
  state.v.resize(N);
  for (int j = 0; j < N; ++j) {
    state.q[j] = (j + 0.5) * L / N;
    state.v[j] = initial_velocity(test_case, state.q[j], L);
  }
  return state;
}

double lj_potential(double xi, const PotentialSpec& spec) {
  if (xi <= 0.0) throw std::invalid_argument("lj_potential: xi must be positive");
  if (xi > spec.cutoff()) return 0.0;
  const double s6 = std::pow(spec.sigma / xi, 6.0);
  return 4.0 * spec.epsilon_well * (s6 * s6 - s6);
}

double lj_potential_derivative(double xi, const PotentialSpec& spec) {
  const double s6 = std::pow(spec.sigma / xi, 6.0);
  return 4.0 * spec.epsilon_well * (-12.0 * s6 * s6 + 6.0 * s6) / xi;
}

std::vector<double> net_forces(const ChainState& state, const PotentialSpec& spec) {
  const int N = state.N;
  if (N < 8) throw std::invalid_argument("net_forces: need N >= 8");
  const double rcut = spec.cutoff();
  std::vector<double> f(N, 0.0);
  // Three neighbors on each side; each unordered pair handled once so
  // Newton's third law holds exactly.
  for (int i = 0; i < N; ++i) {
    for (int k = 1; k <= 3; ++k) {
      const int j = (i + k) % N;
      const double d = minimal_image(state.q[j] - state.q[i], state.L);
      const double r = std::abs(d);
      if (r < 1e-12 * state.L)
        throw std::runtime_error("net_forces: particles " + std::to_string(i) +
                                 " and " + std::to_string(j) + " are coincident");
      if (r > rcut) continue;
      const double fij = spec.force_scale * lj_potential_derivative(r, spec) *
                         (d > 0.0 ? 1.0 : -1.0);
      f[i] += fij;
      f[j] -= fij;
    }
  }
  return f;
}

ChainState velocity_verlet_step(const ChainState& state, double dt,
                                const PotentialSpec& spec) {
  if (dt <= 0.0) throw std::invalid_argument("velocity_verlet_step: dt must be positive");
  const double m = state.particle_mass();
  ChainState next = state;
  const std::vector<double> f0 = net_forces(state, spec);
  for (int i = 0; i < state.N; ++i) {
    next.v[i] = state.v[i] + 0.5 * dt * f0[i] / m;
    next.q[i] = wrap_position(state.q[i] + dt * next.v[i], state.L);
  }
  const std::vector<double> f1 = net_forces(next, spec);
  for (int i = 0; i < state.N; ++i) next.v[i] += 0.5 * dt * f1[i] / m;
  next.t = state.t + dt;
  return next;
}

double kinetic_energy(const ChainState& state) {
  const double m = state.particle_mass();
  double ke = 0.0;
  for (double vi : state.v) ke += 0.5 * m * vi * vi;
  return ke;
}

double potential_energy(const ChainState& state, const PotentialSpec& spec) {
  const double rcut = spec.cutoff();
  const double shift = [&] {
    const double s6 = std::pow(spec.sigma / rcut, 6.0);
    return 4.0 * spec.epsilon_well * (s6 * s6 - s6);
  }();
  double pe = 0.0;
  for (int i = 0; i < state.N; ++i) {
    for (int k = 1; k <= 3; ++k) {
      const int j = (i + k) % state.N;
      const double r = std::abs(minimal_image(state.q[j] - state.q[i], state.L));
      if (r <= rcut) pe += spec.force_scale * (lj_potential(r, spec) - shift);
    }
  }
  return pe;
}

double total_energy(const ChainState& state, const PotentialSpec& spec) {
  return kinetic_energy(state) + potential_energy(state, spec);
}

Trajectory simulate(int N, double L, TestCase test_case, double dt, double t_end,
                    const std::vector<double>& sample_times,
                    const PotentialSpec& spec) {
  if (t_end < 0.0) throw std::invalid_argument("simulate: t_end must be non-negative");
  for (double ts : sample_times)
    if (ts < 0.0 || ts > t_end + 1e-12)
      throw std::invalid_argument("simulate: sample time outside [0, t_end]");

  ChainState state = init_chain(N, L, test_case);

  // Snap sample times to integer step counts; keep them sorted and unique.
  std::vector<long> sample_steps;
  for (double ts : sample_times) sample_steps.push_back(std::lround(ts / dt));
  std::sort(sample_steps.begin(), sample_steps.end());
  sample_steps.erase(std::unique(sample_steps.begin(), sample_steps.end()),
                     sample_steps.end());

  Trajectory traj;
  if (sample_steps.empty() || t_end == 0.0) {
    traj.snapshots.push_back(state);
    traj.energy_trace.emplace_back(state.t, total_energy(state, spec));
    return traj;
  }

  const long last_step = sample_steps.back();
  const double m = state.particle_mass();
  std::vector<double> f = net_forces(state, spec);
  std::size_t next_sample = 0;

  for (long step = 0; step <= last_step; ++step) {
    state.t = step * dt;
    if (next_sample < sample_steps.size() && step == sample_steps[next_sample]) {
      traj.snapshots.push_back(state);
      traj.energy_trace.emplace_back(state.t, total_energy(state, spec));
      ++next_sample;
    }
    if (step == last_step) break;
    for (int i = 0; i < N; ++i) {
      state.v[i] += 0.5 * dt * f[i] / m;
      state.q[i] = wrap_position(state.q[i] + dt * state.v[i], state.L);
    }
    const std::vector<double> f1 = net_forces(state, spec);
    for (int i = 0; i < N; ++i) state.v[i] += 0.5 * dt * f1[i] / m;
    f = f1;
  }
  return traj;
}

}  // namespace mesochain
