#include "mesochain/closure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mesochain {

namespace {
constexpr double kJacobianFloor = 1e-6;

std::vector<double> scaled_solve(const ConvolutionSystem& system,
                                 const std::vector<double>& field,
                                 const FilterSpec& filter, double mass_total) {
  // Right-hand side of A x = b is (|Omega|/M) times the average.
  std::vector<double> b(field.size());
  const double scale = system.grid.L / mass_total;
  for (std::size_t k = 0; k < field.size(); ++k) b[k] = scale * field[k];
  return regularized_solve(system, b, filter);
}
}  // namespace

std::vector<double> reconstruct_jacobian(const ConvolutionSystem& system,
                                         const std::vector<double>& density,
                                         const FilterSpec& filter,
                                         double mass_total,
                                         double* clamp_fraction) {
  std::vector<double> J = scaled_solve(system, density, filter, mass_total);
  int clamped = 0;
  for (double& val : J) {
    if (val < kJacobianFloor) {
      val = kJacobianFloor;
      ++clamped;
    }
  }
  const double fraction = double(clamped) / J.size();
  if (clamp_fraction) *clamp_fraction = fraction;
  if (fraction > 0.10)
    throw std::runtime_error("reconstruct_jacobian: degenerate reconstruction, " +
                             std::to_string(100.0 * fraction) + "% of nodes clamped");
  return J;
}

std::vector<double> reconstruct_velocity(const ConvolutionSystem& system,
                                         const std::vector<double>& density,
                                         const std::vector<double>& momentum,
                                         const FilterSpec& filter,
                                         double mass_total) {
  const std::vector<double> J = reconstruct_jacobian(system, density, filter, mass_total);
  const std::vector<double> Jv = scaled_solve(system, momentum, filter, mass_total);
  std::vector<double> v(J.size());
  for (std::size_t m = 0; m < J.size(); ++m) v[m] = Jv[m] / J[m];
  return v;
}

std::vector<double> positions_from_jacobian(const std::vector<double>& J_approx,
                                            int N, double L) {
  const int Nf = static_cast<int>(J_approx.size());
  if (Nf < 2) throw std::invalid_argument("positions_from_jacobian: too few nodes");

  // Knots 0, y_1, ..., y_Nf, L with the periodic edge value at both ends.
  std::vector<double> knot(Nf + 2), cum(Nf + 2);
  knot[0] = 0.0;
  for (int m = 0; m < Nf; ++m) knot[m + 1] = (m + 0.5) * L / Nf;
  knot[Nf + 1] = L;
  const double edge = 0.5 * (J_approx.front() + J_approx.back());
  cum[0] = 0.0;
  for (int i = 1; i <= Nf + 1; ++i) {
    const double ja = i == 1 ? edge : J_approx[i - 2];
    const double jb = i == Nf + 1 ? edge : J_approx[i - 1];
    cum[i] = cum[i - 1] + 0.5 * (ja + jb) * (knot[i] - knot[i - 1]);
    if (cum[i] <= cum[i - 1])
      throw std::runtime_error("positions_from_jacobian: cumulative mass not increasing");
  }

  const double total = cum[Nf + 1];
  std::vector<double> q(N);
  int seg = 0;
  for (int i = 0; i < N; ++i) {
    const double target = (i + 0.5) * total / N;
    while (seg < Nf && cum[seg + 1] < target) ++seg;
    const double w = (target - cum[seg]) / (cum[seg + 1] - cum[seg]);
    double pos = knot[seg] + w * (knot[seg + 1] - knot[seg]);
    if (pos >= L) pos -= L;
    q[i] = pos;
  }
  return q;
}

std::vector<double> particle_velocities(const std::vector<double>& v_approx,
                                        const std::vector<double>& q_approx,
                                        double L) {
  const int Nf = static_cast<int>(v_approx.size());
  std::vector<double> v(q_approx.size());
  for (std::size_t i = 0; i < q_approx.size(); ++i) {
    const double pos = q_approx[i] / (L / Nf) - 0.5;
    const int m0 = static_cast<int>(std::floor(pos));
    const double w = pos - m0;
    const int a = ((m0 % Nf) + Nf) % Nf;
    const int b = (a + 1) % Nf;
    v[i] = (1.0 - w) * v_approx[a] + w * v_approx[b];
  }
  return v;
}

std::pair<std::vector<double>, std::vector<double>> approximate_stresses(
    const std::vector<double>& q_approx, const std::vector<double>& v_particles,
    const WindowKernel& kernel, const MesoGrid& grid, const PotentialSpec& spec,
    double mass_total) {
  ChainState state;
  state.L = grid.L;
  state.N = static_cast<int>(q_approx.size());
  state.q = q_approx;
  state.v = v_particles;
  state.mass_total = mass_total;
  return {convective_stress_exact(state, kernel, grid),
          interaction_stress_exact(state, kernel, grid, spec)};
}

ReconstructedFields reconstruct_fields(const ConvolutionSystem& system,
                                       const std::vector<double>& density,
                                       const std::vector<double>& momentum,
                                       const FilterSpec& filter, double t,
                                       int N, double mass_total) {
  ReconstructedFields out;
  out.t = t;
  out.J_approx = reconstruct_jacobian(system, density, filter, mass_total,
                                      &out.clamp_fraction);
  const std::vector<double> Jv = scaled_solve(system, momentum, filter, mass_total);
  out.v_approx.resize(Jv.size());
  for (std::size_t m = 0; m < Jv.size(); ++m) out.v_approx[m] = Jv[m] / out.J_approx[m];
  out.q_approx = positions_from_jacobian(out.J_approx, N, system.grid.L);
  out.v_particles = particle_velocities(out.v_approx, out.q_approx, system.grid.L);
  return out;
}

}  // namespace mesochain
