#include "mesochain/meso.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mesochain {

namespace {

double minimal_image(double d, double L) { return d - L * std::round(d / L); }

// 16-point Gauss-Legendre abscissas/weights on [-1, 1].
constexpr double kGlx[8] = {0.0950125098376374, 0.2816035507792589,
                            0.4580167776572274, 0.6178762444026438,
                            0.7554044083550030, 0.8656312023878318,
                            0.9445750230732326, 0.9894009349916499};
constexpr double kGlw[8] = {0.1894506104550685, 0.1826034150449236,
                            0.1691565193950025, 0.1495959888165767,
                            0.1246289712555339, 0.0951585116824928,
                            0.0622535239386479, 0.0271524594117541};

// Overlap length of [lo, hi] with the support images of the scaled
// characteristic kernel.
double char_overlap(double lo, double hi, double half_width, double L) {
  double len = 0.0;
  for (int m = -1; m <= 1; ++m) {
    const double a = std::max(lo, m * L - half_width);
    const double b = std::min(hi, m * L + half_width);
    if (b > a) len += b - a;
  }
  return len;
}

}  // namespace

MesoGrid::MesoGrid(int B_, int Nf_, double L_) : B(B_), Nf(Nf_), L(L_) {
  if (B < 1 || Nf < 1) throw std::invalid_argument("MesoGrid: node counts must be positive");
  if (B > Nf) throw std::invalid_argument("MesoGrid: B must not exceed Nf");
  if (L <= 0.0) throw std::invalid_argument("MesoGrid: L must be positive");
}

std::vector<double> average_density(const ChainState& state,
                                    const WindowKernel& kernel,
                                    const MesoGrid& grid) {
  const double w = state.mass_total / state.N;
  std::vector<double> rho(grid.B, 0.0);
  for (int k = 0; k < grid.B; ++k) {
    const double xk = grid.coarse_node(k);
    double sum = 0.0;
    for (int i = 0; i < state.N; ++i)
      sum += kernel.eval_periodic(xk - state.q[i]);
    rho[k] = w * sum;
  }
  return rho;
}

std::vector<double> average_momentum(const ChainState& state,
                                     const WindowKernel& kernel,
                                     const MesoGrid& grid) {
  const double w = state.mass_total / state.N;
  std::vector<double> mom(grid.B, 0.0);
  for (int k = 0; k < grid.B; ++k) {
    const double xk = grid.coarse_node(k);
    double sum = 0.0;
    for (int i = 0; i < state.N; ++i)
      sum += state.v[i] * kernel.eval_periodic(xk - state.q[i]);
    mom[k] = w * sum;
  }
  return mom;
}

std::vector<double> average_velocity(const std::vector<double>& density,
                                     const std::vector<double>& momentum,
                                     double mass_total, double L,
                                     int* floored) {
  if (density.size() != momentum.size())
    throw std::invalid_argument("average_velocity: field size mismatch");
  const double floor = 1e-10 * mass_total / L;
  std::vector<double> vel(density.size(), 0.0);
  int count = 0;
  for (std::size_t k = 0; k < density.size(); ++k) {
    if (density[k] >= floor) {
      vel[k] = momentum[k] / density[k];
    } else {
      ++count;
    }
  }
  if (floored) *floored = count;
  return vel;
}

std::vector<double> convective_stress_exact(const ChainState& state,
                                            const WindowKernel& kernel,
                                            const MesoGrid& grid) {
  const auto rho = average_density(state, kernel, grid);
  const auto mom = average_momentum(state, kernel, grid);
  const auto vbar = average_velocity(rho, mom, state.mass_total, state.L);
  const double m = state.particle_mass();
  std::vector<double> tc(grid.B, 0.0);
  for (int k = 0; k < grid.B; ++k) {
    const double xk = grid.coarse_node(k);
    double sum = 0.0;
    for (int i = 0; i < state.N; ++i) {
      const double du = state.v[i] - vbar[k];
      sum += du * du * kernel.eval_periodic(xk - state.q[i]);
    }
    tc[k] = -m * sum;
  }
  return tc;
}

double bond_integral(const WindowKernel& kernel, double x_minus_qi,
                     double bond, double L) {
  // Integrand argument at parameter s is a - s*bond with a = x - q_i.
  const double a = x_minus_qi;
  if (kernel.kind == WindowKind::Characteristic) {
    // Exact mean of the kernel over the swept segment.
    const double lo = std::min(a, a - bond), hi = std::max(a, a - bond);
    const double hw = 0.5 * kernel.eta * L;
    const double height = 1.0 / (kernel.eta * L);
    return char_overlap(lo, hi, hw, L) * height / std::abs(bond);
  }
  if (kernel.kind == WindowKind::Trapezoid) {
    // Piecewise-linear kernel: composite midpoint, 64 panels.
    const int n = 64;
    double sum = 0.0;
    for (int p = 0; p < n; ++p) {
      const double s = (p + 0.5) / n;
      sum += kernel.eval_periodic(a - s * bond);
    }
    return sum / n;
  }

  // Gauss-Legendre per smooth piece: split where the segment crosses a
  // kernel kink (triangle apex and support edges), including wrapped images.
  double breaks[16];
  int n_breaks = 0;
  if (kernel.kind != WindowKind::Gaussian) {
    const double hw = 0.5 * kernel.eta * L;
    const double kinks[3] = {0.0, hw, -hw};
    const int n_kinks = kernel.kind == WindowKind::Triangle ? 3 : 2;
    const double* kink = kernel.kind == WindowKind::Triangle ? kinks : kinks + 1;
    for (int c = 0; c < n_kinks; ++c)
      for (int m = -1; m <= 1; ++m) {
        const double s = (a - kink[c] - m * L) / bond;
        if (s > 1e-12 && s < 1.0 - 1e-12) breaks[n_breaks++] = s;
      }
    std::sort(breaks, breaks + n_breaks);
  }

  double sum = 0.0;
  double lo = 0.0;
  for (int piece = 0; piece <= n_breaks; ++piece) {
    const double hi = piece == n_breaks ? 1.0 : breaks[piece];
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    for (int g = 0; g < 8; ++g) {
      const double sp = mid + half * kGlx[g], sm = mid - half * kGlx[g];
      sum += half * kGlw[g] *
             (kernel.eval_periodic(a - sp * bond) + kernel.eval_periodic(a - sm * bond));
    }
    lo = hi;
  }
  return sum;
}

std::vector<double> interaction_stress_exact(const ChainState& state,
                                             const WindowKernel& kernel,
                                             const MesoGrid& grid,
                                             const PotentialSpec& spec) {
  const int N = state.N;
  const double L = state.L;
  const double rcut = spec.cutoff();
  const double reach = kernel.support();

  // Collect interacting pairs once: bond vector and f_ij * (q_j - q_i).
  struct Pair {
    double qi;
    double bond;    // minimal-image q_j - q_i
    double weight;  // f_ij * bond
  };
  std::vector<Pair> pairs;
  pairs.reserve(3 * N);
  for (int i = 0; i < N; ++i) {
    for (int k = 1; k <= 3; ++k) {
      const int j = (i + k) % N;
      const double d = minimal_image(state.q[j] - state.q[i], L);
      const double r = std::abs(d);
      if (r > rcut || r == 0.0) continue;
      const double fij = spec.force_scale * lj_potential_derivative(r, spec) *
                         (d > 0.0 ? 1.0 : -1.0);
      pairs.push_back({state.q[i], d, fij * d});
    }
  }

  std::vector<double> tint(grid.B, 0.0);
  for (int k = 0; k < grid.B; ++k) {
    const double xk = grid.coarse_node(k);
    double sum = 0.0;
    for (const Pair& p : pairs) {
      const double a = minimal_image(xk - p.qi, L);
      if (std::abs(a) > reach + std::abs(p.bond)) continue;  // bond outside support
      sum += p.weight * bond_integral(kernel, a, p.bond, L);
    }
    tint[k] = sum;
  }
  return tint;
}

MesoFields meso_fields(const ChainState& state, const WindowKernel& kernel,
                       const MesoGrid& grid, const PotentialSpec& spec) {
  MesoFields f;
  f.t = state.t;
  f.density = average_density(state, kernel, grid);
  f.momentum = average_momentum(state, kernel, grid);
  f.velocity = average_velocity(f.density, f.momentum, state.mass_total, state.L,
                                &f.floored_nodes);
  f.stress_conv = convective_stress_exact(state, kernel, grid);
  f.stress_int = interaction_stress_exact(state, kernel, grid, spec);
  return f;
}

FineFields exact_recoverables(const ChainState& state, const MesoGrid& grid) {
  const int N = state.N;
  const double L = state.L;

  // Sort particles by position, keeping the original index to check that the
  // spatial order is a rotation of the ring order (no crossings).
  std::vector<int> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return state.q[a] < state.q[b]; });
  for (int i = 0; i + 1 < N; ++i) {
    const int step = (order[i + 1] - order[i] + N) % N;
    if (step != 1 && step != N - 1)
      throw std::runtime_error("exact_recoverables: particles out of ring order");
  }

  std::vector<double> qs(N), vs(N);
  for (int i = 0; i < N; ++i) {
    qs[i] = state.q[order[i]];
    vs[i] = state.v[order[i]];
  }

  const double dx = L / N;
  FineFields fine;
  fine.t = state.t;
  fine.J_exact.resize(grid.Nf);
  fine.v_exact.resize(grid.Nf);
  for (int m = 0; m < grid.Nf; ++m) {
    const double y = grid.fine_node(m);
    // Gap containing y: particles qs[lo] <= y < qs[lo+1] (wrapping).
    int lo = int(std::upper_bound(qs.begin(), qs.end(), y) - qs.begin()) - 1;
    const int i0 = (lo + N) % N;
    const int i1 = (i0 + 1) % N;
    double gap = qs[i1] - qs[i0];
    if (gap <= 0.0) gap += L;
    double dist = y - qs[i0];
    if (dist < 0.0) dist += L;
    fine.J_exact[m] = dx / gap;
    fine.v_exact[m] = vs[i0] + (vs[i1] - vs[i0]) * dist / gap;
  }
  return fine;
}

double mass_balance_residual(const MesoFields& prev, const MesoFields& next,
                             const MesoGrid& grid) {
  if ((int)prev.density.size() != grid.B || (int)next.density.size() != grid.B)
    throw std::invalid_argument("mass_balance_residual: grid mismatch");
  const double dt = next.t - prev.t;
  if (dt <= 0.0)
    throw std::invalid_argument("mass_balance_residual: snapshots out of order");
  const double dx = grid.L / grid.B;
  double worst = 0.0;
  for (int k = 0; k < grid.B; ++k) {
    const int kp = (k + 1) % grid.B, km = (k - 1 + grid.B) % grid.B;
    const double drho = (next.density[k] - prev.density[k]) / dt;
    const double flux_p = 0.5 * (prev.momentum[kp] + next.momentum[kp]);
    const double flux_m = 0.5 * (prev.momentum[km] + next.momentum[km]);
    const double div = (flux_p - flux_m) / (2.0 * dx);
    worst = std::max(worst, std::abs(drho + div));
  }
  return worst;
}

}  // namespace mesochain
