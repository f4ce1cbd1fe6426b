// Hardy-Murdoch averages and exact stresses on a coarse grid, exact
// recoverable fields (Jacobian of the inverse deformation map, velocity
// interpolant) on a fine grid, and the mass-balance residual check.

#pragma once

#include <vector>

#include "mesochain/dynamics.hpp"
#include "mesochain/windows.hpp"

namespace mesochain {

struct MesoGrid {
  int B = 0;    // coarse node count, nodes x_k = (k - 1/2) L / B
  int Nf = 0;   // fine node count N', nodes y_m = (m - 1/2) L / Nf
  double L = 1.0;

  MesoGrid(int B_, int Nf_, double L_);

  double coarse_node(int k) const { return (k + 0.5) * L / B; }
  double fine_node(int m) const { return (m + 0.5) * L / Nf; }
};

struct MesoFields {
  double t = 0.0;
  std::vector<double> density;      // rho_bar^eta at the coarse nodes
  std::vector<double> momentum;     // rho_bar^eta v_bar^eta
  std::vector<double> velocity;     // v_bar^eta (floored where density vanishes)
  std::vector<double> stress_conv;  // T^eta_(c), non-positive
  std::vector<double> stress_int;   // T^eta_(int)
  int floored_nodes = 0;            // nodes where the density floor kicked in
};

struct FineFields {
  double t = 0.0;
  std::vector<double> J_exact;  // cell Jacobian Delta x / particle gap
  std::vector<double> v_exact;  // piecewise-linear velocity interpolant
};

std::vector<double> average_density(const ChainState& state,
                                    const WindowKernel& kernel,
                                    const MesoGrid& grid);

std::vector<double> average_momentum(const ChainState& state,
                                     const WindowKernel& kernel,
                                     const MesoGrid& grid);

// momentum/density with a floor of 1e-10 * (M/L) on the density; nodes below
// the floor report velocity 0 and are counted in *floored.
std::vector<double> average_velocity(const std::vector<double>& density,
                                     const std::vector<double>& momentum,
                                     double mass_total, double L,
                                     int* floored = nullptr);

// T_c(x_k) = -sum_i (M/N) (v_i - vbar(x_k))^2 psi_eta(x_k - q_i)
std::vector<double> convective_stress_exact(const ChainState& state,
                                            const WindowKernel& kernel,
                                            const MesoGrid& grid);

// T_int(x_k) = sum over interacting pairs of f_ij (q_j - q_i) times the bond
// line integral of psi_eta. Quadrature: exact segment overlap for the
// characteristic kernel, composite midpoint for the trapezoid, 16-point
// Gauss-Legendre otherwise.
std::vector<double> interaction_stress_exact(const ChainState& state,
                                             const WindowKernel& kernel,
                                             const MesoGrid& grid,
                                             const PotentialSpec& spec);

// Bond integral int_0^1 psi_eta(s(x-qj) + (1-s)(x-qi)) ds, exposed for the
// quadrature oracle tests.
double bond_integral(const WindowKernel& kernel, double x_minus_qi,
                     double bond, double L);

// All five coarse fields at once (shares the kernel sums).
MesoFields meso_fields(const ChainState& state, const WindowKernel& kernel,
                       const MesoGrid& grid, const PotentialSpec& spec);

// J and v on the fine grid from the particle gaps; throws if the particles
// are not in ring order.
FineFields exact_recoverables(const ChainState& state, const MesoGrid& grid);

// l-inf of (rho(t+dt) - rho(t))/dt + D_x[(mom(t) + mom(t+dt))/2] with the
// centered periodic difference D_x.
double mass_balance_residual(const MesoFields& prev, const MesoFields& next,
                             const MesoGrid& grid);

}  // namespace mesochain
