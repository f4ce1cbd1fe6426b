// Closure by reinsertion: deconvolve the averages into approximate Jacobian
// and velocity fields, rebuild a particle configuration from them, and feed
// it back through the exact stress formulas (the R_eta S Q_eta sandwich).

#pragma once

#include <vector>

#include "mesochain/meso.hpp"
#include "mesochain/regularize.hpp"

namespace mesochain {

struct ReconstructedFields {
  double t = 0.0;
  std::vector<double> J_approx;     // fine grid, clamped at the positivity floor
  std::vector<double> v_approx;     // fine grid
  std::vector<double> q_approx;     // N reconstructed positions in [0, L)
  std::vector<double> v_particles;  // velocities at the reconstructed positions
  double clamp_fraction = 0.0;      // fraction of fine nodes hit by the floor
};

// J ~ (L/M) Q_eta[rho_bar], clamped below at 1e-6. Throws when more than 10%
// of the nodes needed clamping (degenerate reconstruction).
std::vector<double> reconstruct_jacobian(const ConvolutionSystem& system,
                                         const std::vector<double>& density,
                                         const FilterSpec& filter,
                                         double mass_total = 1.0,
                                         double* clamp_fraction = nullptr);

// v ~ Q_eta[rho_bar v_bar] / Q_eta[rho_bar] with the same floor on the
// denominator.
std::vector<double> reconstruct_velocity(const ConvolutionSystem& system,
                                         const std::vector<double>& density,
                                         const std::vector<double>& momentum,
                                         const FilterSpec& filter,
                                         double mass_total = 1.0);

// Cumulative-mass inversion: C(y) = int_0^y J, trapezoid on the fine grid;
// q_i solves C(q_i) = (i - 1/2) C(L) / N. The anchor C(0) = 0 fixes the
// circular phase at y = 0.
std::vector<double> positions_from_jacobian(const std::vector<double>& J_approx,
                                            int N, double L);

// Periodic linear interpolation of the fine-grid velocity at each
// reconstructed position.
std::vector<double> particle_velocities(const std::vector<double>& v_approx,
                                        const std::vector<double>& q_approx,
                                        double L);

// Exact stress formulas evaluated on the reconstructed particle set,
// including recomputing v_bar^eta from it. Returns (T_c, T_int).
std::pair<std::vector<double>, std::vector<double>> approximate_stresses(
    const std::vector<double>& q_approx, const std::vector<double>& v_particles,
    const WindowKernel& kernel, const MesoGrid& grid, const PotentialSpec& spec,
    double mass_total = 1.0);

// Full reconstruction from one set of averages.
ReconstructedFields reconstruct_fields(const ConvolutionSystem& system,
                                       const std::vector<double>& density,
                                       const std::vector<double>& momentum,
                                       const FilterSpec& filter, double t,
                                       int N, double mass_total = 1.0);

}  // namespace mesochain
