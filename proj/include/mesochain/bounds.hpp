// Analytical error bounds: the L^p filtered-regularization estimates built on
// a singular-value interpolant, and the interaction-stress bound
// sup|psi_eta| sup|Phi| (2M ||J-Q||_1 + ||J-Q||_1^2).

#pragma once

#include <vector>

#include "mesochain/dynamics.hpp"
#include "mesochain/regularize.hpp"
#include "mesochain/windows.hpp"

namespace mesochain {

// Continuous strictly-decreasing f with f(0) = 1 and f(j) = sigma_j,
// piecewise linear in log(sigma), extended past t = D by continuing the last
// log-slope. Equal neighboring values are nudged apart by one part in 1e14
// to keep f strictly decreasing.
class SingularInterpolant {
 public:
  explicit SingularInterpolant(const std::vector<double>& sigma);

  double operator()(double t) const;
  int terms() const { return static_cast<int>(log_values_.size()) - 1; }

 private:
  std::vector<double> log_values_;  // log f at t = 0, 1, ..., D
  double tail_slope_ = 0.0;
};

struct BoundInputs {
  SvdFactors svd;
  FilterSpec filter;
  double p = 2.0;          // norm exponent in [1, inf)
  double q = 2.0;          // Hoelder exponent > 1 (holder_error_bound only)
  double x_inf = 0.0;      // ||x||_inf
  double delta_inf = 0.0;  // ||b - b^delta||_inf
  std::vector<double> x;      // solution vector (holder_error_bound)
  std::vector<double> delta;  // b - b^delta (holder_error_bound)
};

// C1 = D^{max(0, 1 - 1/p)} max_j ||xi_hat_j||_p, valid by the triangle and
// Hoelder inequalities applied to sum a_j xi_hat_j.
double bound_constant(const SvdFactors& svd, double p);

// L^p(0, D+1) norm of g(f(t)) on the interpolant; g is either
// t -> |1 - phi(f(t))| or t -> |phi(f(t))/f(t)| depending on `noise_term`.
double filter_lp_norm(const SingularInterpolant& f, const FilterSpec& filter,
                      double p, bool noise_term);

// Eq.-style estimate C1 (x_inf ||1 - phi o f||_p + delta_inf ||phi o f / f||_p).
// Returns +inf if the integrand is not finite.
double filtered_error_bound(const BoundInputs& inputs);

// Hoelder variant with exponents (pq, pq') and vector norms of x and delta.
double holder_error_bound(const BoundInputs& inputs);

// sup over a 1e5-point grid of |U'(r) r| on [r_min, r_max].
double phi_sup(const PotentialSpec& spec, double r_min, double r_max);

// Interaction-stress bound. ||J - Q||_1 is the discrete L1(Omega) norm
// (L/N' weighted). r_min <= 0 derives the shell radius from J itself as
// 0.95 L / (N' max J); the upper radius is the force cutoff.
double interaction_stress_bound(const std::vector<double>& J,
                                const std::vector<double>& Q,
                                const WindowKernel& kernel,
                                const PotentialSpec& spec, double M_bound,
                                double r_min = 0.0);

}  // namespace mesochain
