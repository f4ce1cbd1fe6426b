// Averaging window functions psi^(1)..psi^(6) and their eta-scaled forms.
// The six shapes range from the discontinuous characteristic function to the
// Gaussian; all have unit mass and (except the Gaussian) compact support.

#pragma once

#include <string>

namespace mesochain {

enum class WindowKind {
  Characteristic,  // psi^(1): 1/L on |x| <= L/2
  Trapezoid,       // psi^(2): plateau 1/(2L), feet at +-3L/2
  Triangle,        // psi^(3): hat with apex 2/L
  Quadratic,       // psi^(4): truncated parabola
  Quartic,         // psi^(5): (x^2 - L^2/4)^2 bump
  Gaussian         // psi^(6): std dev L/6, fast decreasing
};

constexpr int kWindowCount = 6;

const char* window_name(WindowKind kind);
WindowKind window_from_name(const std::string& name);

// Unscaled kernel value psi^(kind)(x). Compact kernels are zero outside
// their support; the Gaussian is the plain closed form (its tails carry
// about 0.2% of the mass beyond |x| = L/2).
double eval_window(WindowKind kind, double x, double L);

// Half-width of the support of the unscaled kernel (3L/2 for the trapezoid,
// L/2 for the other compact kernels). The Gaussian reports the 12-sigma
// radius 2L beyond which its value is below 1e-31 of the peak.
double window_support(WindowKind kind, double L);

struct WindowKernel {
  WindowKind kind;
  double L;
  double eta;

  WindowKernel(WindowKind kind_, double L_, double eta_);

  // psi_eta(x) = (1/eta) psi(x/eta)
  double eval_scaled(double x) const;

  // Periodic kernel on the circle of circumference L: sum of eval_scaled
  // over the nearest images of x. Needed for the trapezoid at eta > 1/3
  // and for the Gaussian at large eta, where the scaled support exceeds
  // the half-period.
  double eval_periodic(double x) const;

  // Half-width of the scaled support (used by callers to prune sums).
  double support() const;
};

struct ConditionReport {
  bool non_negative = false;
  bool unit_mass = false;
  bool decays_at_infinity = false;
  bool strict_max_at_zero = false;
};

// Checks the admissibility conditions by dense sampling plus quadrature:
// non-negativity, unit mass, decay at infinity, strict maximum at x = 0.
// The characteristic and trapezoid kernels fail the last one (plateaus).
ConditionReport verify_conditions(WindowKind kind);

// Composite-Simpson mass of the unscaled kernel over [-window_support, +],
// used by verify_conditions and the unit tests.
double window_mass(WindowKind kind, double L);

}  // namespace mesochain
