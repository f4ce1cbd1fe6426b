#include "mesochain/windows.hpp"

#include <cmath>
#include <stdexcept>

namespace mesochain {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

const char* window_name(WindowKind kind) {
  switch (kind) {
    case WindowKind::Characteristic: return "char";
    case WindowKind::Trapezoid: return "trapezoid";
    case WindowKind::Triangle: return "triangle";
    case WindowKind::Quadratic: return "quadratic";
    case WindowKind::Quartic: return "quartic";
    case WindowKind::Gaussian: return "gaussian";
  }
  throw std::logic_error("window_name: bad kind");
}

WindowKind window_from_name(const std::string& name) {
  if (name == "char") return WindowKind::Characteristic;
  if (name == "trapezoid") return WindowKind::Trapezoid;
  if (name == "triangle") return WindowKind::Triangle;
  if (name == "quadratic") return WindowKind::Quadratic;
  if (name == "quartic") return WindowKind::Quartic;
  if (name == "gaussian") return WindowKind::Gaussian;
  throw std::invalid_argument("unknown window kind: " + name);
}

double eval_window(WindowKind kind, double x, double L) {
  if (L <= 0.0) throw std::invalid_argument("eval_window: L must be positive");
  const double ax = std::abs(x);
  switch (kind) {
    case WindowKind::Characteristic:
      return ax <= 0.5 * L ? 1.0 / L : 0.0;
    case WindowKind::Trapezoid:
      // Plateau 1/(2L) on |x| <= L/2 falling linearly to zero at |x| = 3L/2.
      // The paper's printed wing slope is dimensionally inconsistent; this is
      // the unit-mass trapezoid with the stated plateau value.
      if (ax <= 0.5 * L) return 0.5 / L;
      if (ax <= 1.5 * L) return (1.5 * L - ax) / (2.0 * L * L);
      return 0.0;
    case WindowKind::Triangle:
      return ax <= 0.5 * L ? (4.0 / (L * L)) * (0.5 * L - ax) : 0.0;
    case WindowKind::Quadratic:
      return ax < 0.5 * L ? -(6.0 / (L * L * L)) * (x * x - 0.25 * L * L) : 0.0;
    case WindowKind::Quartic: {
      if (ax > 0.5 * L) return 0.0;
      const double b = x * x - 0.25 * L * L;
      return (30.0 / std::pow(L, 5)) * b * b;
    }
    case WindowKind::Gaussian:
      return (6.0 / (L * std::sqrt(2.0 * kPi))) * std::exp(-18.0 * x * x / (L * L));
  }
  throw std::logic_error("eval_window: bad kind");
}

double window_support(WindowKind kind, double L) {
  switch (kind) {
    case WindowKind::Trapezoid: return 1.5 * L;
    case WindowKind::Gaussian: return 2.0 * L;  // 12 sigma, value < 1e-31 peak
    default: return 0.5 * L;
  }
}

WindowKernel::WindowKernel(WindowKind kind_, double L_, double eta_)
    : kind(kind_), L(L_), eta(eta_) {
  if (L <= 0.0) throw std::invalid_argument("WindowKernel: L must be positive");
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("WindowKernel: eta must lie in (0, 1)");
}

double WindowKernel::eval_scaled(double x) const {
  return eval_window(kind, x / eta, L) / eta;
}

double WindowKernel::support() const {
  return eta * window_support(kind, L);
}

double WindowKernel::eval_periodic(double x) const {
  double xw = x - L * std::round(x / L);  // minimal image, |xw| <= L/2
  const double rad = support();
  if (rad <= 0.5 * L) return eval_scaled(xw);
  // Scaled support exceeds the half-period: accumulate wrapped images.
  double val = 0.0;
  for (int m = -2; m <= 2; ++m) {
    const double u = xw + m * L;
    if (std::abs(u) <= rad) val += eval_scaled(u);
  }
  return val;
}

double window_mass(WindowKind kind, double L) {
  // Composite Simpson with 2^17 panels over the (symmetric) support.
  const double a = window_support(kind, L);
  const int n = 1 << 17;
  const double step = 2.0 * a / n;
  double sum = eval_window(kind, -a, L) + eval_window(kind, a, L);
  for (int i = 1; i < n; ++i)
    sum += eval_window(kind, -a + i * step, L) * (i % 2 ? 4.0 : 2.0);
  return sum * step / 3.0;
}

ConditionReport verify_conditions(WindowKind kind) {
  const double L = 1.0;
  ConditionReport rep;

  const double rad = window_support(kind, L);
  const int samples = 4000;
  bool nonneg = true;
  for (int i = 0; i <= samples; ++i) {
    const double x = -2.0 * rad + 4.0 * rad * i / samples;
    if (eval_window(kind, x, L) < 0.0) nonneg = false;
  }
  rep.non_negative = nonneg;

  const double mass = window_mass(kind, L);
  const double tol = kind == WindowKind::Gaussian ? 2.5e-3 : 1e-10;
  rep.unit_mass = std::abs(mass - 1.0) <= tol;

  // Decay: value beyond twice the support radius must be negligible.
  rep.decays_at_infinity =
      std::abs(eval_window(kind, 2.0 * rad + 0.25 * L, L)) <= 1e-12 &&
      std::abs(eval_window(kind, -2.0 * rad - 0.25 * L, L)) <= 1e-12;

  // Strict maximum at 0: every sample away from the origin must lie strictly
  // below psi(0). Plateaus (characteristic, trapezoid) fail.
  const double p0 = eval_window(kind, 0.0, L);
  bool strict = p0 > 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double x = rad * i / samples;
    if (eval_window(kind, x, L) >= p0 - 1e-9 * p0) strict = false;
    if (eval_window(kind, -x, L) >= p0 - 1e-9 * p0) strict = false;
  }
  rep.strict_max_at_zero = strict;
  return rep;
}

}  // namespace mesochain
