#include "mesochain/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mesochain {

namespace {
// 32-point Gauss-Legendre nodes/weights on [-1, 1] (positive half).
constexpr double kGlx[16] = {
    0.0483076656877383, 0.1444719615827965, 0.2392873622521371,
    0.3318686022821277, 0.4213512761306353, 0.5068999089322294,
    0.5877157572407623, 0.6630442669302152, 0.7321821187402897,
    0.7944837959679424, 0.8493676137325700, 0.8963211557660521,
    0.9349060759377397, 0.9647622555875064, 0.9856115115452684,
    0.9972638618494816};
constexpr double kGlw[16] = {
    0.0965400885147278, 0.0956387200792749, 0.0938443990808046,
    0.0911738786957639, 0.0876520930044038, 0.0833119242269467,
    0.0781938957870703, 0.0723457941088485, 0.0658222227763618,
    0.0586840934785355, 0.0509980592623762, 0.0428358980222267,
    0.0342738629130214, 0.0253920653092621, 0.0162743947309057,
    0.0070186100094701};

double integrate_segment(const SingularInterpolant& f, const FilterSpec& filter,
                         double p, bool noise_term, double a, double b) {
  double sum = 0.0;
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  for (int g = 0; g < 16; ++g) {
    for (double sign : {-1.0, 1.0}) {
      const double t = mid + sign * half * kGlx[g];
      const double ft = f(t);
      const double phi = filter_factor(filter, ft);
      const double val = noise_term ? std::abs(phi / ft) : std::abs(1.0 - phi);
      sum += kGlw[g] * half * std::pow(val, p);
    }
  }
  return sum;
}
}  // namespace

SingularInterpolant::SingularInterpolant(const std::vector<double>& sigma) {
  if (sigma.empty()) throw std::invalid_argument("SingularInterpolant: empty spectrum");
  log_values_.reserve(sigma.size() + 1);
  log_values_.push_back(0.0);  // f(0) = 1
  for (double s : sigma) {
    if (s <= 0.0) throw std::invalid_argument("SingularInterpolant: sigma must be positive");
    double lv = std::log(s);
    if (lv >= log_values_.back()) lv = log_values_.back() - 1e-14;  // enforce strict decrease
    log_values_.push_back(lv);
  }
  const std::size_t d = log_values_.size() - 1;
  tail_slope_ = d >= 2 ? log_values_[d] - log_values_[d - 1]
                       : log_values_[1] - log_values_[0];
}

double SingularInterpolant::operator()(double t) const {
  if (t < 0.0) throw std::invalid_argument("SingularInterpolant: t must be non-negative");
  const int d = terms();
  if (t >= d) return std::exp(log_values_[d] + (t - d) * tail_slope_);
  const int j = static_cast<int>(t);
  const double w = t - j;
  return std::exp(log_values_[j] + w * (log_values_[j + 1] - log_values_[j]));
}

double bound_constant(const SvdFactors& svd, double p) {
  if (p < 1.0) throw std::invalid_argument("bound_constant: p must be >= 1");
  double max_norm = 0.0;
  for (int j = 0; j < svd.rank(); ++j) {
    const double norm = std::pow(svd.V.col(j).cwiseAbs().array().pow(p).sum(), 1.0 / p);
    max_norm = std::max(max_norm, norm);
  }
  return std::pow(double(svd.rank()), std::max(0.0, 1.0 - 1.0 / p)) * max_norm;
}

double filter_lp_norm(const SingularInterpolant& f, const FilterSpec& filter,
                      double p, bool noise_term) {
  const int d = f.terms();
  double integral = 0.0;
  for (int seg = 0; seg <= d; ++seg) {
    double a = seg, b = seg + 1;
    // The TSVD factor jumps where f crosses sigma_cut; split the segment
    // there so the quadrature only ever sees smooth pieces.
    if (filter.variant == FilterVariant::Tsvd) {
      const double fa = f(a), fb = f(b);
      if ((fa - filter.sigma_cut) * (fb - filter.sigma_cut) < 0.0) {
        const double slope = std::log(fb) - std::log(fa);
        const double tc = a + (std::log(filter.sigma_cut) - std::log(fa)) / slope;
        integral += integrate_segment(f, filter, p, noise_term, a, tc);
        a = tc;
      }
    }
    integral += integrate_segment(f, filter, p, noise_term, a, b);
  }
  if (!std::isfinite(integral)) return std::numeric_limits<double>::infinity();
  return std::pow(integral, 1.0 / p);
}

double filtered_error_bound(const BoundInputs& in) {
  if (in.p < 1.0) throw std::invalid_argument("filtered_error_bound: p must be >= 1");
  std::vector<double> sigma(in.svd.sigma.data(), in.svd.sigma.data() + in.svd.rank());
  const SingularInterpolant f(sigma);
  const double c1 = bound_constant(in.svd, in.p);
  const double approx_term = filter_lp_norm(f, in.filter, in.p, false);
  const double noise_term = filter_lp_norm(f, in.filter, in.p, true);
  return c1 * (in.x_inf * approx_term + in.delta_inf * noise_term);
}

namespace {
double vector_pnorm(const std::vector<double>& v, double p) {
  double sum = 0.0;
  for (double x : v) sum += std::pow(std::abs(x), p);
  return std::pow(sum, 1.0 / p);
}
}  // namespace

double holder_error_bound(const BoundInputs& in) {
  if (in.q <= 1.0) throw std::invalid_argument("holder_error_bound: q must exceed 1");
  const double qp = in.q / (in.q - 1.0);
  std::vector<double> sigma(in.svd.sigma.data(), in.svd.sigma.data() + in.svd.rank());
  const SingularInterpolant f(sigma);
  const double c2 = bound_constant(in.svd, in.p);
  const double approx_term = filter_lp_norm(f, in.filter, in.p * qp, false);
  const double noise_term = filter_lp_norm(f, in.filter, in.p * qp, true);
  return c2 * (vector_pnorm(in.x, in.p * in.q) * approx_term +
               vector_pnorm(in.delta, in.p * in.q) * noise_term);
}

double phi_sup(const PotentialSpec& spec, double r_min, double r_max) {
  if (!(0.0 < r_min && r_min <= r_max))
    throw std::invalid_argument("phi_sup: need 0 < r_min <= r_max");
  const int n = 100000;
  double sup = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double r = r_min + (r_max - r_min) * i / n;
    sup = std::max(sup, std::abs(lj_potential_derivative(r, spec) * r));
  }
  return sup;
}

double interaction_stress_bound(const std::vector<double>& J,
                                const std::vector<double>& Q,
                                const WindowKernel& kernel,
                                const PotentialSpec& spec, double M_bound,
                                double r_min) {
  if (J.size() != Q.size())
    throw std::invalid_argument("interaction_stress_bound: size mismatch");
  const double jmax = *std::max_element(J.begin(), J.end());
  if (M_bound < jmax)
    throw std::invalid_argument("interaction_stress_bound: M_bound below max(J)");
  const double L = kernel.L;
  const int nf = static_cast<int>(J.size());
  if (r_min <= 0.0) r_min = 0.95 * L / (nf * jmax);
  double l1 = 0.0;
  for (int m = 0; m < nf; ++m) l1 += std::abs(J[m] - Q[m]);
  l1 *= L / nf;
  const double psi_sup = kernel.eval_periodic(0.0);
  const double fi_sup = phi_sup(spec, r_min, spec.cutoff());
  return psi_sup * fi_sup * (2.0 * M_bound * l1 + l1 * l1);
}

}  // namespace mesochain
