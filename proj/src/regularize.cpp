#include "mesochain/regularize.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace mesochain {

FilterSpec FilterSpec::tsvd(double cut) {
  FilterSpec s;
  s.variant = FilterVariant::Tsvd;
  s.sigma_cut = cut;
  return s;
}

FilterSpec FilterSpec::tikhonov(double alpha) {
  FilterSpec s;
  s.variant = FilterVariant::Tikhonov;
  s.alpha = alpha;
  return s;
}

FilterSpec FilterSpec::landweber(int n) {
  FilterSpec s;
  s.variant = FilterVariant::Landweber;
  s.n = n;
  return s;
}

Eigen::MatrixXd assemble_matrix(const WindowKernel& kernel, const MesoGrid& grid) {
  if (std::abs(kernel.L - grid.L) > 1e-12 * grid.L)
    throw std::invalid_argument("assemble_matrix: kernel and grid box length differ");
  Eigen::MatrixXd A(grid.B, grid.Nf);
  const double weight = grid.L / grid.Nf;
  for (int k = 0; k < grid.B; ++k) {
    const double xk = grid.coarse_node(k);
    for (int m = 0; m < grid.Nf; ++m)
      A(k, m) = kernel.eval_periodic(xk - grid.fine_node(m)) * weight;
  }
  return A;
}

SvdFactors compute_svd(const Eigen::MatrixXd& A, double drop_below) {
  if (!A.allFinite()) throw std::invalid_argument("compute_svd: matrix has non-finite entries");
  Eigen::BDCSVD<Eigen::MatrixXd> svd;
  svd.compute(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "compute_svd: factorization failed for " << A.rows() << "x" << A.cols()
        << " matrix";
    throw std::runtime_error(msg.str());
  }
  const Eigen::VectorXd& s = svd.singularValues();
  const double cut = std::max(drop_below, 1e-15 * s(0));
  int r = 0;
  while (r < s.size() && s(r) > cut) ++r;
  if (r == 0) throw std::runtime_error("compute_svd: no singular value above the cutoff");
  SvdFactors out;
  out.sigma = s.head(r);
  out.U = svd.matrixU().leftCols(r);
  out.V = svd.matrixV().leftCols(r);
  return out;
}

double filter_factor(const FilterSpec& spec, double sigma) {
  switch (spec.variant) {
    case FilterVariant::Tsvd:
      return sigma >= spec.sigma_cut ? 1.0 : 0.0;
    case FilterVariant::Tikhonov:
      if (spec.alpha < 0.0) throw std::invalid_argument("filter_factor: alpha < 0");
      return sigma * sigma / (sigma * sigma + spec.alpha);
    case FilterVariant::Landweber:
      if (spec.n < 0) throw std::invalid_argument("filter_factor: n < 0");
      return 1.0 - std::pow(1.0 - sigma * sigma, spec.n + 1);
  }
  throw std::logic_error("filter_factor: bad variant");
}

std::vector<double> spectral_filter_rhs(const std::vector<double>& b,
                                        const SvdFactors& svd, double rhs_tol) {
  if ((int)b.size() != svd.U.rows())
    throw std::invalid_argument("spectral_filter_rhs: rhs length mismatch");
  Eigen::Map<const Eigen::VectorXd> bv(b.data(), b.size());
  Eigen::VectorXd c = svd.U.transpose() * bv;
  std::vector<double> out(c.size());
  for (int j = 0; j < c.size(); ++j)
    out[j] = std::abs(c(j)) < rhs_tol ? 0.0 : c(j);
  return out;
}

ConvolutionSystem::ConvolutionSystem(const WindowKernel& kernel_,
                                     const MesoGrid& grid_, double sigma_cut_,
                                     double rhs_tol_)
    : A(assemble_matrix(kernel_, grid_)),
      grid(grid_),
      kernel(kernel_),
      sigma_cut(sigma_cut_),
      rhs_tol(rhs_tol_) {
  svd = compute_svd(A, sigma_cut);
  const auto fail = [&](const std::string& what) {
    std::ostringstream msg;
    msg << "ConvolutionSystem(" << window_name(kernel.kind) << ", eta=" << kernel.eta
        << ", B=" << grid.B << ", Nf=" << grid.Nf << "): " << what;
    throw std::runtime_error(msg.str());
  };
  if (svd.sigma(0) > 1.0 + 1e-6) fail("singular values exceed 1");
  const int r = svd.rank();
  const double ortho_u = (svd.U.transpose() * svd.U -
                          Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  const double ortho_v = (svd.V.transpose() * svd.V -
                          Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff();
  if (ortho_u > 1e-10 || ortho_v > 1e-10) fail("singular vectors not orthonormal");
  const double resid =
      (A * svd.V - svd.U * svd.sigma.asDiagonal()).cwiseAbs().maxCoeff();
  if (resid > 1e-10) fail("SVD residual above tolerance");
}

std::vector<double> regularized_solve(const ConvolutionSystem& system,
                                      const std::vector<double>& b,
                                      const FilterSpec& filter) {
  const std::vector<double> coeffs = spectral_filter_rhs(b, system.svd, system.rhs_tol);
  Eigen::VectorXd scaled(system.svd.rank());
  for (int j = 0; j < system.svd.rank(); ++j) {
    const double sj = system.svd.sigma(j);
    scaled(j) = coeffs[j] * filter_factor(filter, sj) / sj;
  }
  Eigen::VectorXd x = system.svd.V * scaled;
  return std::vector<double>(x.data(), x.data() + x.size());
}

std::shared_ptr<const ConvolutionSystem> cached_system(const WindowKernel& kernel,
                                                       const MesoGrid& grid,
                                                       double sigma_cut,
                                                       double rhs_tol) {
  static std::mutex mutex;
  static std::map<std::string, std::shared_ptr<const ConvolutionSystem>> cache;
  std::ostringstream key;
  key << window_name(kernel.kind) << '|' << kernel.eta << '|' << kernel.L << '|'
      << grid.B << '|' << grid.Nf << '|' << sigma_cut << '|' << rhs_tol;
  {
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key.str());
    if (it != cache.end()) return it->second;
  }
  auto system = std::make_shared<const ConvolutionSystem>(kernel, grid, sigma_cut, rhs_tol);
  std::lock_guard<std::mutex> lock(mutex);
  return cache.emplace(key.str(), system).first->second;
}

}  // namespace mesochain
