// Discretized averaging operator A^eta, its cached SVD, and filtered
// regularization solves (truncated SVD, Tikhonov, Landweber) with spectral
// filtering of the right-hand side.

#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "mesochain/meso.hpp"
#include "mesochain/windows.hpp"

namespace mesochain {

struct SvdFactors {
  Eigen::VectorXd sigma;  // retained singular values, descending
  Eigen::MatrixXd U;      // left vectors xi_j, B x r
  Eigen::MatrixXd V;      // right vectors xi_hat_j, N' x r

  int rank() const { return static_cast<int>(sigma.size()); }
};

enum class FilterVariant { Tsvd, Tikhonov, Landweber };

struct FilterSpec {
  FilterVariant variant = FilterVariant::Tsvd;
  double sigma_cut = 1e-13;  // TSVD truncation threshold sigma_alpha
  double alpha = 1e-6;       // Tikhonov parameter
  int n = 100;               // Landweber iteration count

  static FilterSpec tsvd(double cut = 1e-13);
  static FilterSpec tikhonov(double alpha);
  static FilterSpec landweber(int n);
};

// A_{k,m} = psi_eta(x_k - y_m) (L/N') with the periodic kernel. Rows sum to
// about one by kernel normalization.
Eigen::MatrixXd assemble_matrix(const WindowKernel& kernel, const MesoGrid& grid);

// Full SVD of a dense B x N' matrix; values below max(drop_below,
// 1e-15 * sigma_1) are dropped from the factors.
SvdFactors compute_svd(const Eigen::MatrixXd& A, double drop_below = 1e-13);

// Filter factor phi(sigma) for the chosen variant.
double filter_factor(const FilterSpec& spec, double sigma);

// Expansion coefficients <b, xi_j> with entries below rhs_tol zeroed.
std::vector<double> spectral_filter_rhs(const std::vector<double>& b,
                                        const SvdFactors& svd, double rhs_tol);

struct ConvolutionSystem {
  Eigen::MatrixXd A;
  MesoGrid grid;
  WindowKernel kernel;
  SvdFactors svd;
  double sigma_cut = 1e-13;
  double rhs_tol = 1e-13;

  ConvolutionSystem(const WindowKernel& kernel_, const MesoGrid& grid_,
                    double sigma_cut_ = 1e-13, double rhs_tol_ = 1e-13);

  int retained_rank() const { return svd.rank(); }
};

// x = sum_j b_j phi(sigma_j)/sigma_j xi_hat_j over the retained values,
// with the right-hand side spectrally filtered first.
std::vector<double> regularized_solve(const ConvolutionSystem& system,
                                      const std::vector<double>& b,
                                      const FilterSpec& filter);

// Process-wide cache: the SVD of a given (kernel, grid) pair is computed once
// and shared by every solve, sweep entry, and time step.
std::shared_ptr<const ConvolutionSystem> cached_system(const WindowKernel& kernel,
                                                       const MesoGrid& grid,
                                                       double sigma_cut = 1e-13,
                                                       double rhs_tol = 1e-13);

}  // namespace mesochain
