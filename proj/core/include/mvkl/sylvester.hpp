#pragma once

#include "mvkl/common.hpp"
#include "mvkl/kernels.hpp"

#include <utility>

namespace mvkl {

struct CgReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  bool converged = false;
  /// Instance condition bound 1 + sigma_1(K_eta) rho_1(L) / (lambda l),
  /// estimated from sum_j eta_j sigma_1(K_j) and the top eigenvalue of L.
  double condition_bound = 0.0;
};

/// Exact solve of K C L + lambda_l C = Y through the eigendecompositions
/// K = T diag(sigma) T^T, L = S diag(rho) S^T:
/// C = T Xt S^T with Xt_ij = (T^T Y S)_ij / (sigma_i rho_j + lambda_l).
Matrix solve_sylvester_eig(const Matrix& k, const Matrix& l_mat,
                           double lambda_l, const Matrix& y);

/// Conjugate gradient on the operator M -> K_eta M L + lambda_l M in the
/// l x n matrix space with the Frobenius inner product. Never materializes
/// the nl x nl system; each iteration costs one weighted Gram apply plus one
/// n x n multiplication per operand. Stops when the relative residual
/// against ||Y||_F drops below eps, or at max_iter.
std::pair<Matrix, CgReport> solve_sylvester_cg(
    const GramSet& gs, const Vector& eta, const Matrix& l_mat,
    double lambda_l, const Matrix& y, const Matrix& c0, double eps,
    int max_iter);

/// phi = 1 + sigma*_1 tau / (l lambda).
double condition_bound(double sigma_star, double tau, int sample_count,
                       double lambda);

}  // namespace mvkl
