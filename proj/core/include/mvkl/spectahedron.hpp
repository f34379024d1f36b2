#pragma once

#include "mvkl/common.hpp"

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace mvkl {

/// Symmetric PSD output kernel with trace budget tau.
struct OutputKernel {
  Matrix l;
  double tau = 1.0;

  /// Spectahedron membership: symmetry within 1e-10, min eigenvalue
  /// >= -1e-8 max(1, sigma_1), trace <= tau (1 + 1e-8).
  void validate() const;
};

struct FwConfig {
  int max_iter = 500;
  /// Curvature estimate C_g scheduling the eigensolver precision C_g / k^2;
  /// <= 0 derives (2/l) tau^2 sigma_1(A^T A) from the instance.
  double curvature = 0.0;
  double stop_tolerance = 1e-9;
  double eig_tol_floor = 1e-10;
  std::uint64_t seed = 13;
};

/// g(L) = (1/l) ||A L - Y||_F^2 + lambda tr(B^T L).
double l_objective(const Matrix& a, const Matrix& b, const Matrix& y,
                   const Matrix& l_mat, double lambda, int sample_count);

/// Gradient of l_objective on the symmetric subspace:
/// sym((2/l) A^T (A L - Y) + lambda B).
Matrix l_gradient(const Matrix& a, const Matrix& b, const Matrix& y,
                  const Matrix& l_mat, double lambda, int sample_count);

/// Approximate extremal eigenpair: unit v with v^T M v <= lambda_min(M) + eps.
/// Shifted power iteration; the shift is a Gershgorin upper bound on
/// lambda_max(M) and the start vector is seeded deterministically.
std::pair<Vector, double> approx_min_eigvec(const Matrix& m, double eps,
                                            std::uint64_t seed = 13);

/// Minimizer of g(L_k + alpha P) over [0, 1] in closed form; returns 0 when
/// the quadratic coefficient falls below 1e-14.
double exact_line_search(const Matrix& a, const Matrix& b, const Matrix& y,
                         double lambda, int sample_count, const Matrix& l_k,
                         const Matrix& p);

struct FwResult {
  OutputKernel kernel;
  std::vector<double> objective_trace;  // g at L0 and after every step
  int iterations = 0;
  double fw_gap = 0.0;
};

using FwObserver = std::function<void(const Matrix& l_iterate, double g)>;

/// Bounded-trace Frank-Wolfe on min g(L) over the spectahedron S^n_+(tau):
/// L <- L + alpha (tau v v^T - L) with v the approximate minimal eigenvector
/// of the gradient (replaced by the zero atom when the smallest eigenvalue is
/// positive) and alpha from exact line search. Every iterate stays in the
/// spectahedron; g never increases along accepted steps.
FwResult solve_l(const Matrix& a, const Matrix& b, const Matrix& y,
                 double lambda, double tau, int sample_count,
                 const OutputKernel& l0, const FwConfig& cfg,
                 const FwObserver& observer = {});

/// ceil(16 (tau sigma*_1)^2 / eps) iterations for eps/2 suboptimality.
std::int64_t hazan_iteration_bound(double tau, double sigma_star, double eps);

}  // namespace mvkl
