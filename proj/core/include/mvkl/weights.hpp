#pragma once

#include "mvkl/common.hpp"
#include "mvkl/kernels.hpp"

namespace mvkl {

enum class PenaltyKind { Lp, Elastic };

/// Dictionary-norm penalty: squared l_p norm of the component RKHS norms
/// (p in [1, 2]), or the elastic combination (1-mu) l_1 + mu l_2^2.
struct Penalty {
  PenaltyKind kind = PenaltyKind::Lp;
  double p = 1.0;   // Lp
  double mu = 0.5;  // Elastic

  static Penalty lp(double p);
  static Penalty elastic(double mu);
};

/// q = p / (2 - p); p = 2 maps to +infinity.
double q_exponent(double p);

/// Component RKHS norms alpha_j = eta_prev_j sqrt(max(0, tr(C^T K_j C L))).
Vector component_norms(const Matrix& c, const GramSet& gs, const Matrix& l_mat,
                       const Vector& eta_prev);

/// Minimizer of sum_j alpha_j^2 / eta_j over {eta >= 0, sum eta^q <= 1} with
/// q = p/(2-p): eta_j = alpha_j^{2/(q+1)} / (sum_k alpha_k^{2q/(q+1)})^{1/q}.
/// Zero norms keep zero weight; q = infinity gives 1 on active coordinates;
/// an all-zero alpha returns the uniform feasible point.
Vector update_eta_lp(const Vector& alpha, double p);

/// Elastic-net update eta_j = alpha_j / (1 - mu + mu alpha_j), mu in [0, 1].
Vector update_eta_elastic(const Vector& alpha, double mu);

/// eta_j <- max(eta_j, eps_eta).
Vector smooth_eta(Vector eta, double eps_eta = 1e-8);

/// Regularizer value on a vector of component norms: squared l_p norm, or
/// (1-mu) sum |n_j| + mu sum n_j^2 for the elastic penalty.
double penalty_value(const Vector& norms, const Penalty& penalty);

/// Membership in the variational constraint set, with tolerance tol on the
/// l_q budget (sup-norm budget when q is infinite).
bool eta_feasible(const Vector& eta, const Penalty& penalty, double tol = 1e-8);

}  // namespace mvkl
