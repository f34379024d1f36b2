#include "mvkl/weights.hpp"

#include <cmath>
#include <limits>

namespace mvkl {

Penalty Penalty::lp(double p) {
  check_input(p >= 1.0 && p <= 2.0, "Penalty::lp: p must be in [1, 2]");
  Penalty pen;
  pen.kind = PenaltyKind::Lp;
  pen.p = p;
  return pen;
}

Penalty Penalty::elastic(double mu) {
  check_input(mu >= 0.0 && mu <= 1.0, "Penalty::elastic: mu must be in [0, 1]");
  Penalty pen;
  pen.kind = PenaltyKind::Elastic;
  pen.mu = mu;
  return pen;
}

double q_exponent(double p) {
  check_input(p >= 1.0 && p <= 2.0, "q_exponent: p must be in [1, 2]");
  if (p == 2.0) return std::numeric_limits<double>::infinity();
  return p / (2.0 - p);
}

Vector component_norms(const Matrix& c, const GramSet& gs, const Matrix& l_mat,
                       const Vector& eta_prev) {
  const Index m = gs.size();
  check_input(eta_prev.size() == m, "component_norms: eta size mismatch");
  check_input(eta_prev.minCoeff() >= 0.0, "component_norms: negative weight");
  check_input(c.rows() == gs.sample_count() && c.cols() == l_mat.rows() &&
                  l_mat.rows() == l_mat.cols(),
              "component_norms: dimension mismatch");
  const Matrix cl = c * l_mat;
  Vector alpha = Vector::Zero(m);
  for (Index j = 0; j < m; ++j) {
    if (eta_prev[j] == 0.0) continue;
    const double t = gs.apply(j, c).cwiseProduct(cl).sum();
    alpha[j] = eta_prev[j] * std::sqrt(std::max(0.0, t));
  }
  return alpha;
}

Vector update_eta_lp(const Vector& alpha, double p) {
  const Index m = alpha.size();
  check_input(m >= 1, "update_eta_lp: empty norm vector");
  check_input(alpha.minCoeff() >= 0.0, "update_eta_lp: negative norm");
  const double q = q_exponent(p);
  const double amax = alpha.maxCoeff();

  if (amax == 0.0) {
    // Documented convention: uniform point on the constraint set.
    if (std::isinf(q)) return Vector::Ones(m);
    return Vector::Constant(m, std::pow(static_cast<double>(m), -1.0 / q));
  }
  if (std::isinf(q)) {
    Vector eta = Vector::Zero(m);
    for (Index j = 0; j < m; ++j) eta[j] = alpha[j] > 0.0 ? 1.0 : 0.0;
    return eta;
  }
  if (q == 1.0) {
    return alpha / alpha.sum();
  }
  // eta is scale-invariant in alpha; normalize by the max for stability.
  const Vector t = alpha / amax;
  const double e_num = 2.0 / (q + 1.0);
  const double e_den = 2.0 * q / (q + 1.0);
  double denom = 0.0;
  for (Index j = 0; j < m; ++j)
    if (t[j] > 0.0) denom += std::pow(t[j], e_den);
  denom = std::pow(denom, 1.0 / q);
  Vector eta = Vector::Zero(m);
  for (Index j = 0; j < m; ++j)
    if (t[j] > 0.0) eta[j] = std::pow(t[j], e_num) / denom;
  return eta;
}

Vector update_eta_elastic(const Vector& alpha, double mu) {
  check_input(mu >= 0.0 && mu <= 1.0, "update_eta_elastic: mu outside [0, 1]");
  check_input(alpha.size() >= 1 && alpha.minCoeff() >= 0.0,
              "update_eta_elastic: invalid norm vector");
  Vector eta = Vector::Zero(alpha.size());
  for (Index j = 0; j < alpha.size(); ++j)
    if (alpha[j] > 0.0) eta[j] = alpha[j] / (1.0 - mu + mu * alpha[j]);
  return eta;
}

Vector smooth_eta(Vector eta, double eps_eta) {
  check_input(eps_eta >= 0.0, "smooth_eta: negative floor");
  for (Index j = 0; j < eta.size(); ++j) eta[j] = std::max(eta[j], eps_eta);
  return eta;
}

double penalty_value(const Vector& norms, const Penalty& penalty) {
  check_input(norms.size() >= 1 && norms.minCoeff() >= 0.0,
              "penalty_value: invalid norm vector");
  if (penalty.kind == PenaltyKind::Elastic) {
    return (1.0 - penalty.mu) * norms.sum() +
           penalty.mu * norms.squaredNorm();
  }
  const double p = penalty.p;
  if (p == 1.0) {
    const double s = norms.sum();
    return s * s;
  }
  if (p == 2.0) return norms.squaredNorm();
  double s = 0.0;
  for (Index j = 0; j < norms.size(); ++j) s += std::pow(norms[j], p);
  return std::pow(s, 2.0 / p);
}

bool eta_feasible(const Vector& eta, const Penalty& penalty, double tol) {
  if (eta.size() == 0 || eta.minCoeff() < 0.0) return false;
  if (penalty.kind == PenaltyKind::Elastic) return true;
  const double q = q_exponent(penalty.p);
  if (std::isinf(q)) return eta.maxCoeff() <= 1.0 + tol;
  if (q == 1.0) return eta.sum() <= 1.0 + tol;
  double s = 0.0;
  for (Index j = 0; j < eta.size(); ++j) s += std::pow(eta[j], q);
  return s <= 1.0 + tol;
}

}  // namespace mvkl
