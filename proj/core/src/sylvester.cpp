#include "mvkl/sylvester.hpp"

#include <cmath>

namespace mvkl {

Matrix solve_sylvester_eig(const Matrix& k, const Matrix& l_mat,
                           double lambda_l, const Matrix& y) {
  check_input(lambda_l > 0.0,
              "solve_sylvester_eig: regularization shift must be positive");
  check_input(k.rows() == k.cols() && l_mat.rows() == l_mat.cols(),
              "solve_sylvester_eig: K and L must be square");
  check_input(y.rows() == k.rows() && y.cols() == l_mat.rows(),
              "solve_sylvester_eig: Y must be l x n");
  const double ks = std::max(1.0, k.cwiseAbs().maxCoeff());
  const double ls = std::max(1.0, l_mat.size() > 0
                                      ? l_mat.cwiseAbs().maxCoeff()
                                      : 0.0);
  check_input(is_symmetric(k, 1e-8 * ks),
              "solve_sylvester_eig: K is not symmetric");
  check_input(is_symmetric(l_mat, 1e-8 * ls),
              "solve_sylvester_eig: L is not symmetric");

  Eigen::SelfAdjointEigenSolver<Matrix> ek(symmetrized(k));
  Eigen::SelfAdjointEigenSolver<Matrix> el(symmetrized(l_mat));
  const Matrix& t = ek.eigenvectors();
  const Matrix& s = el.eigenvectors();
  const Vector& sigma = ek.eigenvalues();
  const Vector& rho = el.eigenvalues();

  Matrix xt = t.transpose() * y * s;
  for (Index j = 0; j < xt.cols(); ++j)
    for (Index i = 0; i < xt.rows(); ++i)
      xt(i, j) /= sigma[i] * rho[j] + lambda_l;
  return t * xt * s.transpose();
}

std::pair<Matrix, CgReport> solve_sylvester_cg(
    const GramSet& gs, const Vector& eta, const Matrix& l_mat,
    double lambda_l, const Matrix& y, const Matrix& c0, double eps,
    int max_iter) {
  check_input(lambda_l > 0.0,
              "solve_sylvester_cg: regularization shift must be positive");
  check_input(eps > 0.0, "solve_sylvester_cg: tolerance must be positive");
  check_input(max_iter >= 0, "solve_sylvester_cg: negative iteration budget");
  const Index l = gs.sample_count();
  const Index n = l_mat.rows();
  check_input(l_mat.rows() == l_mat.cols(), "solve_sylvester_cg: L not square");
  check_input(y.rows() == l && y.cols() == n,
              "solve_sylvester_cg: Y must be l x n");
  const double lscale = std::max(1.0, l_mat.cwiseAbs().maxCoeff());
  check_input(is_symmetric(l_mat, 1e-8 * lscale),
              "solve_sylvester_cg: L is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> el(symmetrized(l_mat),
                                           Eigen::EigenvaluesOnly);
  check_input(el.eigenvalues().minCoeff() >= -1e-6,
              "solve_sylvester_cg: L is not positive semi-definite");

  check_input(eta.size() == gs.size(),
              "solve_sylvester_cg: weight vector size mismatch");
  CgReport report;
  double sigma_eta = 0.0;
  for (Index j = 0; j < gs.size(); ++j)
    sigma_eta += eta[j] * gs.top_eigenvalue(j);
  report.condition_bound =
      1.0 + sigma_eta * std::max(0.0, el.eigenvalues().maxCoeff()) / lambda_l;

  auto op = [&](const Matrix& m) -> Matrix {
    return gs.weighted_apply(eta, m) * l_mat + lambda_l * m;
  };

  const double ynorm = y.norm();
  if (ynorm == 0.0) {
    report.converged = true;
    return {Matrix::Zero(l, n), report};
  }

  Matrix c = c0.size() == 0 ? Matrix::Zero(l, n) : c0;
  check_input(c.rows() == l && c.cols() == n,
              "solve_sylvester_cg: warm start has wrong shape");

  Matrix r = y - op(c);
  Matrix p = r;
  double rs = r.squaredNorm();
  int it = 0;
  while (true) {
    if (std::sqrt(rs) <= eps * ynorm) {
      // Confirm against the true residual; the recurrence can drift.
      r = y - op(c);
      rs = r.squaredNorm();
      if (std::sqrt(rs) <= eps * ynorm) {
        report.converged = true;
        break;
      }
      p = r;  // restart the direction from the true residual
    }
    if (it >= max_iter) break;
    const Matrix ap = op(p);
    const double pap = p.cwiseProduct(ap).sum();
    if (!std::isfinite(pap))
      throw NumericalError("solve_sylvester_cg: residual diverged");
    if (pap <= 0.0) {
      // The operator is positive definite for lambda_l > 0, so this only
      // happens at numerical exhaustion.
      break;
    }
    const double step = rs / pap;
    c.noalias() += step * p;
    r.noalias() -= step * ap;
    const double rs_new = r.squaredNorm();
    if (!std::isfinite(rs_new))
      throw NumericalError("solve_sylvester_cg: residual diverged");
    p = r + (rs_new / rs) * p;
    rs = rs_new;
    ++it;
  }
  report.iterations = it;
  report.final_relative_residual = (y - op(c)).norm() / ynorm;
  if (!report.converged)
    report.converged = report.final_relative_residual <= eps;
  return {c, report};
}

double condition_bound(double sigma_star, double tau, int sample_count,
                       double lambda) {
  check_input(sigma_star > 0.0 && tau > 0.0 && sample_count > 0 && lambda > 0.0,
              "condition_bound: all inputs must be positive");
  return 1.0 + sigma_star * tau / (static_cast<double>(sample_count) * lambda);
}

}  // namespace mvkl
