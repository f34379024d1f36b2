#include "mvkl/spectahedron.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mvkl {

void OutputKernel::validate() const {
  check_input(l.rows() == l.cols() && l.rows() >= 1,
              "OutputKernel: L must be square");
  check_input(tau > 0.0, "OutputKernel: trace budget must be positive");
  check_input(is_symmetric(l, 1e-10 * std::max(1.0, l.cwiseAbs().maxCoeff())),
              "OutputKernel: L is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(l),
                                           Eigen::EigenvaluesOnly);
  const double hi = std::max(1.0, es.eigenvalues().maxCoeff());
  check_input(es.eigenvalues().minCoeff() >= -1e-8 * hi,
              "OutputKernel: L is not positive semi-definite");
  check_input(l.trace() <= tau * (1.0 + 1e-8),
              "OutputKernel: trace exceeds the budget");
}

namespace {

void check_l_problem(const Matrix& a, const Matrix& b, const Matrix& y,
                     const Matrix& l_mat, int sample_count) {
  check_input(sample_count >= 1, "l_objective: sample count must be >= 1");
  check_input(l_mat.rows() == l_mat.cols(), "l_objective: L must be square");
  check_input(a.cols() == l_mat.rows(),
              "l_objective: A column count does not match L");
  check_input(b.rows() == l_mat.rows() && b.cols() == l_mat.cols(),
              "l_objective: B shape does not match L");
  check_input(y.rows() == a.rows() && y.cols() == l_mat.cols(),
              "l_objective: Y shape does not match A L");
}

}  // namespace

double l_objective(const Matrix& a, const Matrix& b, const Matrix& y,
                   const Matrix& l_mat, double lambda, int sample_count) {
  check_l_problem(a, b, y, l_mat, sample_count);
  const double data = (a * l_mat - y).squaredNorm() / sample_count;
  return data + lambda * b.cwiseProduct(l_mat).sum();
}

Matrix l_gradient(const Matrix& a, const Matrix& b, const Matrix& y,
                  const Matrix& l_mat, double lambda, int sample_count) {
  check_l_problem(a, b, y, l_mat, sample_count);
  const Matrix g = (2.0 / sample_count) * (a.transpose() * (a * l_mat - y)) +
                   lambda * b;
  return symmetrized(g);
}

std::pair<Vector, double> approx_min_eigvec(const Matrix& m, double eps,
                                            std::uint64_t seed) {
  check_input(m.rows() == m.cols() && m.rows() >= 1,
              "approx_min_eigvec: matrix must be square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  check_input(is_symmetric(m, 1e-8 * scale),
              "approx_min_eigvec: matrix is not symmetric");
  const Index n = m.rows();
  if (n == 1) return {Vector::Ones(1), m(0, 0)};

  // Gershgorin upper bound on lambda_max; sI - M is then PSD and its top
  // eigenpair corresponds to the minimal eigenpair of M.
  double shift = m(0, 0);
  for (Index i = 0; i < n; ++i) {
    double row = m(i, i);
    for (Index j = 0; j < n; ++j)
      if (j != i) row += std::abs(m(i, j));
    shift = std::max(shift, row);
  }

  Rng rng(seed);
  Vector v = rng.normal_vector(n);
  v.normalize();
  const double eps_eff = std::max(eps, 1e-14 * scale);
  const int cap = 2000 + 100 * static_cast<int>(n);
  Vector best_v = v;
  double best_res = std::numeric_limits<double>::infinity();
  for (int it = 0; it < cap; ++it) {
    Vector w = shift * v - m * v;
    const double theta = v.dot(w);
    const double res = (w - theta * v).norm();
    if (res < best_res) {
      best_res = res;
      best_v = v;
    }
    if (res <= 0.5 * eps_eff) break;
    const double wn = w.norm();
    if (wn <= 1e-300 * std::max(1.0, shift)) break;  // M = shift I: any v
    v = w / wn;
  }
  if (best_res > 0.5 * eps_eff) {
    // Power iteration slows as the bottom eigengap closes; fall back to a
    // dense solve so the v^T M v <= lambda_min + eps contract still holds.
    Eigen::SelfAdjointEigenSolver<Matrix> es(m);
    Index idx = 0;
    es.eigenvalues().minCoeff(&idx);
    return {es.eigenvectors().col(idx), es.eigenvalues()[idx]};
  }
  const double mu = best_v.dot(m * best_v);
  return {best_v, mu};
}

double exact_line_search(const Matrix& a, const Matrix& b, const Matrix& y,
                         double lambda, int sample_count, const Matrix& l_k,
                         const Matrix& p) {
  check_l_problem(a, b, y, l_k, sample_count);
  check_input(p.rows() == l_k.rows() && p.cols() == l_k.cols(),
              "exact_line_search: direction shape mismatch");
  const Matrix r = a * l_k - y;
  const Matrix ap = a * p;
  const double num = (2.0 / sample_count) * r.cwiseProduct(ap).sum() +
                     lambda * b.cwiseProduct(p).sum();
  const double den = (2.0 / sample_count) * ap.squaredNorm();
  if (den <= 1e-14) return 0.0;
  return std::clamp(-num / den, 0.0, 1.0);
}

FwResult solve_l(const Matrix& a, const Matrix& b, const Matrix& y,
                 double lambda, double tau, int sample_count,
                 const OutputKernel& l0, const FwConfig& cfg,
                 const FwObserver& observer) {
  check_input(tau > 0.0, "solve_l: trace budget must be positive");
  check_l_problem(a, b, y, l0.l, sample_count);
  OutputKernel start = l0;
  start.tau = tau;
  start.validate();

  const Index n = l0.l.rows();
  const Matrix ata = symmetrized(a.transpose() * a);
  const Matrix aty = a.transpose() * y;
  const Matrix bsym = symmetrized(b);

  double curvature = cfg.curvature;
  if (curvature <= 0.0) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(ata, Eigen::EigenvaluesOnly);
    curvature = std::max(1e-12, (2.0 / sample_count) * tau * tau *
                                    es.eigenvalues().maxCoeff());
  }

  Matrix l_cur = symmetrized(l0.l);
  auto g_of = [&](const Matrix& l_mat) {
    return (a * l_mat - y).squaredNorm() / sample_count +
           lambda * bsym.cwiseProduct(l_mat).sum();
  };
  double g_cur = g_of(l_cur);
  FwResult result;
  result.objective_trace.push_back(g_cur);

  bool force_refined = false;
  for (int k = 1; k <= cfg.max_iter; ++k) {
    const Matrix grad = symmetrized(
        (2.0 / sample_count) * (ata * l_cur - aty) + lambda * bsym);
    double eps_k =
        std::max(cfg.eig_tol_floor, curvature / (static_cast<double>(k) * k));
    if (force_refined) eps_k = cfg.eig_tol_floor;
    auto [v, mu] = approx_min_eigvec(grad, eps_k, cfg.seed + k);
    bool refined = eps_k <= cfg.eig_tol_floor * (1.0 + 1e-12);

    Matrix p;
    double gap = 0.0;
    auto build_direction = [&]() {
      if (mu > 0.0) {
        // Smallest eigenvalue positive: the toward-vertex atom is the zero
        // matrix and the step shrinks L toward 0.
        p = -l_cur;
        gap = std::max(0.0, grad.cwiseProduct(l_cur).sum());
      } else {
        p = tau * (v * v.transpose()) - l_cur;
        gap = std::max(0.0, grad.cwiseProduct(l_cur).sum() - tau * mu);
      }
    };
    auto refine = [&]() {
      std::tie(v, mu) =
          approx_min_eigvec(grad, cfg.eig_tol_floor, cfg.seed + k);
      refined = true;
      build_direction();
    };
    build_direction();

    // Stopping decisions never trust a loosely scheduled eigensolve: any
    // stop condition seen on an unrefined direction is re-checked at the
    // floor precision first.
    const double gap_threshold =
        cfg.stop_tolerance * std::max(1.0, std::abs(g_cur));
    if (gap <= gap_threshold && !refined) refine();
    result.fw_gap = gap;
    if (gap <= gap_threshold) break;

    double alpha =
        exact_line_search(a, bsym, y, lambda, sample_count, l_cur, p);
    if (alpha == 0.0 && !refined) {
      refine();
      result.fw_gap = gap;
      if (gap <= gap_threshold) break;
      alpha = exact_line_search(a, bsym, y, lambda, sample_count, l_cur, p);
    }
    if (alpha == 0.0) break;  // no admissible progress along this direction

    const Matrix l_next = l_cur + alpha * p;
    const double g_next = g_of(l_next);
    if (g_next > g_cur) {
      if (refined) break;  // numerical floor reached
      force_refined = true;
      continue;
    }
    l_cur = l_next;
    const double decrease = g_cur - g_next;
    g_cur = g_next;
    result.objective_trace.push_back(g_cur);
    result.iterations = k;
    if (observer) observer(l_cur, g_cur);
    if (decrease <= cfg.stop_tolerance * std::max(1.0, std::abs(g_cur))) {
      if (refined) break;
      force_refined = true;
    } else {
      force_refined = false;
    }
  }

  result.kernel.l = std::move(l_cur);
  result.kernel.tau = tau;
  return result;
}

std::int64_t hazan_iteration_bound(double tau, double sigma_star, double eps) {
  check_input(tau > 0.0 && sigma_star > 0.0 && eps > 0.0,
              "hazan_iteration_bound: all inputs must be positive");
  const double t = tau * sigma_star;
  return static_cast<std::int64_t>(std::ceil(16.0 * t * t / eps));
}

}  // namespace mvkl
