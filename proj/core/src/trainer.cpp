#include "mvkl/trainer.hpp"

#include "mvkl/spectahedron.hpp"
#include "mvkl/sylvester.hpp"

#include <chrono>
#include <cmath>
#include <limits>

namespace mvkl {

void TrainConfig::validate(Index kernel_count) const {
  check_input(lambda > 0.0, "TrainConfig: lambda must be positive");
  check_input(tau > 0.0, "TrainConfig: tau must be positive");
  check_input(cg_eps > 0.0, "TrainConfig: cg_eps must be positive");
  check_input(cg_max_iter >= 1, "TrainConfig: cg_max_iter must be >= 1");
  check_input(sdp_iter >= 0, "TrainConfig: sdp_iter must be >= 0");
  check_input(outer_max >= 1, "TrainConfig: outer_max must be >= 1");
  check_input(outer_tol >= 0.0, "TrainConfig: outer_tol must be >= 0");
  check_input(eps_eta >= 0.0, "TrainConfig: eps_eta must be >= 0");
  if (mode == TrainMode::OKL)
    check_input(okl_kernel >= 0 && okl_kernel < kernel_count,
                "TrainConfig: okl_kernel index out of range");
}

double objective(const Matrix& c, const Matrix& l_mat, const Vector& eta,
                 const GramSet& gs, const Matrix& y, double lambda,
                 const Penalty& penalty, double eta_floor) {
  check_input(eta.size() == gs.size(), "objective: eta size mismatch");
  // The smoothing floor can push the l_q budget above 1 by at most
  // m * eps_eta; the feasibility sentinel allows for it.
  const double tol = 1e-8 + static_cast<double>(gs.size()) * eta_floor;
  if (!eta_feasible(eta, penalty, tol))
    return std::numeric_limits<double>::infinity();
  const Matrix kcl = gs.weighted_apply(eta, c) * l_mat;
  const double data = (kcl - y).squaredNorm() / gs.sample_count();
  return data + lambda * c.cwiseProduct(kcl).sum();
}

namespace {

Vector initial_eta(const TrainConfig& cfg, Index m) {
  if (cfg.mode == TrainMode::OKL) {
    Vector eta = Vector::Zero(m);
    eta[cfg.okl_kernel] = 1.0;
    return eta;
  }
  if (cfg.penalty.kind == PenaltyKind::Elastic) return Vector::Ones(m);
  const double q = q_exponent(cfg.penalty.p);
  if (std::isinf(q)) return Vector::Ones(m);
  return Vector::Constant(m, std::pow(static_cast<double>(m), -1.0 / q));
}

}  // namespace

Model fit(const KernelDictionary& dict, const Matrix& x, const Matrix& y,
          const TrainConfig& cfg, const Model* init,
          const FitObserver& observer) {
  const GramSet gs(dict, x);
  return fit(dict, x, gs, y, cfg, init, observer);
}

Model fit(const KernelDictionary& dict, const Matrix& x, const GramSet& gs,
          const Matrix& y, const TrainConfig& cfg, const Model* init,
          const FitObserver& observer) {
  const Index m = gs.size();
  const Index l = gs.sample_count();
  const Index n = y.cols();
  cfg.validate(m);
  check_input(y.rows() == l, "fit: Y row count does not match the sample");
  check_input(y.allFinite(), "fit: Y contains non-finite values");
  const double lambda_l = cfg.lambda * static_cast<double>(l);

  Model model;
  model.dictionary = dict;
  model.x = x;
  model.penalty = cfg.penalty;
  model.config = cfg;
  // IKL holds L = I_n fixed; the stored budget absorbs its trace.
  model.tau = cfg.mode == TrainMode::IKL
                  ? std::max(cfg.tau, static_cast<double>(n))
                  : cfg.tau;

  Vector eta;
  Matrix c;
  Matrix l_mat;
  if (init != nullptr && init->fitted()) {
    check_input(init->eta.size() == m && init->c.rows() == l &&
                    init->c.cols() == n && init->l.rows() == n,
                "fit: warm-start model shape mismatch");
    eta = init->eta;
    c = init->c;
    l_mat = init->l;
  } else {
    eta = initial_eta(cfg, m);
    c = Matrix::Zero(l, n);
    l_mat = Matrix::Identity(n, n);
    if (cfg.mode != TrainMode::IKL) l_mat *= model.tau / n;
  }

  const double sigma_star = gs.max_top_eigenvalue();
  const double curvature = (model.tau * sigma_star) * (model.tau * sigma_star);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&t0]() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  };

  double obj =
      objective(c, l_mat, eta, gs, y, cfg.lambda, cfg.penalty, cfg.eps_eta);
  model.trace.push_back({0, elapsed(), obj});

  for (int t = 1; t <= cfg.outer_max; ++t) {
    try {
      c = solve_sylvester_cg(gs, eta, l_mat, lambda_l, y, c, cfg.cg_eps,
                             cfg.cg_max_iter)
              .first;
    } catch (const NumericalError& e) {
      throw NumericalError(std::string(e.what()) + " (outer iteration " +
                           std::to_string(t) + ", C step)");
    }

    if (cfg.mode != TrainMode::OKL) {
      const Vector alpha = component_norms(c, gs, l_mat, eta);
      eta = cfg.penalty.kind == PenaltyKind::Lp
                ? update_eta_lp(alpha, cfg.penalty.p)
                : update_eta_elastic(alpha, cfg.penalty.mu);
      eta = smooth_eta(std::move(eta), cfg.eps_eta);
    }

    if (cfg.mode != TrainMode::IKL) {
      const Matrix a = gs.weighted_apply(eta, c);
      const Matrix b = symmetrized(c.transpose() * a);
      FwConfig fw;
      fw.max_iter = cfg.sdp_iter;
      fw.curvature = curvature;
      fw.stop_tolerance = 1e-9;
      fw.seed = cfg.seed + static_cast<std::uint64_t>(t);
      OutputKernel l0{l_mat, model.tau};
      try {
        l_mat = solve_l(a, b, y, cfg.lambda, model.tau,
                        static_cast<int>(l), l0, fw)
                    .kernel.l;
      } catch (const NumericalError& e) {
        throw NumericalError(std::string(e.what()) + " (outer iteration " +
                             std::to_string(t) + ", L step)");
      }
    }

    const double obj_new =
        objective(c, l_mat, eta, gs, y, cfg.lambda, cfg.penalty, cfg.eps_eta);
    model.trace.push_back({t, elapsed(), obj_new});
    if (observer) observer(t, model.trace.back().seconds, obj_new, c, eta,
                           l_mat);
    const double change = std::abs(obj_new - obj);
    obj = obj_new;
    if (cfg.outer_tol > 0.0 &&
        change <= cfg.outer_tol * std::max(1.0, std::abs(obj)))
      break;
  }

  model.eta = std::move(eta);
  model.c = std::move(c);
  model.l = std::move(l_mat);
  return model;
}

Matrix predict(const Model& model, const Matrix& x_new) {
  check_input(model.fitted(), "predict: model is not fitted");
  check_input(x_new.cols() == model.x.cols(),
              "predict: feature dimension mismatch (" +
                  std::to_string(x_new.cols()) + " vs " +
                  std::to_string(model.x.cols()) + ")");
  const Matrix cl = model.c * model.l;
  Matrix out = Matrix::Zero(x_new.rows(), model.l.cols());
  for (Index j = 0; j < model.dictionary.size(); ++j) {
    if (model.eta[j] == 0.0) continue;
    out.noalias() += model.eta[j] *
                     (gram_cross(model.dictionary.specs[static_cast<size_t>(j)],
                                 model.x, x_new) *
                      cl);
  }
  return out;
}

RmseResult rmse(const Matrix& y_hat, const Matrix& y) {
  check_input(y_hat.rows() == y.rows() && y_hat.cols() == y.cols(),
              "rmse: shape mismatch");
  check_input(y.rows() >= 1, "rmse: empty input");
  RmseResult r;
  r.per_output =
      ((y_hat - y).array().square().colwise().mean()).sqrt().matrix();
  r.mean = r.per_output.mean();
  return r;
}

}  // namespace mvkl
