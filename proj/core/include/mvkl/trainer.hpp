#pragma once

#include "mvkl/common.hpp"
#include "mvkl/kernels.hpp"
#include "mvkl/weights.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace mvkl {

enum class TrainMode { IKL, OKL, IOKL };

struct TrainConfig {
  double lambda = 1e-3;
  double tau = 1.0;
  Penalty penalty = Penalty::lp(1.0);
  TrainMode mode = TrainMode::IOKL;
  double cg_eps = 1e-4;
  int cg_max_iter = 1000;
  int sdp_iter = 200;
  int outer_max = 50;
  double outer_tol = 1e-5;  // relative objective change; 0 disables early stop
  double eps_eta = 1e-8;
  int okl_kernel = 0;  // OKL mode: index of the one-hot kernel weight
  std::uint64_t seed = 0;

  void validate(Index kernel_count) const;
};

struct TraceEntry {
  int outer_iter = 0;
  double seconds = 0.0;
  double objective = 0.0;
};

struct Model {
  KernelDictionary dictionary;
  Matrix x;  // training inputs
  Vector eta;
  Penalty penalty = Penalty::lp(1.0);
  Matrix c;
  Matrix l;
  double tau = 1.0;
  TrainConfig config;
  std::vector<TraceEntry> trace;

  bool fitted() const { return c.size() > 0; }
};

/// Objective of the joint problem with the indicator omega evaluated as 0 on
/// the feasible set: (1/l) ||K_eta C L - Y||_F^2 + lambda tr(C^T K_eta C L).
/// Infeasible eta (l_q budget exceeded beyond the smoothing allowance)
/// returns +infinity.
double objective(const Matrix& c, const Matrix& l_mat, const Vector& eta,
                 const GramSet& gs, const Matrix& y, double lambda,
                 const Penalty& penalty, double eta_floor = 1e-8);

using FitObserver =
    std::function<void(int outer_iter, double seconds, double objective_value,
                       const Matrix& c, const Vector& eta, const Matrix& l)>;

/// Block coordinate descent over (C, eta, L): a warm-started conjugate
/// gradient Sylvester solve, the closed-form weight update with smoothing,
/// and the bounded-trace Frank-Wolfe step, until the relative objective
/// change drops below outer_tol or outer_max sweeps. IKL fixes L = I,
/// OKL fixes eta one-hot. Deterministic given cfg.seed.
Model fit(const KernelDictionary& dict, const Matrix& x, const Matrix& y,
          const TrainConfig& cfg, const Model* init = nullptr,
          const FitObserver& observer = {});

/// Same, reusing a precomputed GramSet for dict on x.
Model fit(const KernelDictionary& dict, const Matrix& x, const GramSet& gs,
          const Matrix& y, const TrainConfig& cfg, const Model* init = nullptr,
          const FitObserver& observer = {});

/// Y_hat = K_cross,eta C L with K_cross,eta = sum_j eta_j k_j(X_new, X_train).
Matrix predict(const Model& model, const Matrix& x_new);

struct RmseResult {
  Vector per_output;
  double mean = 0.0;
};

RmseResult rmse(const Matrix& y_hat, const Matrix& y);

}  // namespace mvkl
