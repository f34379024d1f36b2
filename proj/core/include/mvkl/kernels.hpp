#pragma once

#include "mvkl/common.hpp"

#include <string>
#include <vector>

namespace mvkl {

enum class KernelKind { Gaussian, Linear, Precomputed, Factorized };

/// A scalar input kernel. Gaussian kernels use
/// k(x, z) = exp(-||x - z||^2 / (2 sigma^2)) restricted to an optional
/// feature subset; linear kernels are restricted inner products; precomputed
/// kernels carry their Gram matrix; factorized kernels carry a factor Z with
/// K = Z Z^T and are never materialized unless asked.
struct ScalarKernelSpec {
  KernelKind kind = KernelKind::Gaussian;
  std::string id;
  double bandwidth = 1.0;           // Gaussian only
  std::vector<int> feature_subset;  // Gaussian/Linear; empty means all columns
  Matrix gram_matrix;               // Precomputed: l x l, symmetric PSD
  Matrix factor;                    // Factorized: l x d_j

  static ScalarKernelSpec gaussian(std::string id, double bandwidth,
                                   std::vector<int> subset = {});
  static ScalarKernelSpec linear(std::string id, std::vector<int> subset = {});
  /// Validates symmetry and positive semi-definiteness (tolerance 1e-8);
  /// violating matrices are rejected, not repaired.
  static ScalarKernelSpec precomputed(std::string id, Matrix gram);
  static ScalarKernelSpec factorized(std::string id, Matrix factor);

  void validate(Index input_dim) const;
};

struct KernelDictionary {
  std::vector<ScalarKernelSpec> specs;
  /// Source-group label per kernel (defaults to the kernel id); Granger
  /// aggregation sums weights per group.
  std::vector<std::string> group_of;

  Index size() const { return static_cast<Index>(specs.size()); }
  void add(ScalarKernelSpec spec, std::string group = {});
  void validate(Index input_dim) const;
};

/// Gram matrix of a kernel on sample X (rows are points). For factorized
/// kernels this materializes Z Z^T; GramSet keeps the factor form instead.
Matrix gram(const ScalarKernelSpec& spec, const Matrix& x);

/// Cross-Gram: entry (i, j) = k(x_new_i, x_train_j). Only kernels with a
/// functional form (Gaussian, Linear) can be evaluated at new points.
Matrix gram_cross(const ScalarKernelSpec& spec, const Matrix& x_train,
                  const Matrix& x_new);

/// Random Fourier feature factor Z (l x feature_count) approximating the
/// Gaussian Gram, Z Z^T ~ K. Feature map: frequencies w_k ~ N(0, I/sigma^2)
/// in cos/sin pairs scaled by sqrt(2/D); an odd trailing feature uses a
/// random-phase cosine. Rows of Z have squared norm exactly 1 for even D.
Matrix rff_factor(const Matrix& x, double bandwidth, Index feature_count,
                  std::uint64_t seed);

/// Median of pairwise Euclidean distances (deterministic subsample above
/// 512 rows); falls back to 1.0 for degenerate samples.
double median_heuristic_bandwidth(const Matrix& x);

/// Log-spaced bandwidth grid center * 2^t, t in linspace(-6, 6, count).
Vector bandwidth_grid(double center, int count = 13);

/// One kernel's Gram representation: dense l x l or a factor with K = Z Z^T.
class GramRep {
 public:
  static GramRep dense(Matrix k);
  static GramRep factored(Matrix z);

  bool is_factored() const { return factored_; }
  Index rows() const;
  Matrix apply(const Matrix& m) const;  // K * m without materializing
  Matrix materialize() const;
  double top_eigenvalue() const { return top_eig_; }

 private:
  GramRep() = default;
  void compute_top_eigenvalue();
  bool factored_ = false;
  Matrix mat_;  // dense Gram or factor
  double top_eig_ = 0.0;
};

/// Immutable set of Gram representations for a dictionary on one sample;
/// safe for concurrent reads after construction.
class GramSet {
 public:
  GramSet(const KernelDictionary& dict, const Matrix& x);
  explicit GramSet(std::vector<GramRep> reps);

  Index sample_count() const { return l_; }
  Index size() const { return static_cast<Index>(reps_.size()); }
  const GramRep& rep(Index j) const { return reps_.at(static_cast<size_t>(j)); }

  Matrix apply(Index j, const Matrix& m) const;
  /// (sum_j eta_j K_j) * m; factorized kernels stay in factor form.
  Matrix weighted_apply(const Vector& eta, const Matrix& m) const;
  Matrix materialize(Index j) const;
  Matrix materialize_weighted(const Vector& eta) const;

  double top_eigenvalue(Index j) const;
  /// sigma*_1 = max_j sigma_1(K_j).
  double max_top_eigenvalue() const;

 private:
  Index l_ = 0;
  std::vector<GramRep> reps_;
};

}  // namespace mvkl
