#include "mvkl/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace mvkl {

namespace {

Matrix select_columns(const Matrix& x, const std::vector<int>& subset) {
  if (subset.empty()) return x;
  Matrix out(x.rows(), static_cast<Index>(subset.size()));
  for (size_t c = 0; c < subset.size(); ++c)
    out.col(static_cast<Index>(c)) = x.col(subset[c]);
  return out;
}

void check_subset(const std::vector<int>& subset, Index input_dim,
                  const std::string& id) {
  for (int idx : subset)
    check_spec(idx >= 0 && idx < input_dim,
               "kernel '" + id + "': feature index " + std::to_string(idx) +
                   " out of range for input dimension " +
                   std::to_string(input_dim));
}

/// x xT with exact symmetry (lower triangle computed once, mirrored).
Matrix self_inner(const Matrix& x) {
  const Index l = x.rows();
  Matrix s = Matrix::Zero(l, l);
  s.selfadjointView<Eigen::Lower>().rankUpdate(x);
  s.triangularView<Eigen::StrictlyUpper>() =
      s.transpose().triangularView<Eigen::StrictlyUpper>();
  return s;
}

Matrix gaussian_from_inner(const Matrix& s, double bandwidth) {
  const Index l = s.rows();
  Matrix k(l, l);
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  for (Index j = 0; j < l; ++j) {
    k(j, j) = 1.0;
    for (Index i = j + 1; i < l; ++i) {
      const double d2 = std::max(0.0, s(i, i) + s(j, j) - 2.0 * s(i, j));
      const double v = std::exp(-d2 * inv);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

}  // namespace

ScalarKernelSpec ScalarKernelSpec::gaussian(std::string id, double bandwidth,
                                            std::vector<int> subset) {
  check_spec(bandwidth > 0.0,
             "kernel '" + id + "': gaussian bandwidth must be positive");
  ScalarKernelSpec s;
  s.kind = KernelKind::Gaussian;
  s.id = std::move(id);
  s.bandwidth = bandwidth;
  s.feature_subset = std::move(subset);
  return s;
}

ScalarKernelSpec ScalarKernelSpec::linear(std::string id,
                                          std::vector<int> subset) {
  ScalarKernelSpec s;
  s.kind = KernelKind::Linear;
  s.id = std::move(id);
  s.feature_subset = std::move(subset);
  return s;
}

ScalarKernelSpec ScalarKernelSpec::precomputed(std::string id, Matrix gram) {
  check_spec(gram.rows() == gram.cols() && gram.rows() >= 1,
             "kernel '" + id + "': precomputed Gram must be square");
  const double scale = std::max(1.0, gram.cwiseAbs().maxCoeff());
  check_spec((gram - gram.transpose()).cwiseAbs().maxCoeff() <= 1e-8 * scale,
             "kernel '" + id + "': precomputed Gram is not symmetric");
  Matrix sym = symmetrized(gram);
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = std::max(1.0, es.eigenvalues().maxCoeff());
  check_spec(lo >= -1e-8 * hi,
             "kernel '" + id + "': precomputed Gram is not positive "
             "semi-definite (min eigenvalue " + std::to_string(lo) + ")");
  ScalarKernelSpec s;
  s.kind = KernelKind::Precomputed;
  s.id = std::move(id);
  s.gram_matrix = std::move(sym);
  return s;
}

ScalarKernelSpec ScalarKernelSpec::factorized(std::string id, Matrix factor) {
  check_spec(factor.rows() >= 1 && factor.cols() >= 1,
             "kernel '" + id + "': empty factor");
  ScalarKernelSpec s;
  s.kind = KernelKind::Factorized;
  s.id = std::move(id);
  s.factor = std::move(factor);
  return s;
}

void ScalarKernelSpec::validate(Index input_dim) const {
  switch (kind) {
    case KernelKind::Gaussian:
      check_spec(bandwidth > 0.0,
                 "kernel '" + id + "': gaussian bandwidth must be positive");
      check_subset(feature_subset, input_dim, id);
      break;
    case KernelKind::Linear:
      check_subset(feature_subset, input_dim, id);
      break;
    case KernelKind::Precomputed:
      check_spec(gram_matrix.rows() == gram_matrix.cols() &&
                     gram_matrix.rows() >= 1,
                 "kernel '" + id + "': precomputed Gram must be square");
      break;
    case KernelKind::Factorized:
      check_spec(factor.rows() >= 1, "kernel '" + id + "': empty factor");
      break;
  }
}

void KernelDictionary::add(ScalarKernelSpec spec, std::string group) {
  group_of.push_back(group.empty() ? spec.id : std::move(group));
  specs.push_back(std::move(spec));
}

void KernelDictionary::validate(Index input_dim) const {
  check_spec(!specs.empty(), "kernel dictionary is empty");
  check_spec(group_of.size() == specs.size(),
             "kernel dictionary: group map size mismatch");
  std::set<std::string> ids;
  for (const auto& s : specs) {
    s.validate(input_dim);
    check_spec(ids.insert(s.id).second,
               "kernel dictionary: duplicate kernel id '" + s.id + "'");
  }
}

Matrix gram(const ScalarKernelSpec& spec, const Matrix& x) {
  check_input(x.rows() >= 1, "gram: sample must have at least one row");
  spec.validate(x.cols());
  switch (spec.kind) {
    case KernelKind::Gaussian: {
      const Matrix xs = select_columns(x, spec.feature_subset);
      return gaussian_from_inner(self_inner(xs), spec.bandwidth);
    }
    case KernelKind::Linear:
      return self_inner(select_columns(x, spec.feature_subset));
    case KernelKind::Precomputed:
      check_input(spec.gram_matrix.rows() == x.rows(),
                  "gram: precomputed kernel '" + spec.id + "' sized for " +
                      std::to_string(spec.gram_matrix.rows()) +
                      " samples, got " + std::to_string(x.rows()));
      return spec.gram_matrix;
    case KernelKind::Factorized:
      check_input(spec.factor.rows() == x.rows(),
                  "gram: factor row count does not match sample");
      return self_inner(spec.factor);
  }
  throw InvalidSpecError("gram: unknown kernel kind");
}

Matrix gram_cross(const ScalarKernelSpec& spec, const Matrix& x_train,
                  const Matrix& x_new) {
  check_input(x_train.cols() == x_new.cols(),
              "gram_cross: feature dimension mismatch (" +
                  std::to_string(x_train.cols()) + " vs " +
                  std::to_string(x_new.cols()) + ")");
  spec.validate(x_train.cols());
  switch (spec.kind) {
    case KernelKind::Gaussian: {
      const Matrix a = select_columns(x_new, spec.feature_subset);
      const Matrix b = select_columns(x_train, spec.feature_subset);
      const Vector an = a.rowwise().squaredNorm();
      const Vector bn = b.rowwise().squaredNorm();
      Matrix k = a * b.transpose();
      const double inv = 1.0 / (2.0 * spec.bandwidth * spec.bandwidth);
      for (Index j = 0; j < k.cols(); ++j)
        for (Index i = 0; i < k.rows(); ++i) {
          const double d2 = std::max(0.0, an[i] + bn[j] - 2.0 * k(i, j));
          k(i, j) = std::exp(-d2 * inv);
        }
      return k;
    }
    case KernelKind::Linear:
      return select_columns(x_new, spec.feature_subset) *
             select_columns(x_train, spec.feature_subset).transpose();
    default:
      // No functional form; the training sample itself is the one new-input
      // set these kernels can score.
      if (x_new.rows() == x_train.rows() && x_new == x_train)
        return gram(spec, x_train);
      throw InvalidSpecError("gram_cross: kernel '" + spec.id +
                             "' has no functional form for new inputs");
  }
}

Matrix rff_factor(const Matrix& x, double bandwidth, Index feature_count,
                  std::uint64_t seed) {
  check_spec(bandwidth > 0.0, "rff_factor: bandwidth must be positive");
  check_input(feature_count >= 1, "rff_factor: feature count must be >= 1");
  const Index l = x.rows();
  const Index d = x.cols();
  const Index pairs = feature_count / 2;
  Rng rng(seed);
  Matrix z(l, feature_count);
  const double scale = std::sqrt(2.0 / static_cast<double>(feature_count));
  for (Index k = 0; k < pairs; ++k) {
    Vector w = rng.normal_vector(d) / bandwidth;
    const Vector proj = x * w;
    z.col(2 * k) = (proj.array().cos() * scale).matrix();
    z.col(2 * k + 1) = (proj.array().sin() * scale).matrix();
  }
  if (feature_count % 2 == 1) {
    Vector w = rng.normal_vector(d) / bandwidth;
    const double phase = 2.0 * 3.14159265358979323846 * rng.uniform();
    const Vector proj = x * w;
    z.col(feature_count - 1) =
        ((proj.array() + phase).cos() * scale * std::sqrt(2.0)).matrix();
  }
  return z;
}

double median_heuristic_bandwidth(const Matrix& x) {
  const Index l = x.rows();
  if (l < 2) return 1.0;
  std::vector<Index> rows;
  if (l <= 512) {
    rows.resize(static_cast<size_t>(l));
    for (Index i = 0; i < l; ++i) rows[static_cast<size_t>(i)] = i;
  } else {
    Rng rng(1);
    for (Index i = 0; i < 512; ++i)
      rows.push_back(static_cast<Index>(rng.integer() % l));
  }
  std::vector<double> dist;
  dist.reserve(rows.size() * (rows.size() - 1) / 2);
  for (size_t a = 0; a < rows.size(); ++a)
    for (size_t b = a + 1; b < rows.size(); ++b)
      dist.push_back((x.row(rows[a]) - x.row(rows[b])).norm());
  if (dist.empty()) return 1.0;
  std::nth_element(dist.begin(), dist.begin() + dist.size() / 2, dist.end());
  const double med = dist[dist.size() / 2];
  return med > 1e-12 ? med : 1.0;
}

Vector bandwidth_grid(double center, int count) {
  check_input(center > 0.0 && count >= 1, "bandwidth_grid: invalid arguments");
  Vector grid(count);
  if (count == 1) {
    grid[0] = center;
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    const double t = -6.0 + 12.0 * static_cast<double>(i) / (count - 1);
    grid[i] = center * std::pow(2.0, t);
  }
  return grid;
}

GramRep GramRep::dense(Matrix k) {
  check_input(k.rows() == k.cols() && k.rows() >= 1,
              "GramRep: dense Gram must be square");
  check_input(is_symmetric(k, 1e-10 * std::max(1.0, k.cwiseAbs().maxCoeff())),
              "GramRep: dense Gram is not symmetric");
  GramRep r;
  r.factored_ = false;
  r.mat_ = std::move(k);
  r.compute_top_eigenvalue();
  return r;
}

GramRep GramRep::factored(Matrix z) {
  check_input(z.rows() >= 1 && z.cols() >= 1, "GramRep: empty factor");
  GramRep r;
  r.factored_ = true;
  r.mat_ = std::move(z);
  r.compute_top_eigenvalue();
  return r;
}

void GramRep::compute_top_eigenvalue() {
  if (factored_) {
    // sigma_1(Z Z^T) = sigma_1(Z^T Z), computed on the small d x d side.
    const Matrix small = mat_.transpose() * mat_;
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(small),
                                             Eigen::EigenvaluesOnly);
    top_eig_ = std::max(0.0, es.eigenvalues().maxCoeff());
    return;
  }
  const Matrix& k = mat_;
  auto op = [&k](const Vector& v) -> Vector { return k * v; };
  auto exact = [&k]() {
    Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
  };
  top_eig_ = std::max(0.0, largest_eigenvalue(op, k.rows(), 1e-12, 20000,
                                              11, exact));
}

Index GramRep::rows() const { return mat_.rows(); }

Matrix GramRep::apply(const Matrix& m) const {
  check_input(m.rows() == mat_.rows(),
              "GramRep::apply: operand has " + std::to_string(m.rows()) +
                  " rows, Gram has " + std::to_string(mat_.rows()));
  if (factored_) return mat_ * (mat_.transpose() * m);
  return mat_ * m;
}

Matrix GramRep::materialize() const {
  if (factored_) {
    Matrix k = Matrix::Zero(mat_.rows(), mat_.rows());
    k.selfadjointView<Eigen::Lower>().rankUpdate(mat_);
    k.triangularView<Eigen::StrictlyUpper>() =
        k.transpose().triangularView<Eigen::StrictlyUpper>();
    return k;
  }
  return mat_;
}

GramSet::GramSet(const KernelDictionary& dict, const Matrix& x) {
  dict.validate(x.cols());
  l_ = x.rows();
  reps_.reserve(dict.specs.size());
  for (const auto& spec : dict.specs) {
    if (spec.kind == KernelKind::Factorized) {
      check_input(spec.factor.rows() == l_,
                  "GramSet: factor rows do not match sample count");
      reps_.push_back(GramRep::factored(spec.factor));
    } else {
      reps_.push_back(GramRep::dense(gram(spec, x)));
    }
  }
}

GramSet::GramSet(std::vector<GramRep> reps) : reps_(std::move(reps)) {
  check_input(!reps_.empty(), "GramSet: no Gram representations");
  l_ = reps_.front().rows();
  for (const auto& r : reps_)
    check_input(r.rows() == l_, "GramSet: inconsistent sample counts");
}

Matrix GramSet::apply(Index j, const Matrix& m) const {
  return rep(j).apply(m);
}

Matrix GramSet::weighted_apply(const Vector& eta, const Matrix& m) const {
  check_input(eta.size() == size(),
              "weighted_apply: weight vector has " +
                  std::to_string(eta.size()) + " entries for " +
                  std::to_string(size()) + " kernels");
  check_input(eta.minCoeff() >= 0.0,
              "weighted_apply: negative kernel weight");
  check_input(m.rows() == l_, "weighted_apply: operand row count mismatch");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (Index j = 0; j < size(); ++j) {
    if (eta[j] == 0.0) continue;
    out.noalias() += eta[j] * rep(j).apply(m);
  }
  return out;
}

Matrix GramSet::materialize(Index j) const { return rep(j).materialize(); }

Matrix GramSet::materialize_weighted(const Vector& eta) const {
  check_input(eta.size() == size(), "materialize_weighted: size mismatch");
  Matrix out = Matrix::Zero(l_, l_);
  for (Index j = 0; j < size(); ++j) {
    if (eta[j] == 0.0) continue;
    out += eta[j] * rep(j).materialize();
  }
  return out;
}

double GramSet::top_eigenvalue(Index j) const { return rep(j).top_eigenvalue(); }

double GramSet::max_top_eigenvalue() const {
  double best = 0.0;
  for (const auto& r : reps_) best = std::max(best, r.top_eigenvalue());
  return best;
}

}  // namespace mvkl
