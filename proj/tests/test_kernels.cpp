#include <doctest.h>

#include "mvkl/kernels.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace mvkl;

TEST_CASE("gaussian gram has unit diagonal and the closed-form entries") {
  Matrix x(2, 1);
  x << 0.0, std::sqrt(2.0 * std::log(2.0));  // ||x - z||^2 = 2 ln 2
  const Matrix k = gram(ScalarKernelSpec::gaussian("g", 1.0), x);
  CHECK(k(0, 0) == 1.0);
  CHECK(k(1, 1) == 1.0);
  CHECK(k(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(k(1, 0) == k(0, 1));
}

TEST_CASE("linear gram restricted to a feature subset") {
  Matrix x(2, 2);
  x << 1.0, 5.0, 1.0, 7.0;
  const Matrix k = gram(ScalarKernelSpec::linear("lin", {0}), x);
  CHECK(k(0, 1) == 1.0);  // restricted inner product of (1,5) and (1,7)
  CHECK(k(0, 0) == 1.0);
  CHECK(k(1, 1) == 1.0);
}

TEST_CASE("invalid kernel specs are rejected") {
  CHECK_THROWS_AS(ScalarKernelSpec::gaussian("bad", 0.0), InvalidSpecError);
  CHECK_THROWS_AS(ScalarKernelSpec::gaussian("bad", -1.0), InvalidSpecError);
  Matrix x(2, 2);
  x << 1.0, 2.0, 3.0, 4.0;
  CHECK_THROWS_AS(gram(ScalarKernelSpec::gaussian("g", 1.0, {2}), x),
                  InvalidSpecError);
  Matrix asym(2, 2);
  asym << 1.0, 0.5, -0.5, 1.0;
  CHECK_THROWS_AS(ScalarKernelSpec::precomputed("p", asym), InvalidSpecError);
  Matrix indef(2, 2);
  indef << 0.0, 1.0, 1.0, 0.0;  // eigenvalues +-1
  CHECK_THROWS_AS(ScalarKernelSpec::precomputed("p", indef), InvalidSpecError);
}

TEST_CASE("gram_cross agrees with gram on the training sample") {
  Rng rng(3);
  const Matrix x = rng.normal_matrix(6, 3);
  for (const auto& spec : {ScalarKernelSpec::gaussian("g", 0.7, {0, 2}),
                           ScalarKernelSpec::linear("lin")}) {
    const Matrix k = gram(spec, x);
    const Matrix kc = gram_cross(spec, x, x);
    CHECK((k - kc).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("gram_cross single duplicated point reproduces a gram row") {
  Rng rng(4);
  const Matrix x = rng.normal_matrix(5, 2);
  const auto spec = ScalarKernelSpec::gaussian("g", 1.3);
  const Matrix k = gram(spec, x);
  const Matrix row = gram_cross(spec, x, x.row(2));
  CHECK((row - k.row(2)).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("gram_cross of a linear kernel maps zero inputs to a zero row") {
  Rng rng(5);
  const Matrix x = rng.normal_matrix(4, 3);
  const Matrix z = Matrix::Zero(1, 3);
  const Matrix row = gram_cross(ScalarKernelSpec::linear("lin"), x, z);
  CHECK(row.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gram_cross has no functional form for precomputed kernels") {
  Matrix x(3, 1);
  x << 0.0, 1.0, 2.0;
  const auto spec = ScalarKernelSpec::precomputed("p", Matrix::Identity(3, 3));
  CHECK_THROWS_AS(gram_cross(spec, x, Matrix::Zero(1, 1)), InvalidSpecError);
  // Bit-identical training inputs are the one supported case.
  const Matrix same = gram_cross(spec, x, x);
  CHECK((same - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rff factor is deterministic and unit-diagonal for even D") {
  Rng rng(6);
  const Matrix x = rng.normal_matrix(10, 3);
  const Matrix z1 = rff_factor(x, 1.1, 64, 42);
  const Matrix z2 = rff_factor(x, 1.1, 64, 42);
  CHECK((z1 - z2).cwiseAbs().maxCoeff() == 0.0);
  const Matrix k = z1 * z1.transpose();
  for (Index i = 0; i < k.rows(); ++i)
    CHECK(k(i, i) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((rff_factor(x, 1.1, 64, 43) - z1).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("rff factor concentrates on the gaussian gram") {
  Rng rng(7);
  const Matrix x = rng.normal_matrix(50, 3);
  const double bw = 2.0;
  const Matrix k = gram(ScalarKernelSpec::gaussian("g", bw), x);
  const Matrix z = rff_factor(x, bw, 2000, 123);
  const double err = (z * z.transpose() - k).cwiseAbs().maxCoeff();
  CHECK(err <= 0.05);
}

TEST_CASE("weighted_apply matches the materialized combination") {
  Rng rng(8);
  const Matrix x = rng.normal_matrix(20, 4);
  KernelDictionary dict;
  dict.add(ScalarKernelSpec::gaussian("g1", 0.8));
  dict.add(ScalarKernelSpec::gaussian("g2", 2.5, {0, 1}));
  dict.add(ScalarKernelSpec::linear("lin", {2, 3}));
  dict.add(ScalarKernelSpec::factorized("rff", rff_factor(x, 1.0, 32, 5)));
  const GramSet gs(dict, x);
  const Matrix m = rng.normal_matrix(20, 3);

  SUBCASE("one-hot weights select a single kernel") {
    Vector eta = Vector::Zero(4);
    eta[1] = 1.0;
    const Matrix got = gs.weighted_apply(eta, m);
    CHECK((got - gs.apply(1, m)).cwiseAbs().maxCoeff() <= 1e-14);
  }
  SUBCASE("zero weights give the zero matrix") {
    CHECK(gs.weighted_apply(Vector::Zero(4), m).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("random weights match explicit materialization") {
    Vector eta(4);
    eta << 0.3, 0.0, 1.2, 0.45;
    const Matrix expect = gs.materialize_weighted(eta) * m;
    const Matrix got = gs.weighted_apply(eta, m);
    CHECK((got - expect).norm() <= 1e-12 * std::max(1.0, expect.norm()));
  }
  SUBCASE("linear in eta and in the operand") {
    Vector e1(4), e2(4);
    e1 << 0.1, 0.2, 0.3, 0.4;
    e2 << 0.5, 0.0, 0.7, 0.1;
    const Matrix lhs = gs.weighted_apply(e1 + e2, m);
    const Matrix rhs = gs.weighted_apply(e1, m) + gs.weighted_apply(e2, m);
    CHECK((lhs - rhs).norm() <= 1e-11 * std::max(1.0, rhs.norm()));
    const Matrix m2 = rng.normal_matrix(20, 3);
    const Matrix lhs2 = gs.weighted_apply(e1, m + m2);
    const Matrix rhs2 = gs.weighted_apply(e1, m) + gs.weighted_apply(e1, m2);
    CHECK((lhs2 - rhs2).norm() <= 1e-11 * std::max(1.0, rhs2.norm()));
  }
  SUBCASE("negative weights are rejected") {
    Vector eta = Vector::Constant(4, -0.1);
    CHECK_THROWS_AS(gs.weighted_apply(eta, m), InvalidInputError);
  }
}

TEST_CASE("max_top_eigenvalue") {
  SUBCASE("identity kernels have top eigenvalue 1") {
    std::vector<GramRep> reps;
    reps.push_back(GramRep::dense(Matrix::Identity(6, 6)));
    reps.push_back(GramRep::dense(Matrix::Identity(6, 6)));
    const GramSet gs(std::move(reps));
    CHECK(gs.max_top_eigenvalue() == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("gaussian dictionaries are bounded by the sample count") {
    Rng rng(9);
    const Matrix x = rng.normal_matrix(15, 2);
    KernelDictionary dict;
    dict.add(ScalarKernelSpec::gaussian("a", 0.5));
    dict.add(ScalarKernelSpec::gaussian("b", 4.0));
    const GramSet gs(dict, x);
    CHECK(gs.max_top_eigenvalue() <= 15.0 * (1.0 + 1e-9));
  }
  SUBCASE("random PSD set matches the dense eigensolver") {
    Rng rng(10);
    std::vector<GramRep> reps;
    double expect = 0.0;
    for (int j = 0; j < 4; ++j) {
      const Matrix k = oracles::random_psd(rng, 5);
      Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
      expect = std::max(expect, es.eigenvalues().maxCoeff());
      reps.push_back(GramRep::dense(k));
    }
    const GramSet gs(std::move(reps));
    CHECK(gs.max_top_eigenvalue() ==
          doctest::Approx(expect).epsilon(1e-6));
  }
}

TEST_CASE("dense grams are PSD within tolerance") {
  Rng rng(11);
  const Matrix x = rng.normal_matrix(18, 3);
  KernelDictionary dict;
  dict.add(ScalarKernelSpec::gaussian("g1", 0.6));
  dict.add(ScalarKernelSpec::gaussian("g2", 1.7));
  dict.add(ScalarKernelSpec::linear("lin"));
  const GramSet gs(dict, x);
  for (Index j = 0; j < gs.size(); ++j) {
    const Matrix k = gs.materialize(j);
    Eigen::SelfAdjointEigenSolver<Matrix> es(k, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >=
          -1e-8 * es.eigenvalues().maxCoeff());
  }
}

TEST_CASE("gram is permutation-equivariant") {
  Rng rng(12);
  const Matrix x = rng.normal_matrix(7, 2);
  Matrix xp(7, 2);
  std::vector<int> perm = {3, 0, 6, 1, 5, 2, 4};
  for (int i = 0; i < 7; ++i) xp.row(i) = x.row(perm[i]);
  const auto spec = ScalarKernelSpec::gaussian("g", 0.9);
  const Matrix k = gram(spec, x);
  const Matrix kp = gram(spec, xp);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(kp(i, j) == doctest::Approx(k(perm[i], perm[j])).epsilon(1e-14));
}

TEST_CASE("bandwidth grid is log-spaced around the median heuristic") {
  const Vector grid = bandwidth_grid(2.0, 13);
  CHECK(grid.size() == 13);
  CHECK(grid[0] == doctest::Approx(2.0 / 64.0));
  CHECK(grid[6] == doctest::Approx(2.0));
  CHECK(grid[12] == doctest::Approx(2.0 * 64.0));
  Rng rng(13);
  const Matrix x = rng.normal_matrix(30, 2);
  CHECK(median_heuristic_bandwidth(x) > 0.0);
  CHECK(median_heuristic_bandwidth(Matrix::Zero(10, 2)) == 1.0);
}
