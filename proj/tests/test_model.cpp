#include <doctest.h>

#include "fixtures.hpp"
#include "sparsesr/matops.hpp"
#include "sparsesr/objective.hpp"

using namespace sparsesr;
using fixtures::random_matrix;

TEST_CASE("pattern complement and selector") {
  RealMatrix mask(2, 3);
  mask << 1, 0, 1, 0, 1, 1;
  const SparsityPattern s(mask);
  CHECK(s.num_constrained() == 2);
  CHECK(s.complement() == (RealMatrix::Ones(2, 3) - mask));
  const RealMatrix sel = s.selector();
  CHECK(sel.rows() == 2);
  CHECK(sel.cols() == 6);
  CHECK(s.free_entries().size() == 4u);

  CHECK_THROWS(SparsityPattern(RealMatrix::Constant(2, 2, 0.5)));
}

TEST_CASE("selector annihilates exactly the sparse perturbations") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    RealMatrix mask(3, 2);
    std::bernoulli_distribution bit(0.5);
    for (Eigen::Index k = 0; k < mask.size(); ++k) mask(k) = bit(rng) ? 1.0 : 0.0;
    const SparsityPattern s(mask);
    const RealMatrix delta = random_matrix(rng, 3, 2);
    const SparseProjection proj = project_sparse(delta, s);
    CHECK(s.selector().rows() == s.num_constrained());
    CHECK((s.selector() * matops::vec(proj.projected)).norm() == 0.0);
    if (s.num_constrained() > 0) {
      CHECK((s.selector() * matops::vec(delta)).norm() > 0.0);
      CHECK(proj.error > 0.0);
    } else {
      CHECK(proj.error == 0.0);
    }
  }
}

TEST_CASE("project_sparse") {
  RealMatrix delta(2, 2);
  delta << 1, 2, 3, 4;
  const SparseProjection dense = project_sparse(delta, SparsityPattern::all_free(2, 2));
  CHECK(dense.projected == delta);
  CHECK(dense.error == 0.0);

  const SparseProjection diag = project_sparse(delta, SparsityPattern(RealMatrix::Identity(2, 2)));
  RealMatrix expected(2, 2);
  expected << 1, 0, 0, 4;
  CHECK(diag.projected == expected);
  CHECK(diag.error == doctest::Approx(std::sqrt(13.0)));

  RealMatrix near(2, 2);
  near << -0.0418, -0.0002, 0.0006, 0.5635;
  const SparseProjection e = project_sparse(near, SparsityPattern(RealMatrix::Identity(2, 2)));
  CHECK(e.error == doctest::Approx(6.3e-4).epsilon(0.01));
}

TEST_CASE("weight matrix entries") {
  RealMatrix mask(2, 2);
  mask << 1, 0, 1, 1;
  const WeightMatrix w(SparsityPattern(mask), 7.0);
  RealMatrix expected(2, 2);
  expected << 1, 7, 1, 1;
  CHECK(w.matrix() == expected);
  for (Eigen::Index k = 0; k < w.squared_diagonal().size(); ++k) {
    const double v = w.squared_diagonal()(k);
    CHECK((v == 1.0 || v == 49.0));
  }
}

TEST_CASE("penalized cost splits into free and constrained parts") {
  std::mt19937_64 rng(11);
  RealMatrix mask(2, 3);
  mask << 1, 0, 1, 0, 0, 1;
  const SparsityPattern s(mask);
  for (double w : {1.0, 5.0, 100.0}) {
    const RealMatrix delta = random_matrix(rng, 2, 3);
    const double direct = 0.5 * matops::hadamard(WeightMatrix(s, w).matrix(), delta).squaredNorm();
    const double split = 0.5 * delta.squaredNorm() +
                         0.5 * (w * w - 1.0) * matops::hadamard(s.complement(), delta).squaredNorm();
    CHECK(std::abs(cost_split(delta, s, w) - direct) < 1e-12 * (1 + direct));
    CHECK(std::abs(split - direct) < 1e-12 * (1 + direct));
  }
}

TEST_CASE("perturbed matrix is affine") {
  const ProblemInstance inst = fixtures::dense_case();
  CHECK(perturbed_matrix(inst, RealMatrix::Zero(2, 2)) == inst.A());

  const ProblemInstance eye(fixtures::bench_a(), RealMatrix::Identity(4, 4),
                            RealMatrix::Identity(4, 4), SparsityPattern::all_free(4, 4));
  CHECK((perturbed_matrix(eye, RealMatrix::Identity(4, 4)) -
         (fixtures::bench_a() + RealMatrix::Identity(4, 4)))
            .norm() < 1e-14);

  std::mt19937_64 rng(12);
  const RealMatrix d1 = random_matrix(rng, 2, 2);
  const RealMatrix d2 = random_matrix(rng, 2, 2);
  const RealMatrix gap = perturbed_matrix(inst, d1 + d2) - perturbed_matrix(inst, d1) -
                         perturbed_matrix(inst, d2) + perturbed_matrix(inst, RealMatrix::Zero(2, 2));
  CHECK(gap.norm() < 1e-12);

  CHECK_THROWS_AS(perturbed_matrix(inst, RealMatrix::Zero(3, 2)), DimensionError);
}

TEST_CASE("four-decimal minimizer of the dense benchmark lands on the axis") {
  RealMatrix delta(2, 2);
  delta << -0.0332, -0.0717, 0.1975, 0.4700;
  const double alpha = matops::spectral_abscissa(perturbed_matrix(fixtures::dense_case(), delta));
  CHECK(std::abs(alpha) < 1e-3);
}

TEST_CASE("stability check") {
  const ProblemInstance neg(-RealMatrix::Identity(3, 3), RealMatrix::Identity(3, 1),
                            RealMatrix::Identity(1, 3), SparsityPattern::all_free(1, 1));
  StabilityCheck c = check_a1(neg);
  CHECK(c.abscissa == doctest::Approx(-1.0));
  CHECK(c.pass);

  c = check_a1(fixtures::dense_case());
  CHECK(c.abscissa == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(c.pass);

  RealMatrix zero = RealMatrix::Zero(1, 1);
  RealMatrix one = RealMatrix::Ones(1, 1);
  const ProblemInstance marginal(zero, one, one, SparsityPattern::all_free(1, 1));
  c = check_a1(marginal);
  CHECK(c.abscissa == 0.0);
  CHECK_FALSE(c.pass);
}

TEST_CASE("rank check on CX") {
  const ProblemInstance eye(-RealMatrix::Identity(4, 4), RealMatrix::Identity(4, 2),
                            RealMatrix::Identity(4, 4), SparsityPattern::all_free(2, 4));
  CHECK(check_a3(eye, RealMatrix::Identity(4, 2)).full_rank);
  CHECK_FALSE(check_a3(eye, RealMatrix::Ones(4, 2)).full_rank);

  std::mt19937_64 rng(13);
  const ProblemInstance inst = fixtures::random_instance(rng, 4, 2, 3, true);
  for (int trial = 0; trial < 20; ++trial) {
    RealMatrix x = random_matrix(rng, 4, 2);
    if (trial % 2 == 0) x.col(1) = 2.0 * x.col(0);
    const Eigen::JacobiSVD<RealMatrix> svd(inst.C() * x);
    const bool full = svd.singularValues()(1) > kRankTol * svd.singularValues()(0);
    CHECK(check_a3(inst, x).full_rank == full);
  }

  const ProblemInstance single(-RealMatrix::Identity(2, 2), RealMatrix::Identity(2, 1),
                               RealMatrix::Ones(1, 2), SparsityPattern::all_free(1, 1));
  const RankCheck r = check_a3(single, RealMatrix::Identity(2, 2));
  CHECK_FALSE(r.full_rank);
  CHECK_FALSE(r.note.empty());
}

TEST_CASE("support reduction keeps the rows and columns of free entries") {
  const ProblemInstance net(-2.5 * RealMatrix::Identity(3, 3), RealMatrix::Identity(3, 3),
                            RealMatrix::Identity(3, 3),
                            SparsityPattern::from_entries(3, 3, {{1, 2}}));
  const SupportReduction red = restrict_to_support(net);
  CHECK(red.reduced.m() == 1);
  CHECK(red.reduced.p() == 1);
  RealMatrix d(1, 1);
  d << 0.7;
  const RealMatrix full = red.expand(d, 3, 3);
  CHECK(full(1, 2) == 0.7);
  CHECK(full.cwiseAbs().sum() == doctest::Approx(0.7));
}
