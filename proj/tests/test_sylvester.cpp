#include <doctest.h>

#include <algorithm>

#include "fixtures.hpp"
#include "sparsesr/matops.hpp"
#include "sparsesr/sylvester.hpp"

using namespace sparsesr;
using fixtures::random_matrix;

namespace {

double sylvester_residual(const ProblemInstance& inst, const RealMatrix& x, const RealMatrix& g,
                          double omega) {
  return (inst.A() * x - omega * x * rotation_generator() + inst.B() * g).norm();
}

}  // namespace

TEST_CASE("scalar Sylvester solve") {
  RealMatrix a(1, 1), b(1, 1), g(1, 2);
  a << -1;
  b << 1;
  g << 1, 0;
  const ProblemInstance inst(a, b, b, SparsityPattern::all_free(1, 1));
  const RealMatrix x = solve_x(inst, g, 1.0);
  CHECK(x(0, 0) == doctest::Approx(0.5));
  CHECK(x(0, 1) == doctest::Approx(-0.5));
  CHECK(sylvester_residual(inst, x, g, 1.0) < 1e-15);
}

TEST_CASE("zero forcing gives zero solution") {
  const ProblemInstance inst = fixtures::dense_case();
  CHECK(solve_x(inst, RealMatrix::Zero(2, 2), 1.7).isZero(0.0));
}

TEST_CASE("Sylvester residual on the benchmark") {
  const ProblemInstance inst = fixtures::dense_case();
  std::mt19937_64 rng(20);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix g = random_matrix(rng, 2, 2);
    const RealMatrix x = solve_x(inst, g, 2.5);
    CHECK(sylvester_residual(inst, x, g, 2.5) < 1e-10 * (1.0 + g.norm()));
  }
}

TEST_CASE("solve_x is linear in G") {
  std::mt19937_64 rng(21);
  const ProblemInstance inst = fixtures::random_instance(rng, 5, 2, 3);
  const RealMatrix g1 = random_matrix(rng, 2, 2);
  const RealMatrix g2 = random_matrix(rng, 2, 2);
  const RealMatrix lhs = solve_x(inst, g1 + g2, 0.8);
  const RealMatrix rhs = solve_x(inst, g1, 0.8) + solve_x(inst, g2, 0.8);
  CHECK(fixtures::rel_err(lhs, rhs) < 1e-12);
}

TEST_CASE("lifted operator spectrum is the nominal spectrum shifted by +-j omega") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const RealMatrix a = fixtures::random_stable(rng, 4);
    const double omega = 0.3 + trial;
    const SylvesterOperator op(a, omega);
    const ComplexVector lifted = matops::spectrum(op.lifted());
    const ComplexVector base = matops::spectrum(a);
    std::vector<Complex> expected;
    for (Eigen::Index k = 0; k < base.size(); ++k) {
      expected.push_back(base(k) + Complex(0, omega));
      expected.push_back(base(k) - Complex(0, omega));
    }
    REQUIRE(lifted.size() == static_cast<Eigen::Index>(expected.size()));
    for (Eigen::Index k = 0; k < lifted.size(); ++k) {
      double best = 1e300;
      for (const Complex& e : expected) best = std::min(best, std::abs(lifted(k) - e));
      CHECK(best < 1e-8 * (1.0 + a.norm() + omega));
    }
  }
}

TEST_CASE("transpose solve inverts the transposed lifted operator") {
  std::mt19937_64 rng(23);
  const RealMatrix a = fixtures::random_stable(rng, 3);
  const SylvesterOperator op(a, 1.2);
  const RealMatrix rhs = random_matrix(rng, 6, 2);
  CHECK((op.lifted() * op.solve(rhs) - rhs).norm() < 1e-10);
  CHECK((op.lifted().transpose() * op.solve_transpose(rhs) - rhs).norm() < 1e-10);
}

TEST_CASE("minimum-norm perturbation reconstruction") {
  const ProblemInstance eye(fixtures::bench_a(), fixtures::bench_b(), RealMatrix::Identity(2, 4),
                            SparsityPattern::all_free(2, 2));
  RealMatrix x = RealMatrix::Zero(4, 2);
  x(0, 0) = 1.0;
  x(1, 1) = 1.0;
  RealMatrix g(2, 2);
  g << 1, 2, 3, 4;
  CHECK(fixtures::rel_err(reconstruct_delta(eye, g, x), g) < 1e-14);
  CHECK(reconstruct_delta(eye, RealMatrix::Zero(2, 2), x).isZero(0.0));

  std::mt19937_64 rng(24);
  const ProblemInstance inst = fixtures::random_instance(rng, 5, 2, 3, true);
  const RealMatrix gg = random_matrix(rng, 2, 2);
  const RealMatrix xx = solve_x(inst, gg, 0.9);
  const RealMatrix cx = inst.C() * xx;
  const RealMatrix delta = reconstruct_delta(inst, gg, xx);
  CHECK((delta * cx - gg).norm() < 1e-8 * (1.0 + gg.norm()));
  const RealMatrix left_null = RealMatrix::Identity(3, 3) - cx * matops::pinv(cx);
  for (int trial = 0; trial < 100; ++trial) {
    const RealMatrix alt = delta + random_matrix(rng, 2, 3) * left_null;
    CHECK((alt * cx - gg).norm() < 1e-8 * (1.0 + gg.norm()));
    CHECK(delta.norm() <= alt.norm() + 1e-12);
  }
}

TEST_CASE("search point evaluation") {
  const ProblemInstance inst = fixtures::diagonal_case();
  SUBCASE("zero parameters are degenerate") {
    const SearchPoint pt = evaluate(inst, RealVector::Zero(4), 2.5);
    CHECK(pt.delta.isZero(0.0));
    CHECK(pt.x.isZero(0.0));
    CHECK_FALSE(pt.a3);
  }
  SUBCASE("reference initializer") {
    const SearchPoint pt = evaluate(inst, fixtures::diagonal_case_g0(), 2.5);
    CHECK(pt.a3);
    CHECK(matops::all_finite(pt.delta));
    CHECK(matops::all_finite(pt.x));
  }
}

TEST_CASE("search points assign the eigenvalue j omega") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 20; ++trial) {
    const ProblemInstance inst = fixtures::random_instance(rng, 4, 2, 2, true);
    const double omega = 0.5 + 0.25 * trial;
    const RealVector g = random_matrix(rng, 4, 1);
    const SearchPoint pt = evaluate(inst, g, omega);
    REQUIRE(pt.a3);
    const RealMatrix ad = perturbed_matrix(inst, pt.delta);
    const double scale = 1.0 + pt.x.norm() * (1.0 + ad.norm());
    CHECK((ad * pt.x - omega * pt.x * rotation_generator()).norm() < 1e-8 * scale);
    const RealMatrix g_mat = matops::unvec(g, 2, 2);
    CHECK(fixtures::rel_err(pt.delta, g_mat * matops::pinv(pt.cx)) < 1e-9);
    CHECK(fixtures::rel_err(pt.delta * pt.cx, g_mat) < 1e-8);
  }
}
