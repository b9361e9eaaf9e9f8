#include <doctest.h>

#include "fixtures.hpp"
#include "sparsesr/matops.hpp"
#include "sparsesr/objective.hpp"

using namespace sparsesr;
using fixtures::random_matrix;

namespace {

struct RandomPoint {
  ProblemInstance inst;
  WeightMatrix weights;
  SearchPoint pt;
};

/// Draws instances and parameters until the point satisfies the rank assumption
/// and CX is well conditioned (sigma_min / sigma_max >= 0.1).
RandomPoint draw_point(std::mt19937_64& rng, int columns) {
  std::uniform_int_distribution<Eigen::Index> nd(2, 6), md(1, 3), pd(columns == 2 ? 2 : 1, 3);
  std::uniform_real_distribution<double> od(0.2, 4.0);
  const double ws[] = {1.0, 3.0, 10.0};
  std::uniform_int_distribution<int> wd(0, 2);
  for (;;) {
    const ProblemInstance inst = fixtures::random_instance(rng, nd(rng), md(rng), pd(rng));
    const WeightMatrix weights(inst.pattern(), ws[wd(rng)]);
    const RealVector g = random_matrix(rng, columns * inst.m(), 1);
    SearchPoint pt = columns == 2 ? evaluate(inst, g, od(rng), weights)
                                  : evaluate_real(inst, g, weights);
    if (pt.a3 && !ill_conditioned(pt) && pt.sigma_ratio >= 0.1) {
      return {inst, weights, std::move(pt)};
    }
  }
}

}  // namespace

TEST_CASE("cost of sparse perturbations ignores the weight") {
  const ProblemInstance inst = fixtures::diagonal_case();
  RealMatrix delta = RealMatrix::Zero(2, 2);
  delta(0, 0) = 0.3;
  delta(1, 1) = -1.1;
  for (double w : {1.0, 5.0, 1e4}) {
    CHECK(cost_split(delta, inst.pattern(), w) == doctest::Approx(0.5 * delta.squaredNorm()));
  }
  CHECK(cost_split(RealMatrix::Zero(2, 2), inst.pattern(), 100.0) == 0.0);
}

TEST_CASE("cost formulas agree on random points") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const RandomPoint rp = draw_point(rng, 2);
    const double a = cost(rp.pt, rp.weights);
    const double b = 0.5 * matops::vec(rp.pt.delta).dot(
                               rp.weights.squared_diagonal().cwiseProduct(matops::vec(rp.pt.delta)));
    const double c = cost_split(rp.pt.delta, rp.inst.pattern(), rp.weights.w());
    CHECK(std::abs(a - b) <= 1e-12 * (1.0 + a));
    CHECK(std::abs(a - c) <= 1e-12 * (1.0 + a));
  }
}

TEST_CASE("gradient on the benchmark initializer matches finite differences") {
  const ProblemInstance inst = fixtures::diagonal_case();
  const WeightMatrix weights(inst.pattern(), 100.0);
  const SearchPoint pt = evaluate(inst, fixtures::diagonal_case_g0(), 2.5, weights);
  REQUIRE(pt.a3);
  const RealVector g = gradient(inst, pt, weights);
  const RealVector fd = fd_gradient(inst, weights, pack(pt), 2);
  CHECK(g.size() == 5);
  CHECK((g - fd).norm() / (1.0 + g.norm()) < 1e-5);
}

TEST_CASE("analytic derivatives match finite differences on random instances") {
  std::mt19937_64 rng(32);
  int checked = 0;
  double worst_grad = 0.0;
  double worst_hess = 0.0;
  for (int trial = 0; trial < 120; ++trial) {
    const RandomPoint rp = draw_point(rng, 2);
    const RealVector z = pack(rp.pt);
    const RealVector g = gradient(rp.inst, rp.pt, rp.weights);
    const RealVector fd = fd_gradient(rp.inst, rp.weights, z, 2);
    const double ge = (g - fd).norm() / (1.0 + g.norm());

    const RealMatrix h = hessian(rp.inst, rp.pt, rp.weights).full();
    const RealMatrix fh = fd_hessian(rp.inst, rp.weights, z, 2);
    const double he = (h - fh).norm() / (1.0 + h.norm());

    CHECK(ge < 1e-5);
    CHECK(he < 1e-4);
    CHECK((h - h.transpose()).norm() == 0.0);
    worst_grad = std::max(worst_grad, ge);
    worst_hess = std::max(worst_hess, he);
    ++checked;
  }
  CHECK(checked >= 100);
  MESSAGE("worst gradient error " << worst_grad << ", worst Hessian error " << worst_hess);
}

TEST_CASE("real-eigenvector derivatives match finite differences") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 40; ++trial) {
    const RandomPoint rp = draw_point(rng, 1);
    const RealVector z = pack(rp.pt);
    const RealVector g = gradient(rp.inst, rp.pt, rp.weights);
    CHECK((g - fd_gradient(rp.inst, rp.weights, z, 1)).norm() / (1.0 + g.norm()) < 1e-5);
    const RealMatrix h = hessian(rp.inst, rp.pt, rp.weights).full();
    CHECK((h - fd_hessian(rp.inst, rp.weights, z, 1)).norm() / (1.0 + h.norm()) < 1e-4);
  }
}

TEST_CASE("Gauss-Newton matrix is positive semidefinite") {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 30; ++trial) {
    const RandomPoint rp = draw_point(rng, 2);
    const RealMatrix gn = hessian(rp.inst, rp.pt, rp.weights).gauss_newton;
    const Eigen::SelfAdjointEigenSolver<RealMatrix> es(gn);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10 * (1.0 + es.eigenvalues().cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("free variable count") {
  const ProblemInstance inst = fixtures::dense_case();
  CHECK(free_variable_count(inst, 2) == 5);
  CHECK(free_variable_count(inst, 1) == 2);
}
