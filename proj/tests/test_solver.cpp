#include <doctest.h>

#include "fixtures.hpp"
#include "sparsesr/matops.hpp"
#include "sparsesr/solver.hpp"

using namespace sparsesr;

namespace {

const SolveResult* find_point(const MultistartResult& ms, double fnorm, double tol) {
  for (const SolveResult& r : ms.distinct)
    if (std::abs(r.fnorm - fnorm) < tol) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.eps = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolverConfig{};
  cfg.shrink = 1.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = SolverConfig{};
  cfg.multistart_count = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("Newton descent from the reference initializer") {
  const ProblemInstance inst = fixtures::diagonal_case();
  const SolverConfig cfg;
  const SolveResult r = solve(inst, cfg, fixtures::diagonal_case_g0(), 2.5);
  CHECK(r.converged);
  CHECK(r.iterations <= 200);
  CHECK(r.valid_local_min);
  CHECK(r.fnorm == doctest::Approx(0.5653).epsilon(1e-3 / 0.5653));
  CHECK(r.omega == doctest::Approx(1.3365).epsilon(1e-2 / 1.3365));
  CHECK(r.delta_sparse(0, 0) == doctest::Approx(-0.0418).epsilon(1e-2 / 0.0418));
  CHECK(r.delta_sparse(1, 1) == doctest::Approx(0.5638).epsilon(1e-2 / 0.5638));
  CHECK(r.delta_sparse(0, 1) == 0.0);
  CHECK(r.eig_residual < 1e-6);

  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].cost <= r.trace[k - 1].cost);
  }
}

TEST_CASE("gradient descent also decreases the cost") {
  const ProblemInstance inst = fixtures::diagonal_case();
  SolverConfig cfg;
  cfg.mode = DescentMode::gradient;
  cfg.max_iters = 60;
  cfg.continuation_max_w = 0.0;
  const SolveResult r = solve(inst, cfg, fixtures::diagonal_case_g0(), 2.5);
  REQUIRE(r.trace.size() > 1);
  for (std::size_t k = 1; k < r.trace.size(); ++k) {
    CHECK(r.trace[k].cost <= r.trace[k - 1].cost);
  }
  CHECK(r.trace.back().cost < r.trace.front().cost);
}

TEST_CASE("mirrored start gives the mirrored minimum") {
  const ProblemInstance inst = fixtures::diagonal_case();
  const SolverConfig cfg;
  RealVector g = fixtures::diagonal_case_g0();
  const SolveResult a = solve(inst, cfg, g, 2.5);
  g.tail(2) = -g.tail(2);
  const SolveResult b = solve(inst, cfg, g, -2.5);
  CHECK(b.omega >= 0.0);
  CHECK(b.fnorm == doctest::Approx(a.fnorm).epsilon(1e-8));
  CHECK(b.omega == doctest::Approx(a.omega).epsilon(1e-8));
}

TEST_CASE("scalar system crosses at zero") {
  RealMatrix a(1, 1), one(1, 1);
  a << -1;
  one << 1;
  const ProblemInstance inst(a, one, one, SparsityPattern(one));
  const SolveResult r = solve_omega_zero(inst, SolverConfig{}, RealVector::Ones(1));
  CHECK(r.columns == 1);
  CHECK(r.valid_local_min);
  CHECK(r.fnorm == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.delta(0, 0) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("diagonal systems lose stability through their slowest mode") {
  std::mt19937_64 rng(40);
  std::uniform_real_distribution<double> ud(0.2, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const RealVector d = -RealVector::NullaryExpr(4, [&] { return ud(rng); });
    const ProblemInstance inst(RealMatrix(d.asDiagonal()), RealMatrix::Identity(4, 4),
                               RealMatrix::Identity(4, 4),
                               SparsityPattern(RealMatrix::Identity(4, 4)));
    SolverConfig cfg;
    cfg.omega_zero_mode = true;
    cfg.multistart_count = 10;
    const MultistartResult ms = multistart(inst, cfg);
    REQUIRE(ms.certified());
    CHECK(ms.radius == doctest::Approx(d.cwiseAbs().minCoeff()).epsilon(1e-6));
  }
}

TEST_CASE("structurally infeasible pattern has no certificate") {
  RealMatrix a(2, 2), s(2, 2);
  a << -1, 2, 0, -2;
  s << 0, 1, 0, 0;
  const ProblemInstance inst(a, RealMatrix::Identity(2, 2), RealMatrix::Identity(2, 2),
                             SparsityPattern(s));
  SolverConfig cfg;
  cfg.multistart_count = 10;
  const MultistartResult ms = multistart(inst, cfg);
  CHECK_FALSE(ms.certified());
  CHECK(std::isinf(ms.radius));
}

TEST_CASE("unstable nominal matrix is rejected") {
  RealMatrix a(2, 2);
  a << 1, 0, 0, -2;
  const ProblemInstance inst(a, RealMatrix::Identity(2, 2), RealMatrix::Identity(2, 2),
                             SparsityPattern::all_free(2, 2));
  CHECK_THROWS_AS(solve(inst, SolverConfig{}, RealVector::Ones(4), 1.0), StabilityAssumptionError);
}

TEST_CASE("multistart on the dense benchmark") {
  const MultistartResult ms = multistart(fixtures::dense_case(), SolverConfig{});
  REQUIRE(ms.certified());
  CHECK(ms.radius == doctest::Approx(0.5159).epsilon(1e-3 / 0.5159));
  const SolveResult& best = ms.distinct[*ms.best];
  CHECK(best.cost == doctest::Approx(0.5 * best.fnorm * best.fnorm).epsilon(1e-6));
  const SolveResult* second = find_point(ms, 1.0592, 1e-3);
  REQUIRE(second != nullptr);
  CHECK(second->valid_local_min);
  CHECK(second->omega == doctest::Approx(10.8758).epsilon(1e-2 / 10.8758));
  for (const SolveResult& r : ms.distinct) {
    if (r.converged) {
      CHECK(r.eig_residual < 1e-6);
    }
  }
}

TEST_CASE("multistart on the diagonal benchmark flags the unstable stationary point") {
  const MultistartResult ms = multistart(fixtures::diagonal_case(), SolverConfig{});
  REQUIRE(ms.certified());
  CHECK(ms.radius == doctest::Approx(0.5653).epsilon(1e-3 / 0.5653));
  const SolveResult* bad = find_point(ms, 4.9622, 1e-3);
  REQUIRE(bad != nullptr);
  CHECK_FALSE(bad->valid_local_min);
  CHECK(bad->alpha > 0.0);
  CHECK(bad->omega == doctest::Approx(11.0790).epsilon(1e-2 / 11.079));
}

TEST_CASE("multistart is deterministic") {
  SolverConfig cfg;
  cfg.multistart_count = 8;
  cfg.seed = 7;
  const MultistartResult a = multistart(fixtures::diagonal_case(), cfg);
  const MultistartResult b = multistart(fixtures::diagonal_case(), cfg);
  REQUIRE(a.distinct.size() == b.distinct.size());
  for (std::size_t k = 0; k < a.distinct.size(); ++k) {
    CHECK(a.distinct[k].fnorm == b.distinct[k].fnorm);
    CHECK(a.distinct[k].omega == b.distinct[k].omega);
  }
}

TEST_CASE("weight sweep trends") {
  const std::vector<SweepRow> rows =
      weight_sweep(fixtures::diagonal_case(), SolverConfig{}, {5.0, 10.0, 20.0, 100.0});
  REQUIRE(rows.size() == 4);
  const double fnorm[] = {0.5609, 0.5642, 0.5651};
  const double omega[] = {1.3385, 1.3370, 1.3367};
  for (int k = 0; k < 3; ++k) {
    REQUIRE(rows[k].result.has_value());
    CHECK(std::abs(rows[k].result->fnorm - fnorm[k]) < 1e-3);
    CHECK(std::abs(rows[k].result->omega - omega[k]) < 1e-2);
  }
  REQUIRE(rows[3].result.has_value());
  for (int k = 1; k < 4; ++k) {
    CHECK(rows[k].result->sparsity_error < rows[k - 1].result->sparsity_error);
    CHECK(rows[k].result->fnorm >= rows[k - 1].result->fnorm);
  }
}
