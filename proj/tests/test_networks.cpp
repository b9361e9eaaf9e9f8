#include <doctest.h>

#include <map>

#include "fixtures.hpp"
#include "sparsesr/matops.hpp"
#include "sparsesr/networks.hpp"
#include "sparsesr/verify.hpp"

using namespace sparsesr;

namespace {

NetworkSpec line(Eigen::Index n) {
  NetworkSpec spec;
  spec.topology = Topology::line;
  spec.nodes = n;
  return spec;
}

}  // namespace

TEST_CASE("network construction") {
  const ProblemInstance two = build_network(line(2));
  RealMatrix expected(2, 2);
  expected << -2.5, 1, 1, -2.5;
  CHECK(two.A() == expected);
  CHECK(two.pattern().mask().isZero(0.0));

  CHECK(matops::spectral_abscissa(build_network(line(7)).A()) < 0.0);
  CHECK(matops::spectral_abscissa(build_network(line(7)).A()) ==
        doctest::Approx(-2.5 + 2.0 * std::cos(M_PI / 8.0)).epsilon(1e-9));

  NetworkSpec ring = line(7);
  ring.topology = Topology::circle;
  const ProblemInstance c = build_network(ring);
  CHECK(c.A()(0, 6) == 1.0);
  CHECK(c.A()(6, 0) == 1.0);
  CHECK(matops::spectral_abscissa(c.A()) == doctest::Approx(-0.5).epsilon(1e-9));
}

TEST_CASE("candidate entries") {
  const ProblemInstance net = build_network(line(4));
  CHECK(candidate_entries(net, EdgeClass::self_loops).size() == 4u);
  CHECK(candidate_entries(net, EdgeClass::off_diagonal).size() == 6u);
  CHECK(candidate_entries(net, EdgeClass::any).size() == 10u);
}

TEST_CASE("parsing topology and entry class names") {
  CHECK(parse_topology("circle") == Topology::circle);
  CHECK(parse_edge_class("offdiag") == EdgeClass::off_diagonal);
  CHECK(parse_edge_class("self_loops") == EdgeClass::self_loops);
  CHECK_THROWS_AS(parse_topology("star"), Error);
}

TEST_CASE("two-node line") {
  SolverConfig cfg;
  cfg.multistart_count = 10;
  const std::vector<PatternResult> ranking = rank_critical_edges(line(2), {1, EdgeClass::self_loops}, cfg);
  REQUIRE(ranking.size() == 2u);
  for (const PatternResult& r : ranking) {
    REQUIRE(r.found());
    CHECK(r.sr == doctest::Approx(2.1).epsilon(1e-6));
    CHECK(r.columns == 1);
  }
  CHECK(ranking[0].tie_group == ranking[1].tie_group);

  ProblemInstance net = build_network(line(2));
  const BruteForceResult bf =
      brute_force_sr(net.with_pattern(SparsityPattern::from_entries(2, 2, {{0, 0}})));
  CHECK(ranking[0].sr >= bf.lower - 1e-9);
  CHECK(ranking[0].sr <= bf.upper + 1e-9);
}

TEST_CASE("seven-node line self loops") {
  SolverConfig cfg;
  cfg.multistart_count = 10;
  const std::vector<PatternResult> ranking = rank_critical_edges(line(7), {1, EdgeClass::self_loops}, cfg);
  REQUIRE(ranking.size() == 7u);
  CHECK(ranking[0].entries[0] == Entry{3, 3});
  CHECK(ranking[0].sr == doctest::Approx(1.5118).epsilon(1e-3 / 1.5118));

  std::map<Eigen::Index, double> by_node;
  for (const PatternResult& r : ranking) {
    REQUIRE(r.found());
    by_node[r.entries[0].row] = r.sr;
  }
  for (Eigen::Index k = 0; k < 7; ++k) {
    CHECK(std::abs(by_node[k] - by_node[6 - k]) < 1e-6);
  }
  for (Eigen::Index k = 0; k < 3; ++k) {
    CHECK(by_node[k] >= by_node[k + 1]);
  }
}
