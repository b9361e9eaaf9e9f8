#include "sparsesr/networks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsesr/parallel.hpp"

namespace sparsesr {

std::string to_string(Topology t) { return t == Topology::line ? "line" : "circle"; }

std::string to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::self_loops: return "self";
    case EdgeClass::off_diagonal: return "offdiag";
    case EdgeClass::any: return "any";
  }
  return "unknown";
}

Topology parse_topology(const std::string& s) {
  if (s == "line") return Topology::line;
  if (s == "circle") return Topology::circle;
  throw Error("unknown topology '" + s + "' (expected line or circle)");
}

EdgeClass parse_edge_class(const std::string& s) {
  if (s == "self" || s == "self_loops") return EdgeClass::self_loops;
  if (s == "offdiag" || s == "off_diagonal") return EdgeClass::off_diagonal;
  if (s == "any") return EdgeClass::any;
  throw Error("unknown entry class '" + s + "' (expected self, offdiag or any)");
}

ProblemInstance build_network(const NetworkSpec& spec) {
  const Eigen::Index n = spec.nodes;
  if (n < 2) throw Error("a network needs at least 2 nodes");
  RealMatrix a = spec.self_weight * RealMatrix::Identity(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    a(i, i + 1) = spec.edge_weight;
    a(i + 1, i) = spec.edge_weight;
  }
  if (spec.topology == Topology::circle && n > 2) {
    a(0, n - 1) = spec.edge_weight;
    a(n - 1, 0) = spec.edge_weight;
  }
  const RealMatrix eye = RealMatrix::Identity(n, n);
  return ProblemInstance(a, eye, eye, SparsityPattern(RealMatrix::Zero(n, n)));
}

std::vector<Entry> candidate_entries(const ProblemInstance& network, EdgeClass entry_class) {
  std::vector<Entry> out;
  const RealMatrix& a = network.A();
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const bool diag = i == j;
      const bool keep = entry_class == EdgeClass::self_loops   ? diag
                        : entry_class == EdgeClass::off_diagonal ? (!diag && a(i, j) != 0.0)
                                                                 : (diag || a(i, j) != 0.0);
      if (keep) out.push_back({i, j});
    }
  }
  return out;
}

namespace {

std::vector<std::vector<Entry>> subsets(const std::vector<Entry>& pool, int budget) {
  std::vector<std::vector<Entry>> out;
  const int n = static_cast<int>(pool.size());
  if (budget > n) return out;
  std::vector<int> idx(static_cast<std::size_t>(budget));
  for (int i = 0; i < budget; ++i) idx[static_cast<std::size_t>(i)] = i;
  while (true) {
    std::vector<Entry> pick;
    for (int i : idx) pick.push_back(pool[static_cast<std::size_t>(i)]);
    out.push_back(std::move(pick));
    int k = budget - 1;
    while (k >= 0 && idx[static_cast<std::size_t>(k)] == n - budget + k) --k;
    if (k < 0) break;
    ++idx[static_cast<std::size_t>(k)];
    for (int i = k + 1; i < budget; ++i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return out;
}

}  // namespace

std::vector<PatternResult> rank_critical_edges(const NetworkSpec& spec,
                                               const EdgePatternQuery& query,
                                               const SolverConfig& config, double tie_tol) {
  if (query.budget < 1) throw Error("budget must be at least 1");
  const ProblemInstance network = build_network(spec);
  if (!check_a1(network).pass) throw StabilityAssumptionError("network state matrix is unstable");
  const std::vector<Entry> pool = candidate_entries(network, query.entry_class);
  const auto patterns = subsets(pool, query.budget);
  if (patterns.size() > 10000) throw Error("too many patterns to enumerate");

  SolverConfig cfg = config;
  cfg.omega_zero_mode = true;
  const int jobs = config.jobs;
  cfg.jobs = 1;
  const Eigen::Index n = network.n();

  std::vector<PatternResult> results(patterns.size());
  parallel_for(patterns.size(), jobs, [&](std::size_t i) {
    PatternResult& pr = results[i];
    pr.entries = patterns[i];
    pr.sr = std::numeric_limits<double>::infinity();
    try {
      const ProblemInstance inst =
          network.with_pattern(SparsityPattern::from_entries(n, n, pr.entries));
      const SupportReduction red = restrict_to_support(inst);
      const MultistartResult ms = multistart(red.reduced, cfg);
      if (!ms.certified()) {
        pr.error = "no valid minimum";
        return;
      }
      const SolveResult& best = ms.distinct[*ms.best];
      pr.sr = ms.radius;
      pr.omega = best.omega;
      pr.columns = best.columns;
      pr.delta = red.expand(best.delta_sparse, n, n);
    } catch (const Error& e) {
      pr.error = e.what();
    }
  });

  std::stable_sort(results.begin(), results.end(), [](const PatternResult& a, const PatternResult& b) {
    return a.sr < b.sr;
  });
  int group = 0;
  double anchor = 0.0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (i == 0 || !(std::abs(results[i].sr - anchor) <= tie_tol)) {
      if (i > 0) ++group;
      anchor = results[i].sr;
    }
    results[i].tie_group = group;
  }
  return results;
}

}  // namespace sparsesr
