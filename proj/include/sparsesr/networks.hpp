#ifndef SPARSESR_NETWORKS_HPP
#define SPARSESR_NETWORKS_HPP

#include <string>
#include <vector>

#include "sparsesr/solver.hpp"

namespace sparsesr {

enum class Topology { line, circle };

struct NetworkSpec {
  Topology topology = Topology::line;
  Eigen::Index nodes = 7;
  double self_weight = -2.5;
  double edge_weight = 1.0;
};

enum class EdgeClass { self_loops, off_diagonal, any };

struct EdgePatternQuery {
  int budget = 1;
  EdgeClass entry_class = EdgeClass::self_loops;
};

std::string to_string(Topology t);
std::string to_string(EdgeClass c);
Topology parse_topology(const std::string& s);
/// Accepts self / offdiag / any (and the long forms self_loops, off_diagonal).
EdgeClass parse_edge_class(const std::string& s);

/// Self loops on the diagonal, edge weights between neighbours (and between
/// nodes 1 and n for the circle), B = C = I, every entry of S zero.
ProblemInstance build_network(const NetworkSpec& spec);

/// Entries of A eligible for perturbation: diagonal, off-diagonal adjacency
/// support, or both, in column-major order.
std::vector<Entry> candidate_entries(const ProblemInstance& network, EdgeClass entry_class);

struct PatternResult {
  std::vector<Entry> entries;
  double sr = 0.0;          ///< +inf when no valid minimum was found
  double omega = 0.0;
  int columns = 0;          ///< 2: complex-pair crossing, 1: real crossing at 0
  RealMatrix delta;         ///< n x n, nonzero only on `entries`
  std::string error;
  int tie_group = 0;        ///< patterns whose SR agree within the tie tolerance share a group
  bool found() const { return error.empty(); }
};

/// Solves the sparse SR problem for every subset of `query.budget` candidate
/// entries and returns the results sorted by SR (failures last).
std::vector<PatternResult> rank_critical_edges(const NetworkSpec& spec,
                                               const EdgePatternQuery& query,
                                               const SolverConfig& config,
                                               double tie_tol = 1e-6);

}  // namespace sparsesr

#endif  // SPARSESR_NETWORKS_HPP
