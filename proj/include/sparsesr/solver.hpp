#ifndef SPARSESR_SOLVER_HPP
#define SPARSESR_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sparsesr/objective.hpp"

namespace sparsesr {

enum class DescentMode { gradient, newton };

/// backtracking: shrink from the initial step until the sufficient-decrease
/// condition holds. armijo: Armijo's rule with expansion, which also tries
/// initial / shrink^k while sufficient decrease keeps holding and the cost keeps
/// dropping.
enum class StepRule { backtracking, armijo };

struct SolverConfig {
  DescentMode mode = DescentMode::newton;
  double w = kDefaultPenaltyWeight;
  double eps = 1e-6;
  /// Newton mode only: use the exact Hessian H + eps I whenever it is positive
  /// definite, falling back to Z Wbar Z^T + eps I otherwise.
  bool exact_hessian = false;
  StepRule step_rule = StepRule::backtracking;
  double initial_step = 1.0;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  double min_step = 1e-14;
  /// Converged when ||grad|| <= grad_tol * (1 + |J_W|).
  double grad_tol = 1e-9;
  /// Also converged when the Gauss-Newton decrement
  /// grad^T (Z Wbar Z^T + eps I)^{-1} grad falls below decrement_tol * (1 + |J_W|);
  /// at large w the gradient bottoms out at roundoff well above grad_tol.
  double decrement_tol = 1e-13;
  int max_iters = 500;
  /// Jitter magnitude relative to 1 + ||g||.
  double jitter_scale = 1e-6;
  int max_jitter = 10;
  std::uint64_t seed = 0;
  int multistart_count = 50;
  bool omega_zero_mode = false;
  double alpha_tol = 1e-4;
  /// Distance from j*omega to the nearest eigenvalue of A(S o Delta) below which
  /// the sparsified point still assigns the eigenvalue.
  double boundary_tol = 1e-3;
  /// After convergence at w the penalty is raised by `continuation_factor` up to
  /// this weight, warm-starting each stage. Values <= w disable continuation.
  double continuation_max_w = 1e4;
  double continuation_factor = 10.0;
  /// |omega| below which a two-column solve is retried in the real-eigenvector form.
  /// A two-column descent whose iterate stays below it for `collapse_iters`
  /// consecutive iterations is abandoned.
  double omega_zero_threshold = 1e-3;
  int collapse_iters = 10;
  /// Worker threads for multistart; 0 uses all available cores.
  int jobs = 0;

  /// Throws Error on an invalid combination.
  void validate() const;
};

enum class Termination {
  gradient_tolerance,  ///< ||grad|| <= grad_tol (1 + |J_W|)
  decrement_tolerance, ///< Newton decrement at roundoff level
  line_search_stalled, ///< no step >= min_step decreases the cost
  max_iterations,
  omega_collapsed,     ///< two-column iterate stayed below omega_zero_threshold
};

std::string to_string(Termination t);
std::string to_string(DescentMode m);
std::string to_string(StepRule r);
DescentMode parse_descent_mode(const std::string& s);
StepRule parse_step_rule(const std::string& s);

struct IterationRecord {
  int iter = 0;
  double cost = 0.0;
  double grad_norm = 0.0;
  double omega = 0.0;
  double alpha = 0.0;   ///< spectral abscissa of A(Delta)
  double beta = 0.0;    ///< step accepted from this iterate (0 for the last one)
  double delta_fnorm = 0.0;
};

struct SolveResult {
  RealMatrix delta;         ///< raw Delta-hat at the final weight
  RealMatrix delta_sparse;  ///< S o Delta-hat
  double omega = 0.0;       ///< canonical, >= 0
  RealMatrix x;             ///< X-hat, n x 2 (n x 1 for the real-eigenvector form)
  ComplexVector eigvec;     ///< x-hat = X[:,0] + j X[:,1], unit norm
  RealVector g;             ///< final vec(G), consistent with the canonical omega
  int columns = 2;

  double fnorm = 0.0;
  double fnorm_sparse = 0.0;
  double sparsity_error = 0.0;  ///< E = ||Delta - S o Delta||_F
  double cost = 0.0;            ///< J_W at `final_weight`
  double grad_norm = 0.0;
  double final_weight = 0.0;
  double alpha = 0.0;           ///< alpha(A(Delta-hat))
  double alpha_sparse = 0.0;    ///< alpha(A(S o Delta-hat))
  double eig_residual = 0.0;    ///< ||(A + B Delta C) x - j omega x||
  double boundary_distance = 0.0;  ///< min |lambda - j omega| over A(S o Delta-hat)

  bool converged = false;
  bool raw_valid = false;         ///< |alpha(A(Delta-hat))| <= alpha_tol
  bool sparse_stationary = false; ///< S o Delta-hat still assigns j omega
  bool valid_local_min = false;
  Termination termination = Termination::max_iterations;
  int iterations = 0;             ///< iterations at the configured weight
  int continuation_iterations = 0;
  int jitters = 0;
  std::vector<IterationRecord> trace;  ///< iterations at the configured weight
};

/// Raised when the cost becomes non-finite; carries the trace up to that point.
class SolveFailure : public NumericError {
 public:
  SolveFailure(const std::string& what, std::vector<IterationRecord> trace)
      : NumericError(what), trace_(std::move(trace)) {}
  const std::vector<IterationRecord>& trace() const { return trace_; }

 private:
  std::vector<IterationRecord> trace_;
};

/// Penalized gradient / damped-Newton descent on (g, omega) from (g0, omega0).
/// g0 has length 2m (column-stacked G).
SolveResult solve(const ProblemInstance& inst, const SolverConfig& config, const RealVector& g0,
                  double omega0);

/// The same descent on the real-eigenvector form (A + B Delta C) x = 0; g0 has
/// length m.
SolveResult solve_omega_zero(const ProblemInstance& inst, const SolverConfig& config,
                             const RealVector& g0);

struct StartPoint {
  RealVector g;
  double omega = 0.0;
};

/// Deterministic initializers for start `index` under `seed`: omega at each
/// distinct |Im lambda| of A first, then log-uniform draws.
StartPoint sample_start(const ProblemInstance& inst, std::uint64_t seed, int index);

struct StartFailure {
  int start = 0;
  std::string message;
};

struct MultistartResult {
  std::vector<SolveResult> distinct;  ///< deduplicated, sorted by ||Delta-hat||_F
  std::optional<std::size_t> best;    ///< index into distinct of the smallest valid minimum
  double radius = 0.0;                ///< r_C, +inf when no certificate
  int runs = 0;
  std::vector<StartFailure> failures;
  bool certified() const { return best.has_value(); }
};

/// Two results are the same stationary point if their norms differ by less than
/// 1e-3 and their frequencies by less than 1e-2.
bool same_stationary_point(const SolveResult& a, const SolveResult& b);

MultistartResult multistart(const ProblemInstance& inst, const SolverConfig& config);

/// Multistart seeded with extra initializers in addition to the sampled ones.
MultistartResult multistart(const ProblemInstance& inst, const SolverConfig& config,
                            const std::vector<StartPoint>& extra_starts);

struct SweepRow {
  double w = 0.0;
  std::optional<SolveResult> result;  ///< lowest-cost result with alpha(A(Delta)) ~ 0
  std::string error;
};

/// Multistart at each weight without penalty continuation, warm-started from
/// the previous row.
std::vector<SweepRow> weight_sweep(const ProblemInstance& inst, const SolverConfig& config,
                                   const std::vector<double>& weights);

}  // namespace sparsesr

#endif  // SPARSESR_SOLVER_HPP
