#ifndef SPARSESR_MODEL_HPP
#define SPARSESR_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "sparsesr/matops.hpp"

namespace sparsesr {

/// Relative threshold on sigma_2(CX) / sigma_1(CX) below which CX is treated as
/// rank deficient.
inline constexpr double kRankTol = 1e-9;

/// Default penalty weight on entries that the pattern forces to zero.
inline constexpr double kDefaultPenaltyWeight = 100.0;

struct Entry {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Binary m x p mask of freely perturbable entries (1 = free, 0 = forced zero).
class SparsityPattern {
 public:
  explicit SparsityPattern(RealMatrix mask);
  static SparsityPattern all_free(Eigen::Index m, Eigen::Index p);
  static SparsityPattern from_entries(Eigen::Index m, Eigen::Index p,
                                      const std::vector<Entry>& free_entries);

  Eigen::Index rows() const { return mask_.rows(); }
  Eigen::Index cols() const { return mask_.cols(); }
  const RealMatrix& mask() const { return mask_; }
  /// S^c = 1 - S.
  RealMatrix complement() const;

  /// Number of entries forced to zero (rows of the selector).
  Eigen::Index num_constrained() const { return static_cast<Eigen::Index>(constrained_.size()); }
  /// Column-stacked indices of forced-zero entries, ascending.
  const std::vector<Eigen::Index>& constrained_indices() const { return constrained_; }
  /// The n_s x mp selector whose rows are e_k^T for k in supp(vec(S^c)).
  RealMatrix selector() const;

  std::vector<Entry> free_entries() const;
  bool is_free(Eigen::Index i, Eigen::Index j) const { return mask_(i, j) != 0.0; }
  bool fully_free() const { return constrained_.empty(); }

 private:
  RealMatrix mask_;
  std::vector<Eigen::Index> constrained_;
};

/// The quadruple (A, B, C, S) describing A(Delta) = A + B Delta C with Delta
/// restricted by S.
class ProblemInstance {
 public:
  ProblemInstance(RealMatrix a, RealMatrix b, RealMatrix c, SparsityPattern pattern);

  const RealMatrix& A() const { return a_; }
  const RealMatrix& B() const { return b_; }
  const RealMatrix& C() const { return c_; }
  const SparsityPattern& pattern() const { return pattern_; }

  Eigen::Index n() const { return a_.rows(); }
  Eigen::Index m() const { return b_.cols(); }
  Eigen::Index p() const { return c_.rows(); }

  ProblemInstance with_pattern(SparsityPattern pattern) const;

 private:
  RealMatrix a_;
  RealMatrix b_;
  RealMatrix c_;
  SparsityPattern pattern_;
};

/// Entrywise penalty weights W = 1 + (w - 1) S^c and the diagonal of
/// Wbar = diag(vec(W o W)).
class WeightMatrix {
 public:
  WeightMatrix(const SparsityPattern& pattern, double w);

  double w() const { return w_; }
  const RealMatrix& matrix() const { return weights_; }
  /// vec(W o W), the diagonal of Wbar.
  const RealVector& squared_diagonal() const { return squared_; }
  RealMatrix dense_squared() const { return squared_.asDiagonal(); }
  /// True when every weight is 1 (no forced zeros, or w == 1).
  bool uniform() const { return uniform_; }

 private:
  double w_;
  RealMatrix weights_;
  RealVector squared_;
  bool uniform_;
};

/// A + B Delta C.
RealMatrix perturbed_matrix(const ProblemInstance& inst, const RealMatrix& delta);

struct StabilityCheck {
  double abscissa = 0.0;
  bool pass = false;
};

/// Assumption A1: alpha(A) < 0.
StabilityCheck check_a1(const ProblemInstance& inst);

struct RankCheck {
  bool full_rank = false;
  double sigma_ratio = 0.0;  ///< sigma_2 / sigma_1 of CX (0 when undefined)
  std::string note;
};

/// Assumption A3: CX has full column rank. X may have one or two columns; the
/// one-column case serves the real-eigenvector (omega = 0) parametrization.
RankCheck check_a3(const ProblemInstance& inst, const RealMatrix& x, double rank_tol = kRankTol);

struct SparseProjection {
  RealMatrix projected;   ///< S o Delta
  double error = 0.0;     ///< ||Delta - S o Delta||_F
};

SparseProjection project_sparse(const RealMatrix& delta, const SparsityPattern& pattern);

/// Instance with B, C and S restricted to the rows/columns of Delta that hold at
/// least one free entry. Entries outside those rows and columns are forced to
/// zero anyway, so both instances share the same stability radius.
struct SupportReduction {
  ProblemInstance reduced;
  std::vector<Eigen::Index> kept_rows;
  std::vector<Eigen::Index> kept_cols;

  /// Re-embed a Delta of the reduced instance into the original m x p shape.
  RealMatrix expand(const RealMatrix& reduced_delta, Eigen::Index m, Eigen::Index p) const;
};

SupportReduction restrict_to_support(const ProblemInstance& inst);

}  // namespace sparsesr

#endif  // SPARSESR_MODEL_HPP
