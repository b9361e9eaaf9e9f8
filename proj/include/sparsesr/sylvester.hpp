#ifndef SPARSESR_SYLVESTER_HPP
#define SPARSESR_SYLVESTER_HPP

#include <Eigen/LU>

#include "sparsesr/model.hpp"

namespace sparsesr {

/// The 2x2 rotation generator [[0, 1], [-1, 0]].
RealMatrix rotation_generator();

/// Kronecker-lifted form of X -> A X - omega X Ibar acting on vec(X):
///   Atilde(omega) = I_2 (x) A + omega (Ibar (x) I_n).
/// With one column the operator degenerates to A itself (omega is ignored).
/// The LU factorization is computed once and reused for plain and transposed
/// solves at the same omega.
class SylvesterOperator {
 public:
  SylvesterOperator(const RealMatrix& a, double omega, int columns = 2);

  double omega() const { return omega_; }
  int columns() const { return columns_; }
  Eigen::Index size() const { return lifted_.rows(); }
  const RealMatrix& lifted() const { return lifted_; }

  RealMatrix solve(const RealMatrix& rhs) const;
  RealMatrix solve_transpose(const RealMatrix& rhs) const;

 private:
  double omega_;
  int columns_;
  RealMatrix lifted_;
  Eigen::PartialPivLU<RealMatrix> lu_;
};

/// Solve A X - omega X Ibar = -B G. G is m x 2 (or m x 1 for the real-eigenvector
/// variant, where the equation reads A X = -B G).
RealMatrix solve_x(const ProblemInstance& inst, const RealMatrix& g, double omega);

/// Minimum Frobenius-norm solution Delta = G (CX)^+ of Delta C X = G.
/// Throws RankAssumptionError when CX is rank deficient.
RealMatrix reconstruct_delta(const ProblemInstance& inst, const RealMatrix& g,
                             const RealMatrix& x);

/// Minimum ||W o Delta||_F solution of Delta C X = G. Coincides with
/// reconstruct_delta() when CX is square or W is uniform.
RealMatrix reconstruct_delta_weighted(const ProblemInstance& inst, const RealMatrix& g,
                                      const RealMatrix& x, const WeightMatrix& weights);

/// Free variables (g, omega) of the reparametrized problem together with the
/// quantities derived from them.
struct SearchPoint {
  RealVector g;              ///< vec(G), length columns * m
  double omega = 0.0;
  int columns = 2;           ///< 2: eigenpair +-j*omega, 1: real eigenvector at 0
  RealMatrix x{};            ///< X, n x columns
  RealVector x_vec{};        ///< vec(X)
  RealMatrix cx{};           ///< C X
  RealMatrix delta{};        ///< Delta, m x p
  RealVector delta_vec{};    ///< vec(Delta)
  bool a3 = false;
  double sigma_ratio = 0.0;  ///< sigma_min / sigma_max of CX
  bool weighted = false;     ///< Delta minimizes ||W o Delta|| rather than ||Delta||
  SylvesterOperator op;

  RealMatrix G(Eigen::Index m) const { return matops::unvec(g, m, columns); }
};

/// Algorithm steps x <- -Atilde^{-1} Btilde g and delta <- Xtilde^+ g, with
/// Xtilde = (CX)^T (x) I_m. Never throws on an A3 violation; the flag is set
/// instead and Delta falls back to the truncated pseudoinverse.
SearchPoint evaluate(const ProblemInstance& inst, const RealVector& g, double omega);

/// Same as evaluate() but reconstructs Delta with the weighted minimum-norm rule.
SearchPoint evaluate(const ProblemInstance& inst, const RealVector& g, double omega,
                     const WeightMatrix& weights);

/// Real-eigenvector parametrization: X is n x 1, A X = -B G, Delta = G (CX)^+.
SearchPoint evaluate_real(const ProblemInstance& inst, const RealVector& g,
                          const WeightMatrix& weights);

}  // namespace sparsesr

#endif  // SPARSESR_SYLVESTER_HPP
