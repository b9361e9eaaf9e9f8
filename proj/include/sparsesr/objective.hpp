#ifndef SPARSESR_OBJECTIVE_HPP
#define SPARSESR_OBJECTIVE_HPP

#include "sparsesr/sylvester.hpp"

namespace sparsesr {

/// sigma_min(CX) / sigma_max(CX) below this marks a gradient as untrustworthy.
inline constexpr double kIllConditionedRatio = 1e-6;

/// J_W = 1/2 ||W o Delta||_F^2 = 1/2 delta^T Wbar delta.
double cost(const SearchPoint& pt, const WeightMatrix& weights);

/// The same cost written as 1/2 ||Delta||^2 + 1/2 (w^2 - 1) ||S^c o Delta||^2.
double cost_split(const RealMatrix& delta, const SparsityPattern& pattern, double w);

/// Number of free variables: 2m + 1 for (g, omega), m for the real-eigenvector form.
Eigen::Index free_variable_count(const ProblemInstance& inst, int columns);

/// Packs (g, omega) into zbar; omega is omitted for one-column points.
RealVector pack(const SearchPoint& pt);

/// Evaluates the point described by a packed zbar.
SearchPoint evaluate_packed(const ProblemInstance& inst, const RealVector& zbar, int columns,
                            const WeightMatrix& weights);

/// Intermediate Kronecker-lifted operators at one search point.
///
///   Xtilde = (CX)^T (x) I_m           Btilde = I (x) B
///   Dtilde = I (x) (Delta C)          Itilde = Ibar (x) I_n
///   Y = Atilde^{-1} [Btilde, Itilde x_v]
///   Z = [Xtilde^+ (I + Dtilde Y)]^T   (omega column only for two-column points)
///
/// Xtilde^+ is the Wbar-weighted right inverse when Delta was reconstructed with
/// weights; it reduces to the plain pseudoinverse when CX is square.
struct GradientWorkspace {
  int columns = 2;
  RealMatrix xtilde;
  RealMatrix xtilde_pinv;
  RealMatrix btilde;
  RealMatrix dtilde;
  RealMatrix itilde;
  RealMatrix y;
  RealMatrix z;
  RealVector multiplier;  ///< (Xtilde^+)^T Wbar delta = vec((W o W o Delta)((CX)^+)^T)
};

/// Throws RankAssumptionError when the point violates A3.
GradientWorkspace build_workspace(const ProblemInstance& inst, const SearchPoint& pt,
                                  const WeightMatrix& weights);

RealVector gradient(const ProblemInstance& inst, const SearchPoint& pt,
                    const WeightMatrix& weights);
RealVector gradient(const GradientWorkspace& ws, const SearchPoint& pt,
                    const WeightMatrix& weights);

struct HessianParts {
  RealMatrix gauss_newton;     ///< Z Wbar Z^T
  RealMatrix m;                ///< second-order term M (H = Z Wbar Z^T + M + M^T + ...)
  RealMatrix null_correction;  ///< nonzero only when CX has more rows than columns
  RealMatrix full() const { return gauss_newton + (m + m.transpose()) + null_correction; }
};

HessianParts hessian(const ProblemInstance& inst, const SearchPoint& pt,
                     const WeightMatrix& weights);
HessianParts hessian(const GradientWorkspace& ws, const ProblemInstance& inst,
                     const SearchPoint& pt, const WeightMatrix& weights);

/// Z Wbar Z^T only; this is H + V with V = eps I - M - M^T, minus the eps I.
RealMatrix gauss_newton(const GradientWorkspace& ws, const WeightMatrix& weights);

bool ill_conditioned(const SearchPoint& pt);

/// Fourth-order centered differences of cost() with per-coordinate step h * max(1, |z_i|).
RealVector fd_gradient(const ProblemInstance& inst, const WeightMatrix& weights,
                       const RealVector& zbar, int columns, double h = 1e-6);

/// The same stencil applied to the analytic gradient.
RealMatrix fd_hessian(const ProblemInstance& inst, const WeightMatrix& weights,
                      const RealVector& zbar, int columns, double h = 1e-5);

}  // namespace sparsesr

#endif  // SPARSESR_OBJECTIVE_HPP
