#include "sparsesr/sylvester.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <limits>

namespace sparsesr {

RealMatrix rotation_generator() {
  RealMatrix ib(2, 2);
  ib << 0.0, 1.0, -1.0, 0.0;
  return ib;
}

SylvesterOperator::SylvesterOperator(const RealMatrix& a, double omega, int columns)
    : omega_(columns == 2 ? omega : 0.0), columns_(columns) {
  if (columns != 1 && columns != 2) throw DimensionError("Sylvester operator needs 1 or 2 columns");
  if (!std::isfinite(omega)) throw NumericError("omega is not finite");
  const Eigen::Index n = a.rows();
  if (columns == 1) {
    lifted_ = a;
  } else {
    lifted_ = matops::kron(RealMatrix::Identity(2, 2), a) +
              omega * matops::kron(rotation_generator(), RealMatrix::Identity(n, n));
  }
  lu_.compute(lifted_);
  // Atilde(omega) is singular only if +-j*omega is an eigenvalue of A.
  const double rc = lu_.rcond();
  if (!(rc > 64.0 * std::numeric_limits<double>::epsilon())) {
    throw StabilityAssumptionError("Sylvester operator is singular at omega = " +
                                   std::to_string(omega) + " (A has an eigenvalue at +-j*omega)");
  }
}

RealMatrix SylvesterOperator::solve(const RealMatrix& rhs) const { return lu_.solve(rhs); }

RealMatrix SylvesterOperator::solve_transpose(const RealMatrix& rhs) const {
  return lu_.transpose().solve(rhs);
}

RealMatrix solve_x(const ProblemInstance& inst, const RealMatrix& g, double omega) {
  if (g.rows() != inst.m() || g.cols() < 1 || g.cols() > 2) {
    throw DimensionError("G must be " + std::to_string(inst.m()) + "x2 (or x1)");
  }
  const auto k = static_cast<int>(g.cols());
  SylvesterOperator op(inst.A(), omega, k);
  const RealMatrix bt = matops::kron(RealMatrix::Identity(k, k), inst.B());
  const RealVector xv = -op.solve(bt * matops::vec(g));
  return matops::unvec(xv, inst.n(), k);
}

namespace {

RealMatrix weighted_solution(const RealMatrix& g, const RealMatrix& cx, const RealVector& wsq,
                             Eigen::Index m, Eigen::Index p) {
  // Rows of Delta decouple: row i minimizes sum_j W_ij^2 Delta_ij^2 subject to
  // Delta_i CX = G_i, giving Delta_i = G_i (CX^T D_i^{-1} CX)^{-1} CX^T D_i^{-1}.
  RealMatrix delta(m, p);
  for (Eigen::Index i = 0; i < m; ++i) {
    RealVector dinv(p);
    for (Eigen::Index j = 0; j < p; ++j) dinv(j) = 1.0 / wsq(i + j * m);
    const RealMatrix scaled = dinv.asDiagonal() * cx;  // D_i^{-1} CX
    const RealMatrix gram = cx.transpose() * scaled;   // CX^T D_i^{-1} CX
    const RealMatrix coeff = gram.ldlt().solve(g.row(i).transpose());
    delta.row(i) = (scaled * coeff).transpose();
  }
  return delta;
}

SearchPoint evaluate_impl(const ProblemInstance& inst, const RealVector& g, double omega,
                          int columns, const WeightMatrix* weights) {
  const Eigen::Index m = inst.m();
  if (g.size() != columns * m) {
    throw DimensionError("g must have length " + std::to_string(columns * m));
  }
  if (!g.allFinite()) throw NumericError("g is not finite");
  SearchPoint pt{.g = g,
                 .omega = columns == 2 ? omega : 0.0,
                 .columns = columns,
                 .op = SylvesterOperator(inst.A(), omega, columns)};
  const RealMatrix bt = matops::kron(RealMatrix::Identity(columns, columns), inst.B());
  pt.x_vec = -pt.op.solve(bt * g);
  pt.x = matops::unvec(pt.x_vec, inst.n(), columns);
  pt.cx = inst.C() * pt.x;

  const RankCheck rc = check_a3(inst, pt.x);
  pt.a3 = rc.full_rank;
  pt.sigma_ratio = rc.sigma_ratio;

  const RealMatrix gm = matops::unvec(g, m, columns);
  const bool use_weights =
      weights != nullptr && !weights->uniform() && inst.p() > columns && pt.a3;
  if (use_weights) {
    pt.delta = weighted_solution(gm, pt.cx, weights->squared_diagonal(), m, inst.p());
    pt.weighted = true;
  } else {
    pt.delta = gm * matops::pinv(pt.cx, pt.a3 ? matops::kDefaultPinvTol : kRankTol);
  }
  pt.delta_vec = matops::vec(pt.delta);
  if (!pt.delta.allFinite()) throw NumericError("reconstructed Delta is not finite");
  return pt;
}

}  // namespace

RealMatrix reconstruct_delta(const ProblemInstance& inst, const RealMatrix& g,
                             const RealMatrix& x) {
  if (g.rows() != inst.m() || g.cols() != x.cols()) {
    throw DimensionError("G and X column counts differ");
  }
  const RankCheck rc = check_a3(inst, x);
  if (!rc.full_rank) throw RankAssumptionError("CX is not full column rank: " + rc.note);
  return g * matops::pinv(RealMatrix(inst.C() * x));
}

RealMatrix reconstruct_delta_weighted(const ProblemInstance& inst, const RealMatrix& g,
                                      const RealMatrix& x, const WeightMatrix& weights) {
  if (g.rows() != inst.m() || g.cols() != x.cols()) {
    throw DimensionError("G and X column counts differ");
  }
  const RankCheck rc = check_a3(inst, x);
  if (!rc.full_rank) throw RankAssumptionError("CX is not full column rank: " + rc.note);
  return weighted_solution(g, inst.C() * x, weights.squared_diagonal(), inst.m(), inst.p());
}

SearchPoint evaluate(const ProblemInstance& inst, const RealVector& g, double omega) {
  return evaluate_impl(inst, g, omega, 2, nullptr);
}

SearchPoint evaluate(const ProblemInstance& inst, const RealVector& g, double omega,
                     const WeightMatrix& weights) {
  return evaluate_impl(inst, g, omega, 2, &weights);
}

SearchPoint evaluate_real(const ProblemInstance& inst, const RealVector& g,
                          const WeightMatrix& weights) {
  return evaluate_impl(inst, g, 0.0, 1, &weights);
}

}  // namespace sparsesr
