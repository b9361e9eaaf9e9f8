#include "sparsesr/objective.hpp"

#include <algorithm>
#include <cmath>

namespace sparsesr {

double cost(const SearchPoint& pt, const WeightMatrix& weights) {
  return 0.5 * pt.delta_vec.dot(weights.squared_diagonal().cwiseProduct(pt.delta_vec));
}

double cost_split(const RealMatrix& delta, const SparsityPattern& pattern, double w) {
  const RealMatrix off = matops::hadamard(pattern.complement(), delta);
  return 0.5 * delta.squaredNorm() + 0.5 * (w * w - 1.0) * off.squaredNorm();
}

Eigen::Index free_variable_count(const ProblemInstance& inst, int columns) {
  return columns * inst.m() + (columns == 2 ? 1 : 0);
}

RealVector pack(const SearchPoint& pt) {
  if (pt.columns == 1) return pt.g;
  RealVector z(pt.g.size() + 1);
  z << pt.g, pt.omega;
  return z;
}

SearchPoint evaluate_packed(const ProblemInstance& inst, const RealVector& zbar, int columns,
                            const WeightMatrix& weights) {
  if (zbar.size() != free_variable_count(inst, columns)) {
    throw DimensionError("zbar has the wrong length");
  }
  if (columns == 1) return evaluate_real(inst, zbar, weights);
  return evaluate(inst, zbar.head(zbar.size() - 1), zbar(zbar.size() - 1), weights);
}

GradientWorkspace build_workspace(const ProblemInstance& inst, const SearchPoint& pt,
                                  const WeightMatrix& weights) {
  if (!pt.a3) throw RankAssumptionError("gradient undefined: CX is not full column rank");
  const int k = pt.columns;
  const Eigen::Index n = inst.n();
  const Eigen::Index m = inst.m();
  const Eigen::Index p = inst.p();
  const bool needs_weighting = !weights.uniform() && p > k;
  if (needs_weighting && !pt.weighted) {
    throw DimensionError("search point was not reconstructed with the penalty weights");
  }

  GradientWorkspace ws;
  ws.columns = k;
  const RealMatrix ik = RealMatrix::Identity(k, k);
  ws.xtilde = matops::kron(pt.cx.transpose(), RealMatrix::Identity(m, m));
  ws.btilde = matops::kron(ik, inst.B());
  ws.dtilde = matops::kron(ik, RealMatrix(pt.delta * inst.C()));

  const RealMatrix cx_pinv = matops::pinv(pt.cx);
  if (needs_weighting) {
    const RealVector winv = weights.squared_diagonal().cwiseInverse();
    const RealMatrix scaled = winv.asDiagonal() * ws.xtilde.transpose();
    const RealMatrix gram = ws.xtilde * scaled;
    ws.xtilde_pinv = scaled * gram.ldlt().solve(RealMatrix::Identity(gram.rows(), gram.cols()));
  } else {
    ws.xtilde_pinv = matops::kron(RealMatrix(cx_pinv.transpose()), RealMatrix::Identity(m, m));
  }

  const Eigen::Index nz = free_variable_count(inst, k);
  RealMatrix rhs(k * n, nz);
  if (k == 2) {
    ws.itilde = matops::kron(rotation_generator(), RealMatrix::Identity(n, n));
    rhs << ws.btilde, ws.itilde * pt.x_vec;
  } else {
    rhs = ws.btilde;
  }
  ws.y = pt.op.solve(rhs);

  RealMatrix r = ws.dtilde * ws.y;
  r.leftCols(k * m) += RealMatrix::Identity(k * m, k * m);
  ws.z = (ws.xtilde_pinv * r).transpose();

  const RealMatrix wwd =
      matops::unvec(weights.squared_diagonal().cwiseProduct(pt.delta_vec), m, p);
  ws.multiplier = matops::vec(RealMatrix(wwd * cx_pinv.transpose()));
  return ws;
}

RealVector gradient(const GradientWorkspace& ws, const SearchPoint& pt,
                    const WeightMatrix& weights) {
  return ws.z * weights.squared_diagonal().cwiseProduct(pt.delta_vec);
}

RealVector gradient(const ProblemInstance& inst, const SearchPoint& pt,
                    const WeightMatrix& weights) {
  return gradient(build_workspace(inst, pt, weights), pt, weights);
}

RealMatrix gauss_newton(const GradientWorkspace& ws, const WeightMatrix& weights) {
  const RealMatrix gn = ws.z * weights.squared_diagonal().asDiagonal() * ws.z.transpose();
  return 0.5 * (gn + gn.transpose());
}

HessianParts hessian(const GradientWorkspace& ws, const ProblemInstance& inst,
                     const SearchPoint& pt, const WeightMatrix& weights) {
  const int k = ws.columns;
  const Eigen::Index n = inst.n();
  const Eigen::Index m = inst.m();
  const Eigen::Index p = inst.p();
  const Eigen::Index nz = ws.z.rows();

  HessianParts parts;
  parts.gauss_newton = gauss_newton(ws, weights);

  // M = [Btilde, Itilde x_v]^T Atilde^{-T} [ ((CX)^+ (W o W o Delta)^T (x) C^T) T_{m,p} Z^T
  //                                         - Itilde^T Atilde^{-T} Dtilde^T mu e_last^T ]
  const RealMatrix wwd =
      matops::unvec(weights.squared_diagonal().cwiseProduct(pt.delta_vec), m, p);
  const RealMatrix left = matops::kron(RealMatrix(matops::pinv(pt.cx) * wwd.transpose()),
                                       RealMatrix(inst.C().transpose()));
  const matops::CommutationMatrix t(m, p);
  RealMatrix inner = left * t.dense() * ws.z.transpose();
  if (k == 2) {
    const RealVector omega_col =
        ws.itilde.transpose() * pt.op.solve_transpose(ws.dtilde.transpose() * ws.multiplier);
    inner.col(nz - 1) -= omega_col;
  }
  // [Btilde, Itilde x_v]^T Atilde^{-T} = Y^T.
  parts.m = ws.y.transpose() * inner;

  parts.null_correction = RealMatrix::Zero(nz, nz);
  if (p > k) {
    // Second-order contribution of the component of d(delta) outside the row
    // space of Xtilde; it vanishes identically when CX is square.
    const RealMatrix u = matops::unvec(ws.multiplier, m, k);
    RealMatrix q(m * p, nz);
    for (Eigen::Index c = 0; c < nz; ++c) {
      const RealMatrix dx = -matops::unvec(ws.y.col(c), n, k);
      q.col(c) = matops::vec(RealMatrix(u * (inst.C() * dx).transpose()));
    }
    const RealVector winv = weights.squared_diagonal().cwiseInverse();
    const RealMatrix proj = RealMatrix(winv.asDiagonal()) -
                            ws.xtilde_pinv * ws.xtilde * winv.asDiagonal();
    const RealMatrix nc = -q.transpose() * proj * q;
    parts.null_correction = 0.5 * (nc + nc.transpose());
  }
  return parts;
}

HessianParts hessian(const ProblemInstance& inst, const SearchPoint& pt,
                     const WeightMatrix& weights) {
  return hessian(build_workspace(inst, pt, weights), inst, pt, weights);
}

bool ill_conditioned(const SearchPoint& pt) {
  return !pt.a3 || pt.sigma_ratio < kIllConditionedRatio;
}

namespace {

/// Fourth-order centered difference of f along coordinate i.
template <typename T, typename F>
T central_difference(F&& f, const RealVector& z, Eigen::Index i, double step) {
  auto at = [&](double t) {
    RealVector zt = z;
    zt(i) += t;
    return f(zt);
  };
  const T near = at(step) - at(-step);
  const T far = at(2.0 * step) - at(-2.0 * step);
  return (8.0 * near - far) / (12.0 * step);
}

}  // namespace

RealVector fd_gradient(const ProblemInstance& inst, const WeightMatrix& weights,
                       const RealVector& zbar, int columns, double h) {
  auto f = [&](const RealVector& z) { return cost(evaluate_packed(inst, z, columns, weights), weights); };
  RealVector out(zbar.size());
  for (Eigen::Index i = 0; i < zbar.size(); ++i) {
    const double step = h * std::max(1.0, std::abs(zbar(i)));
    out(i) = central_difference<double>(f, zbar, i, step);
  }
  return out;
}

RealMatrix fd_hessian(const ProblemInstance& inst, const WeightMatrix& weights,
                      const RealVector& zbar, int columns, double h) {
  auto f = [&](const RealVector& z) {
    return gradient(inst, evaluate_packed(inst, z, columns, weights), weights);
  };
  const Eigen::Index nz = zbar.size();
  RealMatrix out(nz, nz);
  for (Eigen::Index i = 0; i < nz; ++i) {
    const double step = h * std::max(1.0, std::abs(zbar(i)));
    out.col(i) = central_difference<RealVector>(f, zbar, i, step);
  }
  return out;
}

}  // namespace sparsesr
