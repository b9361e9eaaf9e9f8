#include "sparsesr/model.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace sparsesr {

namespace {

std::string shape(const RealMatrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

SparsityPattern::SparsityPattern(RealMatrix mask) : mask_(std::move(mask)) {
  if (mask_.rows() < 1 || mask_.cols() < 1) throw DimensionError("sparsity pattern is empty");
  for (Eigen::Index j = 0; j < mask_.cols(); ++j) {
    for (Eigen::Index i = 0; i < mask_.rows(); ++i) {
      const double s = mask_(i, j);
      if (s != 0.0 && s != 1.0) {
        throw DimensionError("sparsity pattern entry (" + std::to_string(i) + "," +
                             std::to_string(j) + ") is not 0 or 1");
      }
      if (s == 0.0) constrained_.push_back(i + j * mask_.rows());
    }
  }
}

SparsityPattern SparsityPattern::all_free(Eigen::Index m, Eigen::Index p) {
  return SparsityPattern(RealMatrix::Ones(m, p));
}

SparsityPattern SparsityPattern::from_entries(Eigen::Index m, Eigen::Index p,
                                              const std::vector<Entry>& free_entries) {
  RealMatrix mask = RealMatrix::Zero(m, p);
  for (const auto& e : free_entries) {
    if (e.row < 0 || e.row >= m || e.col < 0 || e.col >= p) {
      throw DimensionError("free entry outside the " + std::to_string(m) + "x" +
                           std::to_string(p) + " pattern");
    }
    mask(e.row, e.col) = 1.0;
  }
  return SparsityPattern(std::move(mask));
}

RealMatrix SparsityPattern::complement() const {
  return RealMatrix::Ones(rows(), cols()) - mask_;
}

RealMatrix SparsityPattern::selector() const {
  RealMatrix sel = RealMatrix::Zero(num_constrained(), mask_.size());
  for (std::size_t r = 0; r < constrained_.size(); ++r) {
    sel(static_cast<Eigen::Index>(r), constrained_[r]) = 1.0;
  }
  return sel;
}

std::vector<Entry> SparsityPattern::free_entries() const {
  std::vector<Entry> out;
  for (Eigen::Index i = 0; i < rows(); ++i) {
    for (Eigen::Index j = 0; j < cols(); ++j) {
      if (is_free(i, j)) out.push_back({i, j});
    }
  }
  return out;
}

ProblemInstance::ProblemInstance(RealMatrix a, RealMatrix b, RealMatrix c,
                                 SparsityPattern pattern)
    : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), pattern_(std::move(pattern)) {
  if (a_.rows() < 1 || a_.rows() != a_.cols()) {
    throw DimensionError("A must be square and non-empty, got " + shape(a_));
  }
  if (b_.rows() != a_.rows() || b_.cols() < 1) {
    throw DimensionError("B must have " + std::to_string(a_.rows()) + " rows, got " + shape(b_));
  }
  if (c_.cols() != a_.rows() || c_.rows() < 1) {
    throw DimensionError("C must have " + std::to_string(a_.rows()) + " columns, got " +
                         shape(c_));
  }
  if (pattern_.rows() != b_.cols() || pattern_.cols() != c_.rows()) {
    throw DimensionError("S must be " + std::to_string(b_.cols()) + "x" +
                         std::to_string(c_.rows()) + ", got " + shape(pattern_.mask()));
  }
  if (!a_.allFinite() || !b_.allFinite() || !c_.allFinite()) {
    throw NumericError("problem matrices contain non-finite entries");
  }
}

ProblemInstance ProblemInstance::with_pattern(SparsityPattern pattern) const {
  return ProblemInstance(a_, b_, c_, std::move(pattern));
}

WeightMatrix::WeightMatrix(const SparsityPattern& pattern, double w) : w_(w) {
  if (!(w >= 1.0) || !std::isfinite(w)) {
    throw DimensionError("penalty weight must be a finite value >= 1");
  }
  weights_ = RealMatrix::Ones(pattern.rows(), pattern.cols()) + (w - 1.0) * pattern.complement();
  squared_ = matops::vec(weights_.cwiseProduct(weights_));
  uniform_ = pattern.fully_free() || w == 1.0;
}

RealMatrix perturbed_matrix(const ProblemInstance& inst, const RealMatrix& delta) {
  if (delta.rows() != inst.m() || delta.cols() != inst.p()) {
    throw DimensionError("Delta must be " + std::to_string(inst.m()) + "x" +
                         std::to_string(inst.p()) + ", got " + shape(delta));
  }
  return inst.A() + inst.B() * delta * inst.C();
}

StabilityCheck check_a1(const ProblemInstance& inst) {
  StabilityCheck out;
  out.abscissa = matops::spectral_abscissa(inst.A());
  out.pass = out.abscissa < 0.0;
  return out;
}

RankCheck check_a3(const ProblemInstance& inst, const RealMatrix& x, double rank_tol) {
  RankCheck out;
  if (x.rows() != inst.n() || x.cols() < 1 || x.cols() > 2) {
    throw DimensionError("X must be " + std::to_string(inst.n()) + "x1 or " +
                         std::to_string(inst.n()) + "x2, got " + shape(x));
  }
  if (inst.p() < x.cols()) {
    out.note = "CX cannot have full column rank: p = " + std::to_string(inst.p()) + " < " +
               std::to_string(x.cols());
    return out;
  }
  const RealMatrix cx = inst.C() * x;
  Eigen::JacobiSVD<RealMatrix> svd(cx);
  const auto& s = svd.singularValues();
  if (!(s(0) > 0.0) || !std::isfinite(s(0))) {
    out.note = "CX vanishes";
    return out;
  }
  out.sigma_ratio = s(s.size() - 1) / s(0);
  out.full_rank = out.sigma_ratio > rank_tol;
  if (!out.full_rank) out.note = "CX is numerically rank deficient";
  return out;
}

SparseProjection project_sparse(const RealMatrix& delta, const SparsityPattern& pattern) {
  SparseProjection out;
  out.projected = matops::hadamard(delta, pattern.mask());
  out.error = (delta - out.projected).norm();
  return out;
}

RealMatrix SupportReduction::expand(const RealMatrix& reduced_delta, Eigen::Index m,
                                    Eigen::Index p) const {
  RealMatrix full = RealMatrix::Zero(m, p);
  for (std::size_t i = 0; i < kept_rows.size(); ++i) {
    for (std::size_t j = 0; j < kept_cols.size(); ++j) {
      full(kept_rows[i], kept_cols[j]) =
          reduced_delta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return full;
}

SupportReduction restrict_to_support(const ProblemInstance& inst) {
  const RealMatrix& s = inst.pattern().mask();
  std::vector<Eigen::Index> rows;
  std::vector<Eigen::Index> cols;
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    if (s.row(i).sum() > 0.0) rows.push_back(i);
  }
  for (Eigen::Index j = 0; j < s.cols(); ++j) {
    if (s.col(j).sum() > 0.0) cols.push_back(j);
  }
  if (rows.empty()) throw DimensionError("sparsity pattern has no free entries");
  const auto mr = static_cast<Eigen::Index>(rows.size());
  const auto pc = static_cast<Eigen::Index>(cols.size());
  RealMatrix b(inst.n(), mr);
  RealMatrix c(pc, inst.n());
  RealMatrix mask(mr, pc);
  for (Eigen::Index i = 0; i < mr; ++i) b.col(i) = inst.B().col(rows[i]);
  for (Eigen::Index j = 0; j < pc; ++j) c.row(j) = inst.C().row(cols[j]);
  for (Eigen::Index i = 0; i < mr; ++i) {
    for (Eigen::Index j = 0; j < pc; ++j) mask(i, j) = s(rows[i], cols[j]);
  }
  return SupportReduction{ProblemInstance(inst.A(), std::move(b), std::move(c),
                                          SparsityPattern(std::move(mask))),
                          std::move(rows), std::move(cols)};
}

}  // namespace sparsesr
