#include "sparsesr/matops.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <string>

namespace sparsesr::matops {

RealVector vec(const RealMatrix& m) {
  return Eigen::Map<const RealVector>(m.data(), m.size());
}

RealMatrix unvec(const RealVector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("unvec: length " + std::to_string(v.size()) +
                         " does not fill a " + std::to_string(rows) + "x" +
                         std::to_string(cols) + " matrix");
  }
  return Eigen::Map<const RealMatrix>(v.data(), rows, cols);
}

RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("hadamard: operands are " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " and " + std::to_string(b.rows()) +
                         "x" + std::to_string(b.cols()));
  }
  return a.cwiseProduct(b);
}

CommutationMatrix::CommutationMatrix(Eigen::Index m, Eigen::Index p) : m_(m), p_(p) {
  if (m < 1 || p < 1) throw DimensionError("commutation matrix needs m, p >= 1");
}

// vec(A)[i + j*m] = A(i,j) and vec(A^T)[j + i*p] = A(i,j).
Eigen::Index CommutationMatrix::source(Eigen::Index r) const {
  const Eigen::Index j = r % p_;
  const Eigen::Index i = r / p_;
  return i + j * m_;
}

RealMatrix CommutationMatrix::dense() const {
  RealMatrix t = RealMatrix::Zero(size(), size());
  for (Eigen::Index r = 0; r < size(); ++r) t(r, source(r)) = 1.0;
  return t;
}

RealVector CommutationMatrix::apply(const RealVector& v) const {
  if (v.size() != size()) throw DimensionError("commutation apply: wrong vector length");
  RealVector out(size());
  for (Eigen::Index r = 0; r < size(); ++r) out(r) = v(source(r));
  return out;
}

namespace {

template <typename Matrix>
Matrix pinv_impl(const Matrix& m, double tol) {
  if (!m.allFinite()) throw NumericError("pinv: non-finite input");
  if (!(tol > 0.0)) throw NumericError("pinv: tolerance must be positive");
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  if (!s.allFinite()) throw NumericError("pinv: SVD did not converge");
  const double cutoff = s.size() > 0 ? tol * s(0) : 0.0;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

template <typename Matrix>
Eigen::Index rank_impl(const Matrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  const double cutoff = tol * s(0);
  Eigen::Index r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > cutoff && s(i) > 0.0) ++r;
  }
  return r;
}

}  // namespace

RealMatrix pinv(const RealMatrix& m, double tol) { return pinv_impl(m, tol); }
ComplexMatrix pinv(const ComplexMatrix& m, double tol) { return pinv_impl(m, tol); }

Eigen::Index rank(const RealMatrix& m, double tol) { return rank_impl(m, tol); }
Eigen::Index rank(const ComplexMatrix& m, double tol) { return rank_impl(m, tol); }

ComplexVector spectrum(const RealMatrix& m) {
  if (m.rows() != m.cols()) throw DimensionError("spectrum: matrix is not square");
  if (!m.allFinite()) throw NumericError("spectrum: non-finite matrix");
  Eigen::EigenSolver<RealMatrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() == Eigen::Success) return es.eigenvalues();
  es.setMaxIterations(400 * m.rows());
  es.compute(m, false);
  if (es.info() == Eigen::Success) return es.eigenvalues();
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(m.cast<Complex>(), false);
  if (ces.info() != Eigen::Success) throw NumericError("spectrum: eigensolver failed");
  return ces.eigenvalues();
}

double spectral_abscissa(const RealMatrix& m) {
  return spectrum(m).real().maxCoeff();
}

bool all_finite(const RealMatrix& m) { return m.allFinite(); }

}  // namespace sparsesr::matops
