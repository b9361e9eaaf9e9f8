#ifndef SPARSESR_MATOPS_HPP
#define SPARSESR_MATOPS_HPP

#include <Eigen/Dense>

#include <complex>
#include <cstddef>

#include "sparsesr/errors.hpp"

namespace sparsesr {

using Complex = std::complex<double>;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace matops {

/// Relative singular-value cutoff used by pinv() unless the caller overrides it.
inline constexpr double kDefaultPinvTol = 1e-12;

/// Column-stacking vectorization.
RealVector vec(const RealMatrix& m);

/// Inverse of vec(): refills a rows x cols matrix column by column.
RealMatrix unvec(const RealVector& v, Eigen::Index rows, Eigen::Index cols);

template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, Eigen::Dynamic> kron(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(a.rows() * b.rows(),
                                                            a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          a(i, j) * b.template cast<Scalar>();
    }
  }
  return out;
}

/// Entrywise product. Throws DimensionError on shape mismatch.
RealMatrix hadamard(const RealMatrix& a, const RealMatrix& b);

/// The mp x mp permutation T_{m,p} with T * vec(A) = vec(A^T) for A of size m x p.
class CommutationMatrix {
 public:
  CommutationMatrix(Eigen::Index m, Eigen::Index p);

  Eigen::Index m() const { return m_; }
  Eigen::Index p() const { return p_; }
  Eigen::Index size() const { return m_ * p_; }

  /// Index of the single 1 in row r.
  Eigen::Index source(Eigen::Index r) const;

  RealMatrix dense() const;
  RealVector apply(const RealVector& v) const;

 private:
  Eigen::Index m_;
  Eigen::Index p_;
};

/// Moore-Penrose pseudoinverse through a full SVD. Singular values at or below
/// tol * sigma_max are dropped. Throws NumericError on non-finite input.
RealMatrix pinv(const RealMatrix& m, double tol = kDefaultPinvTol);
ComplexMatrix pinv(const ComplexMatrix& m, double tol = kDefaultPinvTol);

/// Numerical rank with the same relative cutoff convention as pinv().
Eigen::Index rank(const RealMatrix& m, double tol = kDefaultPinvTol);
Eigen::Index rank(const ComplexMatrix& m, double tol = kDefaultPinvTol);

/// Eigenvalues of a real square matrix.
ComplexVector spectrum(const RealMatrix& m);

/// max Re(lambda) over the spectrum of m.
double spectral_abscissa(const RealMatrix& m);

bool all_finite(const RealMatrix& m);

}  // namespace matops
}  // namespace sparsesr

#endif  // SPARSESR_MATOPS_HPP
