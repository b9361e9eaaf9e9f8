#ifndef SPARSESR_VERIFY_HPP
#define SPARSESR_VERIFY_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sparsesr/model.hpp"

namespace sparsesr {

struct VerifyThresholds {
  double stationarity = 1e-4;
  double realness = 1e-6;
  double alpha = 1e-4;
  /// Eigenvalue match radius: eig_tol_scale * (1 + ||A(Delta)||_F).
  double eig_tol_scale = 1e-6;
  /// Positive-definiteness cutoff relative to max |eigenvalue| of P D P.
  double pd_tol = 1e-8;
  /// Relative singular-value cutoff for rank(J_b).
  double rank_tol = 1e-9;
};

/// Right/left eigenvectors of A(Delta) at the eigenvalue closest to j*omega.
/// x is unit norm; l is scaled by the complex beta that best satisfies the
/// stationarity equation.
struct EigenPairSelection {
  Complex lambda;
  ComplexVector x;
  ComplexVector l;
  Complex beta{1.0, 0.0};
  double distance = 0.0;       ///< |lambda - j omega|
  double right_residual = 0.0; ///< ||A(Delta) x - lambda x||
  double left_residual = 0.0;  ///< ||A(Delta)^T l - lambda l|| / ||l||
  double separation = 0.0;     ///< distance to the next-closest eigenvalue
  std::string warning;
};

/// Throws NotBoundaryPointError when no eigenvalue of A(Delta) lies within the
/// eigenvalue tolerance of j*omega.
EigenPairSelection extract_eigenpair(const ProblemInstance& inst, const RealMatrix& delta,
                                     double omega, const VerifyThresholds& tol = {});

struct StationarityResiduals {
  double stationarity = 0.0;  ///< ||Delta + S o [B^T Re(l x^T) C^T]||_F
  double realness = 0.0;      ///< |Im(l^T x)|
  Eigen::Index outer_rank = 0;///< rank of B^T L X^T C^T, L = [Re l, -Im l], X = [Re x, Im x]
};

StationarityResiduals check_stationarity(const ProblemInstance& inst, const RealMatrix& delta,
                                         const EigenPairSelection& pair);

struct JacobianInfo {
  ComplexMatrix jb;
  RealVector singular_values;
  Eigen::Index rank = 0;
  bool full_rank = false;
};

/// Constraint Jacobian J_b with rows
///   [A(Delta) - lambda I, 0, (Cx)^T (x) B, -j x]
///   [0, A(Delta) - lambda* I, (Cx*)^T (x) B, j x*]
///   [x^H, x^T, 0, 0]
///   [0, 0, Ssel, 0]
/// i.e. (2n + 1 + n_s) x (2n + mp + 1). lambda is the selected eigenvalue, which
/// equals j*omega at an exact boundary point.
JacobianInfo build_jacobian(const ProblemInstance& inst, const RealMatrix& delta,
                            const EigenPairSelection& pair, double rank_tol = 1e-9);

/// Hessian of the Lagrangian in the variables (x, x*, delta, omega):
///   [ 0      0      Lt^H   j l* ]
///   [ 0      0      Lt^T  -j l  ]
///   [ Lt     Lt*    2I     0    ]
///   [-j l^T  j l^H  0      0    ],  Lt = C (x) (B^T l).
ComplexMatrix lagrangian_hessian(const ProblemInstance& inst, const EigenPairSelection& pair);

struct SecondOrderInfo {
  bool conclusive = false;          ///< false when J_b is rank deficient
  std::vector<double> projected_spectrum;  ///< eigenvalues of P D P, ascending
  std::vector<double> kernel_eigenvalues;  ///< of D restricted to ker J_b, ascending
  /// The same restricted to the complement of the eigenvector phase direction
  /// [j x; -j x*; 0; 0], which always lies in ker J_b with zero curvature.
  std::vector<double> reduced_kernel_eigenvalues;
  double phase_curvature = 0.0;
  bool phase_in_kernel = false;
  double min_eigenvalue = 0.0;      ///< min of reduced_kernel_eigenvalues
  double threshold = 0.0;
  bool pass = false;
  std::string note;
};

SecondOrderInfo check_second_order(const ProblemInstance& inst, const EigenPairSelection& pair,
                                   const JacobianInfo& jacobian, double pd_tol = 1e-8);

/// max Re over the eigenvalues of m.
double spectral_abscissa(const RealMatrix& m);

struct OptimalityReport {
  double omega = 0.0;
  double delta_fnorm = 0.0;
  bool sparsified = false;
  EigenPairSelection pair;
  StationarityResiduals residuals;
  Eigen::Index jacobian_rows = 0;
  Eigen::Index jacobian_cols = 0;
  Eigen::Index jacobian_rank = 0;
  bool jacobian_full_rank = false;
  SecondOrderInfo second_order;
  double alpha = 0.0;

  bool stationarity_pass = false;
  bool realness_pass = false;
  bool alpha_pass = false;
  bool pass() const {
    return stationarity_pass && realness_pass && jacobian_full_rank && second_order.pass &&
           alpha_pass;
  }
  /// Flat key/value view in a fixed order.
  std::vector<std::pair<std::string, std::string>> entries() const;
};

/// Runs every check at (Delta, omega). With `sparsify` the perturbation is
/// first replaced by S o Delta. Throws NotBoundaryPointError as extract_eigenpair.
OptimalityReport certify(const ProblemInstance& inst, const RealMatrix& delta, double omega,
                         const VerifyThresholds& tol = {}, bool sparsify = true);

enum class SamplingStrategy { grid, random, sphere };

std::string to_string(SamplingStrategy s);
SamplingStrategy parse_sampling_strategy(const std::string& s);

struct SamplingOptions {
  SamplingStrategy strategy = SamplingStrategy::random;
  /// random/sphere: number of perturbations; grid: points per coordinate axis.
  int samples = 20000;
  std::uint64_t seed = 0;
  int jobs = 0;
};

struct SpectralCloud {
  double eta = 0.0;
  SamplingStrategy strategy = SamplingStrategy::random;
  std::size_t perturbations = 0;
  std::vector<Complex> points;
  std::vector<double> delta_fnorm;  ///< ||Delta||_F of the sample producing each point

  double max_real() const;
  /// max Re over points with |Im - center| <= half_width.
  double max_real_near(double center, double half_width) const;
};

/// Eigenvalues of A + B Delta C for sparse Delta sampled from the ball
/// ||Delta||_F <= eta: grid (<= 3 free entries, hyperspherical coordinates
/// including the boundary), random (uniform in the ball) or sphere (uniform on
/// the boundary, where the rightmost points lie).
SpectralCloud sample_spectral_set(const ProblemInstance& inst, double eta,
                                  const SamplingOptions& options = {});

struct BruteForceOptions {
  double bound = 0.0;   ///< search radius; 0 picks 10 (1 + ||A||_F) / (||B||_F ||C||_F)
  int scan_steps = 1000;
  int angle_steps = 360;
};

struct BruteForceResult {
  double lower = 0.0;
  double upper = 0.0;       ///< achieved by `argmin`
  double estimate = 0.0;
  double bracket_width = 0.0;
  int free_entries = 0;
  RealMatrix argmin;        ///< destabilizing Delta with ||Delta||_F = upper
};

/// Direct search for the sparse real stability radius over <= 2 free entries.
/// One entry: scan plus bisection along +-t, bracket <= 1e-6. Two entries:
/// polar grid of rays, first crossing along each ray, golden-section refinement
/// of the best angle; the reported bracket is 1e-3 wide below the best radius.
BruteForceResult brute_force_sr(const ProblemInstance& inst, const BruteForceOptions& options = {});

}  // namespace sparsesr

#endif  // SPARSESR_VERIFY_HPP
