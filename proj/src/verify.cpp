#include "sparsesr/verify.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

#include "sparsesr/io.hpp"
#include "sparsesr/parallel.hpp"

namespace sparsesr {

namespace {

const Complex kJ(0.0, 1.0);

std::vector<double> sorted_real(const RealVector& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

RealMatrix stationarity_term(const ProblemInstance& inst, const ComplexVector& l,
                             const ComplexVector& x, bool imaginary) {
  const ComplexMatrix outer = l * x.transpose();
  const RealMatrix part = imaginary ? RealMatrix(outer.imag()) : RealMatrix(outer.real());
  return matops::hadamard(inst.pattern().mask(), inst.B().transpose() * part * inst.C().transpose());
}

}  // namespace

EigenPairSelection extract_eigenpair(const ProblemInstance& inst, const RealMatrix& delta,
                                     double omega, const VerifyThresholds& tol) {
  if (delta.rows() != inst.m() || delta.cols() != inst.p()) {
    throw DimensionError("Delta must be " + std::to_string(inst.m()) + "x" +
                         std::to_string(inst.p()));
  }
  const RealMatrix ad = perturbed_matrix(inst, delta);
  const Complex target(0.0, omega);
  const double eig_tol = tol.eig_tol_scale * (1.0 + ad.norm());

  Eigen::EigenSolver<RealMatrix> right(ad);
  if (right.info() != Eigen::Success) throw NumericError("eigensolver failed on A(Delta)");
  const ComplexVector lam = right.eigenvalues();
  Eigen::Index k = 0;
  (lam.array() - target).abs().minCoeff(&k);

  EigenPairSelection sel;
  sel.lambda = lam(k);
  sel.distance = std::abs(sel.lambda - target);
  if (sel.distance > eig_tol) {
    throw NotBoundaryPointError("j*omega = " + format_number(omega) +
                                "j is not an eigenvalue of A(Delta): nearest eigenvalue is " +
                                format_number(sel.distance) + " away");
  }
  sel.separation = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (i != k) sel.separation = std::min(sel.separation, std::abs(lam(i) - sel.lambda));
  }
  if (sel.separation < 1e-3 * (1.0 + ad.norm())) {
    sel.warning = "eigenvalue at j*omega is (nearly) multiple; eigenvectors are ill-conditioned";
  }

  sel.x = right.eigenvectors().col(k);
  sel.x /= sel.x.norm();

  Eigen::EigenSolver<RealMatrix> left(RealMatrix(ad.transpose()));
  if (left.info() != Eigen::Success) throw NumericError("eigensolver failed on A(Delta)^T");
  Eigen::Index kl = 0;
  (left.eigenvalues().array() - sel.lambda).abs().minCoeff(&kl);
  ComplexVector l = left.eigenvectors().col(kl);

  // Delta + S o [B^T Re(beta l x^T) C^T] = Delta + br P1 + bi P2 is linear in
  // (br, bi); fit it by least squares.
  const RealMatrix p1 = stationarity_term(inst, l, sel.x, false);
  const RealMatrix p2 = -stationarity_term(inst, l, sel.x, true);
  RealMatrix design(delta.size(), 2);
  design.col(0) = matops::vec(p1);
  design.col(1) = matops::vec(p2);
  const RealVector coeff = design.completeOrthogonalDecomposition().solve(RealVector(-matops::vec(delta)));
  sel.beta = Complex(coeff(0), coeff(1));
  sel.l = sel.beta * l;

  const ComplexMatrix adc = ad.cast<Complex>();
  sel.right_residual = (adc * sel.x - sel.lambda * sel.x).norm();
  const double ln = sel.l.norm();
  sel.left_residual =
      ln > 0.0 ? (adc.transpose() * sel.l - sel.lambda * sel.l).norm() / ln : 0.0;
  return sel;
}

StationarityResiduals check_stationarity(const ProblemInstance& inst, const RealMatrix& delta,
                                         const EigenPairSelection& pair) {
  StationarityResiduals r;
  r.stationarity = (delta + stationarity_term(inst, pair.l, pair.x, false)).norm();
  r.realness = std::abs((pair.l.transpose() * pair.x)(0).imag());
  RealMatrix lm(pair.l.size(), 2);
  lm << pair.l.real(), -pair.l.imag();
  RealMatrix xm(pair.x.size(), 2);
  xm << pair.x.real(), pair.x.imag();
  const RealMatrix outer = inst.B().transpose() * lm * xm.transpose() * inst.C().transpose();
  r.outer_rank = outer.norm() == 0.0 ? 0 : matops::rank(outer, 1e-9);
  return r;
}

JacobianInfo build_jacobian(const ProblemInstance& inst, const RealMatrix& delta,
                            const EigenPairSelection& pair, double rank_tol) {
  const Eigen::Index n = inst.n();
  const Eigen::Index mp = inst.m() * inst.p();
  const Eigen::Index ns = inst.pattern().num_constrained();
  const ComplexMatrix ad = perturbed_matrix(inst, delta).cast<Complex>();
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  const ComplexMatrix bc = inst.B().cast<Complex>();
  const ComplexVector cx = inst.C().cast<Complex>() * pair.x;
  const ComplexVector xc = pair.x.conjugate();

  JacobianInfo info;
  info.jb = ComplexMatrix::Zero(2 * n + 1 + ns, 2 * n + mp + 1);
  auto& jb = info.jb;
  jb.block(0, 0, n, n) = ad - pair.lambda * eye;
  jb.block(0, 2 * n, n, mp) = matops::kron(cx.transpose(), bc);
  jb.block(0, 2 * n + mp, n, 1) = -kJ * pair.x;
  jb.block(n, n, n, n) = ad - std::conj(pair.lambda) * eye;
  jb.block(n, 2 * n, n, mp) = matops::kron(ComplexMatrix(cx.conjugate().transpose()), bc);
  jb.block(n, 2 * n + mp, n, 1) = kJ * xc;
  jb.block(2 * n, 0, 1, n) = pair.x.adjoint();
  jb.block(2 * n, n, 1, n) = pair.x.transpose();
  if (ns > 0) jb.block(2 * n + 1, 2 * n, ns, mp) = inst.pattern().selector().cast<Complex>();

  Eigen::JacobiSVD<ComplexMatrix> svd(jb);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() ? info.singular_values(0) : 0.0;
  info.rank = 0;
  for (Eigen::Index i = 0; i < info.singular_values.size(); ++i) {
    if (info.singular_values(i) > rank_tol * smax) ++info.rank;
  }
  info.full_rank = info.rank == jb.rows();
  return info;
}

ComplexMatrix lagrangian_hessian(const ProblemInstance& inst, const EigenPairSelection& pair) {
  const Eigen::Index n = inst.n();
  const Eigen::Index mp = inst.m() * inst.p();
  const ComplexVector btl = inst.B().transpose().cast<Complex>() * pair.l;
  const ComplexMatrix lt = matops::kron(inst.C().cast<Complex>(), ComplexMatrix(btl));
  const ComplexVector& l = pair.l;

  ComplexMatrix d = ComplexMatrix::Zero(2 * n + mp + 1, 2 * n + mp + 1);
  d.block(0, 2 * n, n, mp) = lt.adjoint();
  d.block(0, 2 * n + mp, n, 1) = kJ * l.conjugate();
  d.block(n, 2 * n, n, mp) = lt.transpose();
  d.block(n, 2 * n + mp, n, 1) = -kJ * l;
  d.block(2 * n, 0, mp, n) = lt;
  d.block(2 * n, n, mp, n) = lt.conjugate();
  d.block(2 * n, 2 * n, mp, mp) = 2.0 * ComplexMatrix::Identity(mp, mp);
  d.block(2 * n + mp, 0, 1, n) = -kJ * l.transpose();
  d.block(2 * n + mp, n, 1, n) = kJ * l.adjoint();
  return d;
}

SecondOrderInfo check_second_order(const ProblemInstance& inst, const EigenPairSelection& pair,
                                   const JacobianInfo& jacobian, double pd_tol) {
  SecondOrderInfo info;
  if (!jacobian.full_rank) {
    info.note = "regularity failed, second-order test inconclusive";
    return info;
  }
  info.conclusive = true;
  const Eigen::Index n = inst.n();
  const Eigen::Index nz = jacobian.jb.cols();
  const ComplexMatrix d = lagrangian_hessian(inst, pair);

  Eigen::JacobiSVD<ComplexMatrix> svd(jacobian.jb, Eigen::ComputeFullV);
  const ComplexMatrix kernel = svd.matrixV().rightCols(nz - jacobian.rank);
  const ComplexMatrix proj = kernel * kernel.adjoint();  // I - J^+ J
  const ComplexMatrix pdp = proj * d * proj;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> pdp_eig(0.5 * (pdp + pdp.adjoint()), Eigen::EigenvaluesOnly);
  info.projected_spectrum = sorted_real(pdp_eig.eigenvalues());
  double scale = 0.0;
  for (double v : info.projected_spectrum) scale = std::max(scale, std::abs(v));
  info.threshold = pd_tol * (scale > 0.0 ? scale : 1.0);

  if (kernel.cols() == 0) {
    info.pass = true;
    info.note = "kernel of J_b is trivial";
    return info;
  }
  const ComplexMatrix restricted = kernel.adjoint() * d * kernel;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> keig(0.5 * (restricted + restricted.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  info.kernel_eigenvalues = sorted_real(keig.eigenvalues());

  ComplexVector phase = ComplexVector::Zero(nz);
  phase.head(n) = kJ * pair.x;
  phase.segment(n, n) = -kJ * pair.x.conjugate();
  phase /= phase.norm();
  info.phase_curvature = (phase.adjoint() * d * phase)(0).real();
  const ComplexVector coeff = kernel.adjoint() * phase;
  info.phase_in_kernel = (kernel * coeff - phase).norm() <= 1e-8;

  ComplexMatrix basis = kernel;
  if (info.phase_in_kernel) {
    Eigen::HouseholderQR<ComplexMatrix> qr{ComplexMatrix(coeff)};
    const ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(coeff.size(), coeff.size());
    basis = kernel * q.rightCols(coeff.size() - 1);
  }
  if (basis.cols() == 0) {
    info.pass = true;
    info.note = "kernel of J_b is spanned by the eigenvector phase direction";
    return info;
  }
  const ComplexMatrix reduced = basis.adjoint() * d * basis;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> reig(0.5 * (reduced + reduced.adjoint()),
                                                     Eigen::EigenvaluesOnly);
  info.reduced_kernel_eigenvalues = sorted_real(reig.eigenvalues());
  info.min_eigenvalue = info.reduced_kernel_eigenvalues.front();
  info.pass = info.min_eigenvalue > info.threshold;
  if (!info.phase_in_kernel) info.note = "phase direction not in ker J_b";
  return info;
}

double spectral_abscissa(const RealMatrix& m) { return matops::spectral_abscissa(m); }

std::vector<std::pair<std::string, std::string>> OptimalityReport::entries() const {
  auto b = [](bool v) { return std::string(v ? "true" : "false"); };
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + format_number(v[i]);
    return s;
  };
  return {
      {"pass", b(pass())},
      {"omega", format_number(omega)},
      {"delta_fnorm", format_number(delta_fnorm)},
      {"sparsified", b(sparsified)},
      {"eigenvalue_re", format_number(pair.lambda.real())},
      {"eigenvalue_im", format_number(pair.lambda.imag())},
      {"eigenvalue_distance", format_number(pair.distance)},
      {"eigenvalue_separation", format_number(pair.separation)},
      {"right_residual", format_number(pair.right_residual)},
      {"left_residual", format_number(pair.left_residual)},
      {"beta_re", format_number(pair.beta.real())},
      {"beta_im", format_number(pair.beta.imag())},
      {"residual_stationarity", format_number(residuals.stationarity)},
      {"residual_realness", format_number(residuals.realness)},
      {"outer_product_rank", std::to_string(residuals.outer_rank)},
      {"stationarity_pass", b(stationarity_pass)},
      {"realness_pass", b(realness_pass)},
      {"jacobian_rows", std::to_string(jacobian_rows)},
      {"jacobian_cols", std::to_string(jacobian_cols)},
      {"jacobian_rank", std::to_string(jacobian_rank)},
      {"jacobian_full_rank", b(jacobian_full_rank)},
      {"second_order_conclusive", b(second_order.conclusive)},
      {"second_order_pass", b(second_order.pass)},
      {"projected_hessian_min_eig", format_number(second_order.min_eigenvalue)},
      {"projected_hessian_threshold", format_number(second_order.threshold)},
      {"kernel_eigenvalues", list(second_order.kernel_eigenvalues)},
      {"reduced_kernel_eigenvalues", list(second_order.reduced_kernel_eigenvalues)},
      {"phase_in_kernel", b(second_order.phase_in_kernel)},
      {"phase_curvature", format_number(second_order.phase_curvature)},
      {"alpha", format_number(alpha)},
      {"alpha_pass", b(alpha_pass)},
      {"warning", pair.warning.empty() ? second_order.note : pair.warning},
  };
}

OptimalityReport certify(const ProblemInstance& inst, const RealMatrix& delta, double omega,
                         const VerifyThresholds& tol, bool sparsify) {
  OptimalityReport rep;
  const RealMatrix d = sparsify ? project_sparse(delta, inst.pattern()).projected : delta;
  rep.omega = omega;
  rep.sparsified = sparsify;
  rep.delta_fnorm = d.norm();
  rep.pair = extract_eigenpair(inst, d, omega, tol);
  rep.residuals = check_stationarity(inst, d, rep.pair);
  const JacobianInfo jac = build_jacobian(inst, d, rep.pair, tol.rank_tol);
  rep.jacobian_rows = jac.jb.rows();
  rep.jacobian_cols = jac.jb.cols();
  rep.jacobian_rank = jac.rank;
  rep.jacobian_full_rank = jac.full_rank;
  rep.second_order = check_second_order(inst, rep.pair, jac, tol.pd_tol);
  rep.alpha = matops::spectral_abscissa(perturbed_matrix(inst, d));
  rep.stationarity_pass = rep.residuals.stationarity < tol.stationarity;
  rep.realness_pass = rep.residuals.realness < tol.realness;
  rep.alpha_pass = std::abs(rep.alpha) <= tol.alpha;
  return rep;
}

std::string to_string(SamplingStrategy s) {
  switch (s) {
    case SamplingStrategy::grid: return "grid";
    case SamplingStrategy::random: return "random";
    case SamplingStrategy::sphere: return "sphere";
  }
  return "unknown";
}

SamplingStrategy parse_sampling_strategy(const std::string& s) {
  if (s == "grid") return SamplingStrategy::grid;
  if (s == "random") return SamplingStrategy::random;
  if (s == "sphere") return SamplingStrategy::sphere;
  throw Error("unknown sampling strategy '" + s + "'");
}

double SpectralCloud::max_real() const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : points) best = std::max(best, z.real());
  return best;
}

double SpectralCloud::max_real_near(double center, double half_width) const {
  double best = -std::numeric_limits<double>::infinity();
  for (const Complex& z : points) {
    if (std::abs(z.imag() - center) <= half_width) best = std::max(best, z.real());
  }
  return best;
}

namespace {

/// Rows are coordinates of the free entries; each column is one sample.
RealMatrix grid_coordinates(int k, double eta, int per_axis) {
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<RealVector> pts;
  auto radius = [&](int i) { return eta * i / (per_axis - 1); };
  if (k == 1) {
    for (int i = 0; i < per_axis; ++i) {
      pts.push_back(RealVector::Constant(1, -eta + 2.0 * eta * i / (per_axis - 1)));
    }
  } else if (k == 2) {
    pts.push_back(RealVector::Zero(2));
    const int angles = 4 * per_axis;
    for (int i = 1; i < per_axis; ++i) {
      for (int a = 0; a < angles; ++a) {
        const double t = two_pi * a / angles;
        pts.push_back((RealVector(2) << std::cos(t), std::sin(t)).finished() * radius(i));
      }
    }
  } else {
    pts.push_back(RealVector::Zero(3));
    const int polar = per_axis;
    const int azimuth = 2 * per_axis;
    for (int i = 1; i < per_axis; ++i) {
      for (int a = 0; a < polar; ++a) {
        const double th = std::numbers::pi * a / (polar - 1);
        const int ring = (a == 0 || a == polar - 1) ? 1 : azimuth;
        for (int b = 0; b < ring; ++b) {
          const double ph = two_pi * b / azimuth;
          pts.push_back((RealVector(3) << std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph),
                         std::cos(th))
                            .finished() *
                        radius(i));
        }
      }
    }
  }
  RealMatrix out(k, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = pts[i];
  return out;
}

RealMatrix ball_coordinates(int k, double eta, int samples, std::uint64_t seed, bool surface) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  RealMatrix out(k, samples);
  for (int s = 0; s < samples; ++s) {
    RealVector d(k);
    double nrm = 0.0;
    while (nrm == 0.0) {
      for (int i = 0; i < k; ++i) d(i) = normal(rng);
      nrm = d.norm();
    }
    const double r = surface ? eta : eta * std::pow(unif(rng), 1.0 / k);
    out.col(s) = d * (r / nrm);
  }
  return out;
}

}  // namespace

SpectralCloud sample_spectral_set(const ProblemInstance& inst, double eta,
                                  const SamplingOptions& options) {
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw Error("eta must be a nonnegative number");
  const std::vector<Entry> free = inst.pattern().free_entries();
  const int k = static_cast<int>(free.size());
  SpectralCloud cloud;
  cloud.eta = eta;
  cloud.strategy = options.strategy;

  RealMatrix coords;
  if (eta == 0.0 || k == 0) {
    coords = RealMatrix::Zero(k, 1);
  } else if (options.strategy == SamplingStrategy::grid) {
    if (k > 3) {
      throw Error("grid sampling supports at most 3 free entries (pattern has " +
                  std::to_string(k) + "); use the random strategy");
    }
    if (options.samples < 2) throw Error("grid sampling needs at least 2 points per axis");
    coords = grid_coordinates(k, eta, options.samples);
  } else {
    if (options.samples < 1) throw Error("sample count must be positive");
    coords = ball_coordinates(k, eta, options.samples, options.seed,
                              options.strategy == SamplingStrategy::sphere);
  }

  const auto count = static_cast<std::size_t>(coords.cols());
  const auto n = static_cast<std::size_t>(inst.n());
  cloud.perturbations = count;
  cloud.points.resize(count * n);
  cloud.delta_fnorm.resize(count * n);
  parallel_for(count, options.jobs, [&](std::size_t s) {
    RealMatrix delta = RealMatrix::Zero(inst.m(), inst.p());
    for (int i = 0; i < k; ++i) delta(free[i].row, free[i].col) = coords(i, static_cast<Eigen::Index>(s));
    const ComplexVector ev = matops::spectrum(perturbed_matrix(inst, delta));
    const double nrm = delta.norm();
    for (std::size_t e = 0; e < n; ++e) {
      cloud.points[s * n + e] = ev(static_cast<Eigen::Index>(e));
      cloud.delta_fnorm[s * n + e] = nrm;
    }
  });
  return cloud;
}

namespace {

class RayCrossing {
 public:
  RayCrossing(const ProblemInstance& inst, std::vector<Entry> free, double bound, int steps)
      : inst_(inst), free_(std::move(free)), bound_(bound), steps_(steps) {}

  RealMatrix delta(const RealVector& dir, double r) const {
    RealMatrix d = RealMatrix::Zero(inst_.m(), inst_.p());
    for (std::size_t i = 0; i < free_.size(); ++i) {
      d(free_[i].row, free_[i].col) = r * dir(static_cast<Eigen::Index>(i));
    }
    return d;
  }

  bool unstable(const RealVector& dir, double r) const {
    return matops::spectral_abscissa(perturbed_matrix(inst_, delta(dir, r))) >= 0.0;
  }

  /// Smallest r in (0, limit] with alpha >= 0 along `dir`, bracketed to `tol`.
  /// Scan points are quadratically spaced so resolution is finest near 0.
  std::optional<std::pair<double, double>> first(const RealVector& dir, double limit,
                                                 double tol) const {
    double prev = 0.0;
    for (int i = 1; i <= steps_; ++i) {
      const double s = static_cast<double>(i) / steps_;
      const double r = bound_ * s * s;
      const double rr = std::min(r, limit);
      if (unstable(dir, rr)) {
        double lo = prev;
        double hi = rr;
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          (unstable(dir, mid) ? hi : lo) = mid;
        }
        return std::make_pair(lo, hi);
      }
      if (rr >= limit) break;
      prev = rr;
    }
    return std::nullopt;
  }

 private:
  const ProblemInstance& inst_;
  std::vector<Entry> free_;
  double bound_;
  int steps_;
};

}  // namespace

BruteForceResult brute_force_sr(const ProblemInstance& inst, const BruteForceOptions& options) {
  const std::vector<Entry> free = inst.pattern().free_entries();
  const int k = static_cast<int>(free.size());
  if (k < 1 || k > 2) {
    throw Error("brute-force search supports 1 or 2 free entries (pattern has " +
                std::to_string(k) + ")");
  }
  if (!check_a1(inst).pass) throw StabilityAssumptionError("A is not Hurwitz stable");
  double bound = options.bound;
  if (bound <= 0.0) {
    const double bc = inst.B().norm() * inst.C().norm();
    bound = 10.0 * (1.0 + inst.A().norm()) / (bc > 0.0 ? bc : 1.0);
  }
  const RayCrossing ray(inst, free, bound, options.scan_steps);
  const double inf = std::numeric_limits<double>::infinity();

  BruteForceResult res;
  res.free_entries = k;
  if (k == 1) {
    double lower = inf;
    double upper = inf;
    RealVector best_dir;
    for (double sign : {1.0, -1.0}) {
      const RealVector dir = RealVector::Constant(1, sign);
      if (auto br = ray.first(dir, bound, 1e-8)) {
        lower = std::min(lower, br->first);
        if (br->second < upper) {
          upper = br->second;
          best_dir = dir;
        }
      }
    }
    if (!std::isfinite(upper)) {
      throw Error("no instability found up to bound " + format_number(bound));
    }
    res.lower = lower;
    res.upper = upper;
    res.argmin = ray.delta(best_dir, upper);
  } else {
    auto dir_of = [](double t) { return (RealVector(2) << std::cos(t), std::sin(t)).finished(); };
    const int angles = options.angle_steps;
    const double two_pi = 2.0 * std::numbers::pi;
    double best = inf;
    int best_a = -1;
    for (int a = 0; a < angles; ++a) {
      const double limit = std::isfinite(best) ? best : bound;
      if (auto br = ray.first(dir_of(two_pi * a / angles), limit, 1e-6)) {
        if (br->second < best) {
          best = br->second;
          best_a = a;
        }
      }
    }
    if (best_a < 0) throw Error("no instability found up to bound " + format_number(bound));

    auto radius = [&](double t) {
      auto br = ray.first(dir_of(t), bound, 1e-10);
      return br ? br->second : inf;
    };
    // Golden-section refinement around the best grid angle.
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = two_pi * (best_a - 1) / angles;
    double hi = two_pi * (best_a + 1) / angles;
    double t1 = hi - phi * (hi - lo);
    double t2 = lo + phi * (hi - lo);
    double f1 = radius(t1);
    double f2 = radius(t2);
    while (hi - lo > 1e-9) {
      if (f1 < f2) {
        hi = t2;
        t2 = t1;
        f2 = f1;
        t1 = hi - phi * (hi - lo);
        f1 = radius(t1);
      } else {
        lo = t1;
        t1 = t2;
        f1 = f2;
        t2 = lo + phi * (hi - lo);
        f2 = radius(t2);
      }
    }
    const double t_best = f1 < f2 ? t1 : t2;
    const double r_best = std::min({f1, f2, radius(two_pi * best_a / angles)});
    const double t_use = r_best == std::min(f1, f2) ? t_best : two_pi * best_a / angles;
    res.upper = r_best;
    res.lower = std::max(0.0, r_best - 1e-3);
    res.argmin = ray.delta(dir_of(t_use), r_best);
  }
  res.bracket_width = res.upper - res.lower;
  res.estimate = k == 1 ? 0.5 * (res.lower + res.upper) : res.upper;
  return res;
}

}  // namespace sparsesr
