#ifndef SPARSESR_TESTS_FIXTURES_HPP
#define SPARSESR_TESTS_FIXTURES_HPP

#include <random>

#include "sparsesr/model.hpp"

namespace fixtures {

using sparsesr::ProblemInstance;
using sparsesr::RealMatrix;
using sparsesr::RealVector;
using sparsesr::SparsityPattern;

/// Four-state, two-input, two-output benchmark system.
inline RealMatrix bench_a() {
  RealMatrix a(4, 4);
  a << 79, 20, -30, -20, -41, -12, 17, 13, 167, 40, -60, -38, 33.5, 9, -14.5, -11;
  return a;
}

inline RealMatrix bench_b() {
  RealMatrix b(4, 2);
  b << 0.2190, 0.9347, 0.0470, 0.3835, 0.6789, 0.5194, 0.6793, 0.8310;
  return b;
}

inline RealMatrix bench_c() {
  RealMatrix c(2, 4);
  c << 0.0346, 0.5297, 0.0077, 0.0668, 0.0535, 0.6711, 0.3848, 0.4175;
  return c;
}

inline ProblemInstance dense_case() {
  return ProblemInstance(bench_a(), bench_b(), bench_c(), SparsityPattern(RealMatrix::Ones(2, 2)));
}

inline ProblemInstance diagonal_case() {
  return ProblemInstance(bench_a(), bench_b(), bench_c(),
                         SparsityPattern(RealMatrix::Identity(2, 2)));
}

inline RealVector diagonal_case_g0() {
  RealVector g(4);
  g << 1.0582, 0.4363, 1.4115, -0.0146;
  return g;
}

inline RealMatrix random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
  std::normal_distribution<double> nd;
  RealMatrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = nd(rng);
  return m;
}

/// Random Hurwitz matrix: a Gaussian matrix shifted left past its abscissa.
RealMatrix random_stable(std::mt19937_64& rng, Eigen::Index n);

/// Random stable instance with a random 0/1 pattern that keeps at least one free entry.
ProblemInstance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m,
                                Eigen::Index p, bool dense_pattern = false);

inline double rel_err(const RealMatrix& a, const RealMatrix& b) {
  return (a - b).norm() / (1.0 + b.norm());
}

}  // namespace fixtures

#endif  // SPARSESR_TESTS_FIXTURES_HPP
