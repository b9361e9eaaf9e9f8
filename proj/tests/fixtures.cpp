#include "fixtures.hpp"

#include "sparsesr/matops.hpp"

namespace fixtures {

RealMatrix random_stable(std::mt19937_64& rng, Eigen::Index n) {
  RealMatrix a = random_matrix(rng, n, n);
  const double alpha = sparsesr::matops::spectral_abscissa(a);
  std::uniform_real_distribution<double> margin(0.3, 1.5);
  a -= (alpha + margin(rng)) * RealMatrix::Identity(n, n);
  return a;
}

ProblemInstance random_instance(std::mt19937_64& rng, Eigen::Index n, Eigen::Index m,
                                Eigen::Index p, bool dense_pattern) {
  RealMatrix mask = RealMatrix::Ones(m, p);
  if (!dense_pattern) {
    std::bernoulli_distribution keep(0.6);
    for (Eigen::Index j = 0; j < p; ++j)
      for (Eigen::Index i = 0; i < m; ++i) mask(i, j) = keep(rng) ? 1.0 : 0.0;
    if (mask.sum() == 0.0) mask(0, 0) = 1.0;
  }
  return ProblemInstance(random_stable(rng, n), random_matrix(rng, n, m), random_matrix(rng, p, n),
                         SparsityPattern(mask));
}

}  // namespace fixtures
