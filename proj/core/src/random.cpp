#include "hyperfit/random.hpp"

namespace hyperfit {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector random_unit_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector v(dim);
  double norm = 0.0;
  do {
    for (Eigen::Index k = 0; k < dim; ++k) v(k) = gauss(rng);
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

}  // namespace hyperfit
