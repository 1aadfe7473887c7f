#pragma once

#include "hyperfit/solver.hpp"
#include "hyperfit/random.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace hyperfit {

struct BicValue {
  double value = 0.0;
  /// The residual sum was below the floor and the log term was clamped.
  bool floored = false;
};

/// Laplace-residual BIC: 2n ln((2/n) sum r) + 2n + (m (dim + 1) - 1) ln n.
/// The log argument is floored at 1e-12.
BicValue laplace_bic(std::span<const double> residuals, int m, int dim);

inline constexpr double kBicResidualFloor = 1e-12;

struct OrderCandidate {
  int m = 0;
  /// Best total cost over the restarts.
  double total_cost = 0.0;
  double bic = 0.0;
  /// Hyperplanes surviving in the best restart (may be < m after drops).
  int hyperplanes = 0;
  int best_restart = 0;
};

struct SweepResult {
  std::vector<OrderCandidate> per_m;
  int chosen_m = 0;
  FitResult chosen_fit;
};

/// m hyperplanes with normals jittered around random sphere-lattice samples
/// and offsets uniform in [0, max_i |x_i|].
std::vector<Hyperplane> random_hyperplanes(const PointSet& points, int m, Rng& rng);

/// Fits m = 1..m_max with `restarts` random initialisations each, keeps the
/// lowest total cost per m and picks the m with the smallest Laplace BIC.
/// Each (m, restart) cell uses its own derived seed, so the result does not
/// depend on cfg.threads.
SweepResult sweep_model_order(const PointSet& points, int m_max, const FitConfig& cfg, int restarts,
                              std::uint64_t seed);

}  // namespace hyperfit
