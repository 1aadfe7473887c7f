#pragma once

#include "hyperfit/geometry.hpp"
#include "hyperfit/manifold.hpp"

#include <functional>
#include <optional>
#include <string_view>
#include <vector>

namespace hyperfit {

/// Point-to-hyperplane likelihood used for the Phase I posteriors.
enum class Kernel {
  inverse,         // 1 / (D + eps)
  inverse_square,  // 1 / (D^2 + eps)
  gaussian,        // exp(-D)
};

enum class FitMode {
  full,       // Phase I then Phase II
  soft_only,  // Phase I; assignment read from the weights
  hard_only,  // nearest initial hyperplane, then Phase II
};

std::string_view to_string(Kernel k);
std::string_view to_string(FitMode m);
Kernel parse_kernel(std::string_view name);
FitMode parse_fit_mode(std::string_view name);

/// n x m posterior assignment probabilities; each row sums to 1.
using WeightMatrix = Eigen::MatrixXd;

/// Assignment marker for points rejected by the outlier threshold.
inline constexpr int kOutlier = -1;

struct FitConfig {
  Kernel kernel = Kernel::inverse_square;
  double epsilon = 1e-8;
  /// Phase I stops when max |w_new - w_old| drops below this.
  double em_tol = 1e-4;
  int em_max_iters = 200;
  DescentConfig descent;
  /// Points farther than this from every hyperplane are excluded from Phase II.
  std::optional<double> outlier_threshold;
  /// Clusters smaller than this are dropped in Phase II. Defaults to dim + 1.
  std::optional<int> min_cluster_size;
  FitMode mode = FitMode::full;
  /// Re-fit once in a translated frame when a hyperplane passes (almost)
  /// through the origin.
  bool origin_shift = true;
  int threads = 1;

  void validate() const;
  int min_cluster_size_for(Eigen::Index dim) const;
};

struct FitResult {
  std::vector<Hyperplane> hyperplanes;
  /// Index into `hyperplanes` per point, or kOutlier.
  std::vector<int> assignment;
  /// Distance of each point to its assigned hyperplane (nearest hyperplane for
  /// outliers).
  std::vector<double> residuals;
  /// Final Phase I weights (empty in hard-only mode).
  WeightMatrix weights;
  int em_iterations = 0;
  bool em_converged = false;
  int dropped_clusters = 0;
  bool origin_shifted = false;
};

struct SoftPhaseResult {
  std::vector<Hyperplane> hyperplanes;
  WeightMatrix weights;
  int iterations = 0;
  bool converged = false;
};

/// Called after each EM iteration with (iteration, E-step weights, M-step hyperplanes).
using EmObserver = std::function<void(int, const WeightMatrix&, const std::vector<Hyperplane>&)>;

double kernel_score(double distance, Kernel kernel, double epsilon);

/// Row-normalised kernel scores of every point against every hyperplane.
WeightMatrix compute_weights(const PointSet& points, const std::vector<Hyperplane>& hyperplanes,
                             const FitConfig& cfg);

/// Phase I: Riemannian EM. Alternates compute_weights() with a per-hyperplane
/// weighted descend() and the closed-form weighted-mean offset.
SoftPhaseResult soft_phase(const PointSet& points, const std::vector<Hyperplane>& init,
                           const FitConfig& cfg, const EmObserver& observer = {});

/// Argmax of each weight row, ties to the lowest index. With an outlier
/// threshold, points farther than it from every hyperplane become kOutlier.
std::vector<int> hard_assign(const PointSet& points, const std::vector<Hyperplane>& hyperplanes,
                             const WeightMatrix& weights, const FitConfig& cfg);

/// Index of the nearest hyperplane per point (lowest index on ties), with the
/// same outlier rule as hard_assign().
std::vector<int> assign_nearest(const PointSet& points, const std::vector<Hyperplane>& hyperplanes,
                                const FitConfig& cfg);

/// Phase II: unweighted refit of every cluster warm-started from its current
/// normal. Undersized clusters are dropped; points are then reassigned to the
/// nearest surviving hyperplane. Throws NumericalError if nothing survives.
FitResult hard_phase(const PointSet& points, const std::vector<int>& assignment,
                     const std::vector<Hyperplane>& hyperplanes, const FitConfig& cfg);

/// The two-stage fit in the mode selected by cfg.mode.
FitResult fit(const PointSet& points, const std::vector<Hyperplane>& init, const FitConfig& cfg);

}  // namespace hyperfit
