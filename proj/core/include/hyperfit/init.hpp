#pragma once

#include "hyperfit/geometry.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace hyperfit {

enum class SamplingScheme {
  circle_grid,    // dim 2: equally spaced angles
  sphere_spiral,  // dim 3: Fibonacci spiral
  angle_grid,     // any dim: Cartesian grid over the spherical angles
};

std::string_view to_string(SamplingScheme s);
SamplingScheme parse_sampling_scheme(std::string_view name);

struct SamplingPlan {
  int dim = 2;
  int budget = 180;
  SamplingScheme scheme = SamplingScheme::circle_grid;

  /// circle_grid for dim 2, sphere_spiral for dim 3, angle_grid above, with
  /// the default budget for the dimension.
  static SamplingPlan for_dim(int dim);
  static int default_budget(int dim);

  void validate() const;
};

struct WindowConfig {
  /// Window width, in the units of the points.
  double width = 0.2;
  /// Stop once at most this many points remain. Defaults to
  /// max(2 * dim, floor(thres_fraction * n)).
  std::optional<int> thres;
  double thres_fraction = 0.05;
  /// Reject candidates holding fewer points. Defaults to dim + 1.
  std::optional<int> min_points;
  /// Run the window search with the origin moved far outside the data, so
  /// that no slab straddles it (only positive projections are scanned).
  bool origin_shift = true;
  /// Remove the band of half-width width/2 around a hyperplane refitted to
  /// the accepted window (re-centred a few times) instead of the window's
  /// own points. Offsets and normals are quantised (window stride, sampling
  /// grid), so the raw window can leave a strip of its slab behind.
  bool refit_removal = true;

  void validate() const;
  int thres_for(Eigen::Index dim, Eigen::Index num_points) const;
  int min_points_for(Eigen::Index dim) const;
};

std::vector<Vector> sample_normals(const SamplingPlan& plan);

/// Per-angle sample counts of the angle grid (first entry for the azimuth).
/// The product never exceeds `budget`.
std::vector<int> angle_grid_counts(int dim, int budget);

/// Densest window along a normal.
struct WindowHit {
  /// Row indices (into the point set passed in) of the points in the window.
  std::vector<Eigen::Index> members;
  /// Window centre, used as the hyperplane offset.
  double offset = 0.0;

  int count() const { return static_cast<int>(members.size()); }
  bool empty() const { return members.empty(); }
};

/// Projects the points on `normal`, slides windows of width `width` with
/// stride width/2 over the positive projections and returns the fullest one
/// (earliest on ties). Empty when no projection is positive.
WindowHit best_hyperplane(const PointSet& points, const Eigen::Ref<const Vector>& normal, double width);

/// Greedy projected-density initialisation: repeatedly takes the fullest
/// window over all sampled normals and removes its points. The number of
/// hyperplanes returned is the estimated model order. Hyperplanes are
/// reported in the caller's coordinates whether or not the origin is shifted.
std::vector<Hyperplane> initial_hyperplanes(const PointSet& points, const SamplingPlan& plan,
                                            const WindowConfig& window, int threads = 1);

}  // namespace hyperfit
