#pragma once

#include "hyperfit/geometry.hpp"

#include <functional>

namespace hyperfit {

/// A vector in the tangent space of the unit sphere at `at` (at . vec = 0).
struct TangentVector {
  Vector at;
  Vector vec;
};

/// Riemannian gradient descent settings. Step sizes come from Armijo
/// backtracking that shrinks the trial step by `backtrack_factor` until
/// sufficient decrease (constant `armijo_c`) holds. The trial step is the
/// exact minimiser of the objective along the retraction curve when
/// `exact_trial` is set, `initial_step` otherwise.
struct DescentConfig {
  double grad_tol = 1e-8;
  int max_iters = 500;
  double armijo_c = 1e-4;
  double backtrack_factor = 0.5;
  double initial_step = 1.0;
  bool exact_trial = true;

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

struct DescentResult {
  Vector normal;
  int iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  /// The weighted scatter is isotropic: every direction is optimal and the
  /// starting normal was returned unchanged.
  bool degenerate = false;
};

/// Called after every accepted step with (iteration, normal, objective value).
using DescentObserver = std::function<void(int, const Vector&, double)>;

/// e - (e . n) n, the orthogonal projection onto the tangent space at n.
TangentVector project_tangent(const Eigen::Ref<const Vector>& n, const Eigen::Ref<const Vector>& e);

/// (n + v) / |n + v|. Throws NumericalError when n + v vanishes (the step
/// overshot to the antipode); the caller should shrink the step.
Vector retract(const TangentVector& v);

/// Weighted variance of the projections n . x_i about their weighted mean.
double objective(const PointSet& points, const Eigen::Ref<const Vector>& weights,
                 const Eigen::Ref<const Vector>& n);

/// Euclidean gradient of objective() with respect to n:
///   2 sum_i w_i (n.x_i - mu) (x_i - xbar) / sum_i w_i
/// with mu and xbar the weighted means of the projections and the points.
Vector euclidean_gradient(const PointSet& points, const Eigen::Ref<const Vector>& weights,
                          const Eigen::Ref<const Vector>& n);

/// Unit-weight form used by hard refinement:
///   2 sum_i (n.x_i - mean_proj) (x_i - centroid) / card
Vector euclidean_gradient_unweighted(const PointSet& points, const Eigen::Ref<const Vector>& n);

/// Weighted, centred scatter matrix sum_i w_i (x_i - xbar)(x_i - xbar)^T / sum_i w_i.
/// objective(points, w, n) == n^T S n.
Eigen::MatrixXd weighted_scatter(const PointSet& points, const Eigen::Ref<const Vector>& weights);

/// Riemannian gradient descent on the sphere for objective(), warm-started at
/// n0. Every iterate is a unit vector and the objective never increases.
DescentResult descend(const PointSet& points, const Eigen::Ref<const Vector>& weights,
                      const Eigen::Ref<const Vector>& n0, const DescentConfig& cfg = {},
                      const DescentObserver& observer = {});

/// Eigen-decomposition of a small dense symmetric matrix by cyclic Jacobi
/// rotations. Eigenvalues are ascending; column k of `vectors` belongs to
/// values(k).
struct SymmetricEigen {
  Vector values;
  Eigen::MatrixXd vectors;
  int sweeps = 0;
};

SymmetricEigen jacobi_eigen(const Eigen::Ref<const Eigen::MatrixXd>& symmetric, int max_sweeps = 100);

struct OracleResult {
  Vector normal;
  Vector eigenvalues;
  /// lambda_2 - lambda_1 of the scatter matrix.
  double eigen_gap = 0.0;
  /// The minimum eigenvalue is repeated (gap <= 1e-8 relative to the spread),
  /// so the minimiser is not unique.
  bool degenerate = false;
};

/// Minimiser of objective() computed independently of descend(): the
/// minimum-eigenvalue eigenvector of the weighted scatter matrix, obtained with
/// jacobi_eigen(). The sign is fixed so the largest-magnitude entry is positive.
OracleResult min_eigvec_oracle(const PointSet& points, const Eigen::Ref<const Vector>& weights);

}  // namespace hyperfit
