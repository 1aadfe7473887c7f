#include "hyperfit/solver.hpp"

#include "hyperfit/error.hpp"
#include "hyperfit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace hyperfit {
namespace {

// |n_j . x_i - d_j| for every point/hyperplane pair (n x m).
Eigen::MatrixXd distance_matrix(const PointSet& points, const std::vector<Hyperplane>& hyperplanes) {
  const auto m = static_cast<Eigen::Index>(hyperplanes.size());
  Eigen::MatrixXd normals(points.cols(), m);
  Eigen::RowVectorXd offsets(m);
  for (Eigen::Index j = 0; j < m; ++j) {
    const Hyperplane& h = hyperplanes[static_cast<std::size_t>(j)];
    if (h.normal.size() != points.cols()) {
      throw DimensionError("hyperplane " + std::to_string(j) + " has dimension " + std::to_string(h.normal.size()) +
                           ", points " + std::to_string(points.cols()));
    }
    normals.col(j) = h.normal;
    offsets(j) = h.offset;
  }
  return ((points * normals).rowwise() - offsets).cwiseAbs();
}

int nearest_in_row(const Eigen::MatrixXd& dist, Eigen::Index row) {
  int best = 0;
  for (Eigen::Index j = 1; j < dist.cols(); ++j) {
    if (dist(row, j) < dist(row, best)) best = static_cast<int>(j);
  }
  return best;
}

void check_problem(const PointSet& points, const std::vector<Hyperplane>& hyperplanes) {
  if (points.rows() == 0) throw ConfigError("empty point set");
  validate_points(points);
  if (hyperplanes.empty()) throw ConfigError("at least one hyperplane is required");
  for (const Hyperplane& h : hyperplanes) {
    if (h.normal.size() != points.cols()) throw DimensionError("hyperplane and point dimensions differ");
  }
}

std::vector<Hyperplane> canonical_copy(const std::vector<Hyperplane>& hyperplanes) {
  std::vector<Hyperplane> out;
  out.reserve(hyperplanes.size());
  for (const Hyperplane& h : hyperplanes) out.push_back(canonicalize(h));
  return out;
}

// Fills residuals (and outlier marks) against `hyperplanes` for a given assignment.
void fill_residuals(const PointSet& points, FitResult& result) {
  const Eigen::MatrixXd dist = distance_matrix(points, result.hyperplanes);
  result.residuals.resize(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const int a = result.assignment[static_cast<std::size_t>(i)];
    const int j = a == kOutlier ? nearest_in_row(dist, i) : a;
    result.residuals[static_cast<std::size_t>(i)] = dist(i, j);
  }
}

FitResult fit_once(const PointSet& points, const std::vector<Hyperplane>& init, const FitConfig& cfg) {
  switch (cfg.mode) {
    case FitMode::full: {
      SoftPhaseResult soft = soft_phase(points, init, cfg);
      const std::vector<int> assignment = hard_assign(points, soft.hyperplanes, soft.weights, cfg);
      FitResult result = hard_phase(points, assignment, soft.hyperplanes, cfg);
      result.weights = std::move(soft.weights);
      result.em_iterations = soft.iterations;
      result.em_converged = soft.converged;
      return result;
    }
    case FitMode::soft_only: {
      SoftPhaseResult soft = soft_phase(points, init, cfg);
      FitResult result;
      result.assignment = hard_assign(points, soft.hyperplanes, soft.weights, cfg);
      result.hyperplanes = std::move(soft.hyperplanes);
      result.weights = std::move(soft.weights);
      result.em_iterations = soft.iterations;
      result.em_converged = soft.converged;
      fill_residuals(points, result);
      return result;
    }
    case FitMode::hard_only: {
      const std::vector<Hyperplane> start = canonical_copy(init);
      return hard_phase(points, assign_nearest(points, start, cfg), start, cfg);
    }
  }
  throw ConfigError("unknown fit mode");
}

}  // namespace

std::string_view to_string(Kernel k) {
  switch (k) {
    case Kernel::inverse: return "inv";
    case Kernel::inverse_square: return "inv2";
    case Kernel::gaussian: return "gauss";
  }
  return "?";
}

std::string_view to_string(FitMode m) {
  switch (m) {
    case FitMode::full: return "full";
    case FitMode::soft_only: return "soft";
    case FitMode::hard_only: return "hard";
  }
  return "?";
}

Kernel parse_kernel(std::string_view name) {
  if (name == "inv" || name == "inverse") return Kernel::inverse;
  if (name == "inv2" || name == "inverse_square") return Kernel::inverse_square;
  if (name == "gauss" || name == "gaussian") return Kernel::gaussian;
  throw ConfigError("unknown kernel '" + std::string(name) + "' (expected inv, inv2 or gauss)");
}

FitMode parse_fit_mode(std::string_view name) {
  if (name == "full") return FitMode::full;
  if (name == "soft") return FitMode::soft_only;
  if (name == "hard") return FitMode::hard_only;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected soft, hard or full)");
}

void FitConfig::validate() const {
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(em_tol > 0.0)) throw ConfigError("em_tol must be positive");
  if (em_max_iters <= 0) throw ConfigError("em_max_iters must be positive");
  descent.validate();
  if (outlier_threshold && !(*outlier_threshold >= 0.0)) throw ConfigError("outlier threshold must be nonnegative");
  if (min_cluster_size && *min_cluster_size <= 0) throw ConfigError("min_cluster_size must be positive");
}

int FitConfig::min_cluster_size_for(Eigen::Index dim) const {
  return min_cluster_size.value_or(static_cast<int>(dim) + 1);
}

double kernel_score(double distance, Kernel kernel, double epsilon) {
  switch (kernel) {
    case Kernel::inverse: return 1.0 / (distance + epsilon);
    case Kernel::inverse_square: return 1.0 / (distance * distance + epsilon);
    case Kernel::gaussian: return std::exp(-distance);
  }
  return 0.0;
}

WeightMatrix compute_weights(const PointSet& points, const std::vector<Hyperplane>& hyperplanes,
                             const FitConfig& cfg) {
  if (hyperplanes.empty()) throw ConfigError("compute_weights needs at least one hyperplane");
  const Eigen::MatrixXd dist = distance_matrix(points, hyperplanes);
  WeightMatrix w(dist.rows(), dist.cols());
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    // The Gaussian is shifted by the row minimum; the ratio is unchanged and
    // the row cannot underflow to 0/0.
    const double shift = cfg.kernel == Kernel::gaussian ? dist.row(i).minCoeff() : 0.0;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < dist.cols(); ++j) {
      w(i, j) = kernel_score(dist(i, j) - shift, cfg.kernel, cfg.epsilon);
      sum += w(i, j);
    }
    if (!(sum > 0.0) || !std::isfinite(sum)) {
      throw NumericalError("kernel scores of point " + std::to_string(i) + " are not normalisable");
    }
    w.row(i) /= sum;
  }
  return w;
}

SoftPhaseResult soft_phase(const PointSet& points, const std::vector<Hyperplane>& init, const FitConfig& cfg,
                           const EmObserver& observer) {
  cfg.validate();
  check_problem(points, init);
  if (points.rows() < points.cols()) throw ConfigError("need at least dim points");

  SoftPhaseResult out;
  out.hyperplanes = canonical_copy(init);
  const auto m = out.hyperplanes.size();
  WeightMatrix previous = WeightMatrix::Zero(points.rows(), static_cast<Eigen::Index>(m));

  for (int iter = 1; iter <= cfg.em_max_iters; ++iter) {
    WeightMatrix w = compute_weights(points, out.hyperplanes, cfg);

    std::vector<Hyperplane> next = out.hyperplanes;
    parallel_for(m, cfg.threads, [&](std::size_t j) {
      const auto col = w.col(static_cast<Eigen::Index>(j));
      const double mass = col.sum();
      if (!(mass > 0.0)) return;  // column underflowed; keep the hyperplane
      const DescentResult r = descend(points, col, out.hyperplanes[j].normal, cfg.descent);
      const double offset = col.dot(points * r.normal) / mass;
      next[j] = canonicalize(Hyperplane{r.normal, offset});
    });

    const double delta = (w - previous).cwiseAbs().maxCoeff();
    out.hyperplanes = std::move(next);
    out.iterations = iter;
    if (observer) observer(iter, w, out.hyperplanes);
    previous = std::move(w);
    if (delta < cfg.em_tol) {
      out.converged = true;
      break;
    }
  }
  out.weights = std::move(previous);
  return out;
}

std::vector<int> hard_assign(const PointSet& points, const std::vector<Hyperplane>& hyperplanes,
                             const WeightMatrix& weights, const FitConfig& cfg) {
  if (weights.rows() != points.rows() || weights.cols() != static_cast<Eigen::Index>(hyperplanes.size())) {
    throw DimensionError("weight matrix shape does not match points x hyperplanes");
  }
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  Eigen::MatrixXd dist;
  if (cfg.outlier_threshold) dist = distance_matrix(points, hyperplanes);
  for (Eigen::Index i = 0; i < weights.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < weights.cols(); ++j) {
      if (weights(i, j) > weights(i, best)) best = static_cast<int>(j);
    }
    if (cfg.outlier_threshold && dist.row(i).minCoeff() > *cfg.outlier_threshold) best = kOutlier;
    out[static_cast<std::size_t>(i)] = best;
  }
  return out;
}

std::vector<int> assign_nearest(const PointSet& points, const std::vector<Hyperplane>& hyperplanes,
                                const FitConfig& cfg) {
  const Eigen::MatrixXd dist = distance_matrix(points, hyperplanes);
  std::vector<int> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    const int best = nearest_in_row(dist, i);
    const bool outlier = cfg.outlier_threshold && dist(i, best) > *cfg.outlier_threshold;
    out[static_cast<std::size_t>(i)] = outlier ? kOutlier : best;
  }
  return out;
}

FitResult hard_phase(const PointSet& points, const std::vector<int>& assignment,
                     const std::vector<Hyperplane>& hyperplanes, const FitConfig& cfg) {
  cfg.validate();
  check_problem(points, hyperplanes);
  if (assignment.size() != static_cast<std::size_t>(points.rows())) {
    throw DimensionError("assignment length does not match the number of points");
  }
  const auto m = static_cast<int>(hyperplanes.size());
  std::vector<std::vector<Eigen::Index>> members(hyperplanes.size());
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    const int a = assignment[i];
    if (a == kOutlier) continue;
    if (a < 0 || a >= m) throw DimensionError("assignment refers to hyperplane " + std::to_string(a));
    members[static_cast<std::size_t>(a)].push_back(static_cast<Eigen::Index>(i));
  }

  const int min_size = cfg.min_cluster_size_for(points.cols());
  std::vector<std::optional<Hyperplane>> refined(hyperplanes.size());
  parallel_for(hyperplanes.size(), cfg.threads, [&](std::size_t j) {
    const auto& rows = members[j];
    if (static_cast<int>(rows.size()) < min_size) return;
    PointSet cluster(static_cast<Eigen::Index>(rows.size()), points.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) cluster.row(static_cast<Eigen::Index>(r)) = points.row(rows[r]);
    const Vector ones = Vector::Ones(cluster.rows());
    const DescentResult d = descend(cluster, ones, canonicalize(hyperplanes[j]).normal, cfg.descent);
    const double offset = (cluster * d.normal).mean();
    refined[j] = canonicalize(Hyperplane{d.normal, offset});
  });

  FitResult result;
  for (auto& h : refined) {
    if (h) result.hyperplanes.push_back(std::move(*h));
  }
  result.dropped_clusters = m - static_cast<int>(result.hyperplanes.size());
  if (result.hyperplanes.empty()) throw NumericalError("every cluster was dropped in hard refinement");

  result.assignment = assign_nearest(points, result.hyperplanes, cfg);
  fill_residuals(points, result);
  return result;
}

FitResult fit(const PointSet& points, const std::vector<Hyperplane>& init, const FitConfig& cfg) {
  cfg.validate();
  check_problem(points, init);

  FitResult result = fit_once(points, init, cfg);
  if (!cfg.origin_shift) return result;

  const double half_diagonal = 0.5 * (points.colwise().maxCoeff() - points.colwise().minCoeff()).norm();
  const bool near_origin = std::any_of(result.hyperplanes.begin(), result.hyperplanes.end(), [&](const Hyperplane& h) {
    return h.offset < 1e-6 * half_diagonal;
  });
  if (!(half_diagonal > 0.0) || !near_origin) return result;

  // Refit once in a frame translated along the first axis, then map back.
  const double shift = 1.5 * half_diagonal;
  PointSet moved = points;
  moved.col(0).array() += shift;
  std::vector<Hyperplane> moved_init;
  moved_init.reserve(init.size());
  for (const Hyperplane& h0 : init) {
    const Hyperplane h = canonicalize(h0);
    moved_init.push_back(canonicalize(Hyperplane{h.normal, h.offset + h.normal(0) * shift}));
  }
  FitResult shifted = fit_once(moved, moved_init, cfg);
  for (Hyperplane& h : shifted.hyperplanes) h = canonicalize(Hyperplane{h.normal, h.offset - h.normal(0) * shift});
  fill_residuals(points, shifted);
  shifted.origin_shifted = true;
  return shifted;
}

}  // namespace hyperfit
