#include "hyperfit/init.hpp"

#include "hyperfit/error.hpp"
#include "hyperfit/manifold.hpp"
#include "hyperfit/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

namespace hyperfit {
namespace {

constexpr double kOriginShiftFactor = 100.0;
constexpr int kRecentrePasses = 8;

std::vector<Vector> circle_grid(int budget) {
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(budget));
  for (int k = 0; k < budget; ++k) {
    const double theta = -std::numbers::pi + 2.0 * std::numbers::pi * k / budget;
    out.push_back(angles_to_normal(std::span<const double>(&theta, 1)));
  }
  return out;
}

// Fibonacci lattice on S^2: equal-area latitude bands, golden-angle longitudes.
std::vector<Vector> sphere_spiral(int budget) {
  const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(budget));
  for (int k = 0; k < budget; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / budget;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = std::remainder(golden_angle * k, 2.0 * std::numbers::pi);
    Vector n(3);
    n << r * std::cos(phi), r * std::sin(phi), z;
    out.push_back(n.normalized());
  }
  return out;
}

std::vector<Vector> angle_grid(int dim, int budget) {
  const std::vector<int> counts = angle_grid_counts(dim, budget);
  const std::size_t axes = counts.size();
  std::vector<int> index(axes, 0);
  std::vector<double> theta(axes);
  std::vector<Vector> out;
  const int total = std::accumulate(counts.begin(), counts.end(), 1, std::multiplies<>());
  out.reserve(static_cast<std::size_t>(total));

  // Lexicographic order with the azimuth varying slowest.
  for (int flat = 0; flat < total; ++flat) {
    int rest = flat;
    for (std::size_t a = axes; a-- > 0;) {
      index[a] = rest % counts[a];
      rest /= counts[a];
    }
    theta[0] = -std::numbers::pi + 2.0 * std::numbers::pi * index[0] / counts[0];
    for (std::size_t a = 1; a < axes; ++a) {
      theta[a] = -std::numbers::pi / 2 + (index[a] + 0.5) * std::numbers::pi / counts[a];
    }
    out.push_back(angles_to_normal(theta));
  }
  return out;
}

}  // namespace

std::string_view to_string(SamplingScheme s) {
  switch (s) {
    case SamplingScheme::circle_grid: return "circle_grid";
    case SamplingScheme::sphere_spiral: return "sphere_spiral";
    case SamplingScheme::angle_grid: return "angle_grid";
  }
  return "?";
}

SamplingScheme parse_sampling_scheme(std::string_view name) {
  if (name == "circle_grid") return SamplingScheme::circle_grid;
  if (name == "sphere_spiral") return SamplingScheme::sphere_spiral;
  if (name == "angle_grid") return SamplingScheme::angle_grid;
  throw ConfigError("unknown sampling scheme '" + std::string(name) + "'");
}

int SamplingPlan::default_budget(int dim) {
  if (dim <= 2) return 180;
  if (dim == 3) return 1000;
  return 4000;
}

SamplingPlan SamplingPlan::for_dim(int dim) {
  SamplingPlan plan;
  plan.dim = dim;
  plan.budget = default_budget(dim);
  plan.scheme = dim == 2 ? SamplingScheme::circle_grid
              : dim == 3 ? SamplingScheme::sphere_spiral
                         : SamplingScheme::angle_grid;
  return plan;
}

void SamplingPlan::validate() const {
  if (dim < 2) throw ConfigError("sampling dimension must be >= 2");
  if (budget < 2) throw ConfigError("sampling budget must be >= 2");
  if (scheme == SamplingScheme::circle_grid && dim != 2) throw ConfigError("circle_grid needs dim 2");
  if (scheme == SamplingScheme::sphere_spiral && dim != 3) throw ConfigError("sphere_spiral needs dim 3");
}

void WindowConfig::validate() const {
  if (!(width > 0.0) || !std::isfinite(width)) throw ConfigError("window width must be positive");
  if (thres && *thres < 0) throw ConfigError("thres must be nonnegative");
  if (!(thres_fraction >= 0.0 && thres_fraction < 1.0)) throw ConfigError("thres fraction must be in [0, 1)");
  if (min_points && *min_points <= 0) throw ConfigError("min_points must be positive");
}

int WindowConfig::thres_for(Eigen::Index dim, Eigen::Index num_points) const {
  if (thres) return *thres;
  const auto relative = static_cast<int>(std::floor(thres_fraction * static_cast<double>(num_points)));
  return std::max(2 * static_cast<int>(dim), relative);
}

int WindowConfig::min_points_for(Eigen::Index dim) const {
  return min_points.value_or(static_cast<int>(dim) + 1);
}

std::vector<int> angle_grid_counts(int dim, int budget) {
  if (dim < 2) throw ConfigError("angle grid needs dim >= 2");
  if (budget < 2) throw ConfigError("sampling budget must be >= 2");
  const int axes = dim - 1;
  int base = std::max(1, static_cast<int>(std::ceil(std::pow(budget, 1.0 / axes) - 1e-9)));
  std::vector<int> counts(static_cast<std::size_t>(axes), base);
  counts[0] = 2 * base;

  auto product = [&] {
    long long p = 1;
    for (int c : counts) p *= c;
    return p;
  };
  // Shrink the axis with the largest count per unit weight (azimuth weighs 2),
  // preferring higher-index angles on ties.
  while (product() > budget) {
    int pick = -1;
    double best = 0.0;
    for (int a = axes - 1; a >= 0; --a) {
      const int floor = a == 0 ? 2 : 1;
      if (counts[static_cast<std::size_t>(a)] <= floor) continue;
      const double load = counts[static_cast<std::size_t>(a)] / (a == 0 ? 2.0 : 1.0);
      if (pick < 0 || load > best) {
        pick = a;
        best = load;
      }
    }
    if (pick < 0) break;
    counts[static_cast<std::size_t>(pick)] -= pick == 0 ? 2 : 1;
  }
  return counts;
}

std::vector<Vector> sample_normals(const SamplingPlan& plan) {
  plan.validate();
  switch (plan.scheme) {
    case SamplingScheme::circle_grid: return circle_grid(plan.budget);
    case SamplingScheme::sphere_spiral: return sphere_spiral(plan.budget);
    case SamplingScheme::angle_grid: return angle_grid(plan.dim, plan.budget);
  }
  return {};
}

WindowHit best_hyperplane(const PointSet& points, const Eigen::Ref<const Vector>& normal, double width) {
  if (!(width > 0.0)) throw ConfigError("window width must be positive");
  if (normal.size() != points.cols()) throw DimensionError("normal and points differ in dimension");

  const Vector proj = points * normal;
  std::vector<Eigen::Index> order;
  order.reserve(static_cast<std::size_t>(proj.size()));
  for (Eigen::Index i = 0; i < proj.size(); ++i) {
    if (proj(i) > 0.0) order.push_back(i);
  }
  if (order.empty()) return {};
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return proj(a) < proj(b); });
  std::vector<double> sorted(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) sorted[k] = proj(order[k]);

  const double lower = sorted.front();
  const double upper = sorted.back();
  const auto windows = std::max<long long>(1, static_cast<long long>(std::ceil(2.0 * (upper - lower) / width)));

  long long best_k = 0;
  std::size_t best_begin = 0, best_end = 0;
  for (long long k = 1; k <= windows; ++k) {
    const double centre = lower + static_cast<double>(k) * width / 2.0;
    const auto lo = std::lower_bound(sorted.begin(), sorted.end(), centre - width / 2.0);
    const auto hi = std::upper_bound(sorted.begin(), sorted.end(), centre + width / 2.0);
    const auto begin = static_cast<std::size_t>(lo - sorted.begin());
    const auto end = static_cast<std::size_t>(hi - sorted.begin());
    if (best_k == 0 || end - begin > best_end - best_begin) {
      best_k = k;
      best_begin = begin;
      best_end = end;
    }
  }

  WindowHit hit;
  hit.offset = lower + static_cast<double>(best_k) * width / 2.0;
  hit.members.assign(order.begin() + static_cast<std::ptrdiff_t>(best_begin),
                     order.begin() + static_cast<std::ptrdiff_t>(best_end));
  std::sort(hit.members.begin(), hit.members.end());
  return hit;
}

namespace {

// A point far from the bounding box along a fixed direction with no special
// alignment to the axes or the diagonals.
Vector shifted_origin(const PointSet& points) {
  const Eigen::Index dim = points.cols();
  const Vector lo = points.colwise().minCoeff().transpose();
  const Vector hi = points.colwise().maxCoeff().transpose();
  const double half_diagonal = 0.5 * (hi - lo).norm();
  const double scale = std::max({half_diagonal, lo.cwiseAbs().maxCoeff(), hi.cwiseAbs().maxCoeff(), 1.0});
  Vector direction(dim);
  const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
  for (Eigen::Index k = 0; k < dim; ++k) direction(k) = std::pow(golden, -static_cast<double>(k)) * (k % 2 ? -1.0 : 1.0);
  direction.normalize();
  return 0.5 * (lo + hi) - kOriginShiftFactor * scale * direction;
}

// Unweighted least-variance hyperplane through the given rows.
Hyperplane refit_rows(const PointSet& subset, const std::vector<Eigen::Index>& rows, const Vector& start) {
  PointSet chosen(static_cast<Eigen::Index>(rows.size()), subset.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) chosen.row(static_cast<Eigen::Index>(i)) = subset.row(rows[i]);
  const Vector weights = Vector::Ones(chosen.rows());
  const Vector normal = descend(chosen, weights, start).normal;
  return Hyperplane{normal, (chosen * normal).mean()};
}

// Re-centres the accepted window on its slab: refit, take every point within
// half a width of the refit, repeat. Each pass halves the offset error of a
// uniform slab no wider than the window.
std::vector<Eigen::Index> slab_members(const PointSet& subset, const WindowHit& hit, const Vector& normal,
                                       double width) {
  std::vector<Eigen::Index> rows = hit.members;
  Vector start = normal;
  for (int pass = 0; pass < kRecentrePasses; ++pass) {
    const Hyperplane h = refit_rows(subset, rows, start);
    std::vector<Eigen::Index> next;
    for (Eigen::Index r = 0; r < subset.rows(); ++r) {
      if (distance(subset.row(r).transpose(), h) <= 0.5 * width) next.push_back(r);
    }
    if (next == rows || next.size() < static_cast<std::size_t>(subset.cols())) break;
    rows = std::move(next);
    start = h.normal;
  }
  return rows;
}

}  // namespace

std::vector<Hyperplane> initial_hyperplanes(const PointSet& points, const SamplingPlan& plan,
                                            const WindowConfig& window, int threads) {
  window.validate();
  plan.validate();
  if (points.rows() == 0) return {};
  validate_points(points);
  if (plan.dim != points.cols()) {
    throw DimensionError("sampling plan is for dim " + std::to_string(plan.dim) + ", points have " +
                         std::to_string(points.cols()));
  }

  const std::vector<Vector> normals = sample_normals(plan);
  const Vector origin = window.origin_shift ? shifted_origin(points) : Vector::Zero(points.cols());
  const PointSet moved = points.rowwise() - origin.transpose();
  const int thres = window.thres_for(points.cols(), points.rows());
  const int min_points = window.min_points_for(points.cols());

  std::vector<Eigen::Index> remaining(static_cast<std::size_t>(points.rows()));
  std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});
  std::vector<Hyperplane> found;
  std::vector<WindowHit> hits(normals.size());

  while (static_cast<int>(remaining.size()) > thres) {
    PointSet subset(static_cast<Eigen::Index>(remaining.size()), points.cols());
    for (std::size_t r = 0; r < remaining.size(); ++r) subset.row(static_cast<Eigen::Index>(r)) = moved.row(remaining[r]);

    parallel_for(normals.size(), threads, [&](std::size_t k) { hits[k] = best_hyperplane(subset, normals[k], window.width); });

    std::size_t best = 0;
    for (std::size_t k = 1; k < hits.size(); ++k) {
      if (hits[k].count() > hits[best].count()) best = k;
    }
    if (hits[best].count() < min_points) break;

    found.push_back(canonicalize(Hyperplane{normals[best], hits[best].offset + normals[best].dot(origin)}));
    std::vector<bool> taken(remaining.size(), false);
    const std::vector<Eigen::Index> removed =
        window.refit_removal ? slab_members(subset, hits[best], normals[best], window.width) : hits[best].members;
    for (Eigen::Index local : removed) taken[static_cast<std::size_t>(local)] = true;
    std::vector<Eigen::Index> kept;
    kept.reserve(remaining.size());
    for (std::size_t r = 0; r < remaining.size(); ++r) {
      if (!taken[r]) kept.push_back(remaining[r]);
    }
    remaining = std::move(kept);
  }
  return found;
}

}  // namespace hyperfit
