#include "hyperfit/metrics.hpp"

#include "hyperfit/error.hpp"

#include <limits>

namespace hyperfit {

double total_cost(const PointSet& points, const std::vector<Hyperplane>& hyperplanes) {
  if (hyperplanes.empty()) throw ConfigError("total_cost needs at least one hyperplane");
  Vector best = Vector::Constant(points.rows(), std::numeric_limits<double>::infinity());
  for (const Hyperplane& h : hyperplanes) best = best.cwiseMin(distances(points, h));
  return best.sum();
}

double hyperplane_error(const std::vector<Hyperplane>& estimated, const std::vector<Hyperplane>& truth) {
  if (truth.empty()) throw ConfigError("hyperplane_error needs a non-empty ground truth");
  double sum = 0.0;
  for (const Hyperplane& est : estimated) {
    const Vector feature = hbar(est);
    double nearest = std::numeric_limits<double>::infinity();
    for (const Hyperplane& gt : truth) {
      if (gt.dim() != est.dim()) throw DimensionError("estimated and ground-truth hyperplanes differ in dimension");
      nearest = std::min(nearest, (feature - hbar(gt)).norm());
    }
    sum += nearest;
  }
  return sum;
}

MetricsRecord evaluate(const std::vector<Hyperplane>& estimated, const GroundTruth& truth, const PointSet& points,
                       double runtime_seconds) {
  MetricsRecord rec;
  rec.hn = static_cast<int>(estimated.size());
  rec.tc = total_cost(points, estimated);
  rec.he = hyperplane_error(estimated, truth.hyperplanes);
  rec.tc_per_point = points.rows() > 0 ? rec.tc / static_cast<double>(points.rows()) : 0.0;
  rec.runtime_seconds = runtime_seconds;
  return rec;
}

MetricsRecord evaluate(const FitResult& result, const GroundTruth& truth, const PointSet& points,
                       double runtime_seconds) {
  return evaluate(result.hyperplanes, truth, points, runtime_seconds);
}

}  // namespace hyperfit
