#pragma once

#include "hyperfit/data.hpp"
#include "hyperfit/solver.hpp"

#include <string>
#include <vector>

namespace hyperfit {

struct MetricsRecord {
  int hn = 0;
  double tc = 0.0;
  double he = 0.0;
  double tc_per_point = 0.0;
  double runtime_seconds = 0.0;
};

/// Sum over points of the distance to the nearest hyperplane.
double total_cost(const PointSet& points, const std::vector<Hyperplane>& hyperplanes);

/// Sum over estimated hyperplanes of the hbar distance to the nearest ground
/// truth hyperplane (nearest-neighbour, not one-to-one).
double hyperplane_error(const std::vector<Hyperplane>& estimated, const std::vector<Hyperplane>& truth);

MetricsRecord evaluate(const std::vector<Hyperplane>& estimated, const GroundTruth& truth,
                       const PointSet& points, double runtime_seconds = 0.0);
MetricsRecord evaluate(const FitResult& result, const GroundTruth& truth, const PointSet& points,
                       double runtime_seconds = 0.0);

}  // namespace hyperfit
