#include "hyperfit/select.hpp"

#include "hyperfit/error.hpp"
#include "hyperfit/init.hpp"
#include "hyperfit/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <string>

namespace hyperfit {

BicValue laplace_bic(std::span<const double> residuals, int m, int dim) {
  if (residuals.empty()) throw ConfigError("laplace_bic needs at least one residual");
  const auto n = static_cast<double>(residuals.size());
  const double sum = std::accumulate(residuals.begin(), residuals.end(), 0.0);
  BicValue out;
  double scale = 2.0 * sum / n;
  if (!(scale >= kBicResidualFloor)) {
    scale = kBicResidualFloor;
    out.floored = true;
  }
  out.value = 2.0 * n * std::log(scale) + 2.0 * n + (m * (dim + 1.0) - 1.0) * std::log(n);
  return out;
}

std::vector<Hyperplane> random_hyperplanes(const PointSet& points, int m, Rng& rng) {
  if (m <= 0) throw ConfigError("number of hyperplanes must be positive");
  if (points.rows() == 0) throw ConfigError("empty point set");
  const auto dim = static_cast<int>(points.cols());
  const SamplingPlan plan = SamplingPlan::for_dim(dim);
  const std::vector<Vector> lattice = sample_normals(plan);
  // Jitter of about half the lattice spacing so restarts do not repeat exactly.
  const double spacing = std::numbers::pi / std::pow(static_cast<double>(lattice.size()), 1.0 / (dim - 1));
  const double radius = points.rowwise().norm().maxCoeff();

  std::uniform_int_distribution<std::size_t> pick(0, lattice.size() - 1);
  std::normal_distribution<double> jitter(0.0, 0.5 * spacing);
  std::uniform_real_distribution<double> offset(0.0, radius);
  std::vector<Hyperplane> out;
  out.reserve(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    Vector n = lattice[pick(rng)];
    for (Eigen::Index k = 0; k < n.size(); ++k) n(k) += jitter(rng);
    const double d = offset(rng);
    out.push_back(canonicalize(Hyperplane{n, d}));
  }
  return out;
}

SweepResult sweep_model_order(const PointSet& points, int m_max, const FitConfig& cfg, int restarts,
                              std::uint64_t seed) {
  cfg.validate();
  validate_points(points);
  const Eigen::Index n = points.rows();
  const Eigen::Index dim = points.cols();
  if (n < dim || n == 0) throw ConfigError("model-order sweep needs at least dim points");
  if (m_max < 1 || m_max > n / dim) {
    throw ConfigError("m_max must lie in [1, floor(n / dim)] = [1, " + std::to_string(n / dim) + "]");
  }
  if (restarts < 1) throw ConfigError("restarts must be >= 1");

  const auto cells = static_cast<std::size_t>(m_max) * static_cast<std::size_t>(restarts);
  std::vector<std::optional<FitResult>> fits(cells);
  FitConfig inner = cfg;
  inner.threads = 1;
  parallel_for(cells, cfg.threads, [&](std::size_t cell) {
    const int m = static_cast<int>(cell / static_cast<std::size_t>(restarts)) + 1;
    const auto restart = cell % static_cast<std::size_t>(restarts);
    Rng rng(derive_seed(derive_seed(seed, static_cast<std::uint64_t>(m)), restart));
    const std::vector<Hyperplane> init = random_hyperplanes(points, m, rng);
    try {
      fits[cell] = fit(points, init, inner);
    } catch (const NumericalError&) {
      // every cluster dropped: this restart produced no model
    }
  });

  SweepResult out;
  std::optional<std::size_t> chosen_cell;
  double chosen_bic = std::numeric_limits<double>::infinity();
  for (int m = 1; m <= m_max; ++m) {
    OrderCandidate row;
    row.m = m;
    row.total_cost = std::numeric_limits<double>::infinity();
    row.bic = std::numeric_limits<double>::infinity();
    std::optional<std::size_t> best;
    for (int r = 0; r < restarts; ++r) {
      const std::size_t cell = static_cast<std::size_t>(m - 1) * static_cast<std::size_t>(restarts) + static_cast<std::size_t>(r);
      if (!fits[cell]) continue;
      const auto& res = fits[cell]->residuals;
      const double tc = std::accumulate(res.begin(), res.end(), 0.0);
      if (!best || tc < row.total_cost) {
        best = cell;
        row.total_cost = tc;
        row.best_restart = r;
      }
    }
    if (best) {
      const FitResult& f = *fits[*best];
      row.hyperplanes = static_cast<int>(f.hyperplanes.size());
      row.bic = laplace_bic(f.residuals, row.hyperplanes, static_cast<int>(dim)).value;
      if (row.bic < chosen_bic) {
        chosen_bic = row.bic;
        chosen_cell = best;
        out.chosen_m = m;
      }
    }
    out.per_m.push_back(row);
  }
  if (!chosen_cell) throw NumericalError("model-order sweep: no restart produced a model");
  out.chosen_fit = std::move(*fits[*chosen_cell]);
  return out;
}

}  // namespace hyperfit
