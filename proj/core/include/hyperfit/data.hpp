#pragma once

#include "hyperfit/geometry.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hyperfit {

/// Parameters of a synthetic instance.
struct InstanceSpec {
  int dim = 2;
  int num_hyperplanes = 3;
  int total_points = 120;
  /// Half-width of the slab around each hyperplane.
  double noise = 0.1;
  /// Side of the origin-centred sampling box.
  double box_side = 10.0;
  /// Minimum pairwise hbar distance. Defaults to 6 * noise.
  std::optional<double> min_separation;
  std::uint64_t seed = 0;

  double separation() const { return min_separation.value_or(6.0 * noise); }
  void validate() const;
};

struct GroundTruth {
  std::vector<Hyperplane> hyperplanes;
  /// Index of the generating hyperplane per point.
  std::vector<int> source;
};

struct Instance {
  PointSet points;
  GroundTruth truth;
};

/// Balanced synthetic instance: every hyperplane contributes floor(N/M)
/// points (the first N mod M one extra) drawn uniformly from its box-clipped
/// slab of half-width `noise`. Throws ConfigError when the separation cannot
/// be met after bounded retries.
Instance generate_instance(const InstanceSpec& spec);

/// CSV, one point per row. An empty file yields an empty (0 x 0) set.
PointSet load_points(const std::filesystem::path& path, bool header = false);
void save_points(const std::filesystem::path& path, const PointSet& points, bool header = false);

/// Line-delimited records {"normal": [...], "d": ...}. The coefficient form
/// {"a": [...], "b": ...} is accepted on input and converted.
std::vector<Hyperplane> load_hyperplanes(const std::filesystem::path& path);
void save_hyperplanes(const std::filesystem::path& path, const std::vector<Hyperplane>& hyperplanes);

/// key=value sidecar with the generating spec.
void save_instance_meta(const std::filesystem::path& path, const InstanceSpec& spec);
InstanceSpec load_instance_meta(const std::filesystem::path& path);

/// File names written by save_instance() inside its directory.
struct InstanceFiles {
  static constexpr const char* points = "points.csv";
  static constexpr const char* truth = "truth.jsonl";
  static constexpr const char* labels = "labels.csv";
  static constexpr const char* meta = "instance.meta";
};

void save_instance(const std::filesystem::path& dir, const Instance& instance, const InstanceSpec& spec);

/// Shortest text that parses back to exactly `value` (at most 17 significant digits).
std::string format_real(double value);

}  // namespace hyperfit
