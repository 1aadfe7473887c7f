#pragma once

#include <hyperfit/hyperfit.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hyperfit::cli {

enum class InitMethod { density, random };

std::string_view to_string(InitMethod m);
InitMethod parse_init_method(std::string_view name);

enum class Suite { ablation, scaling, window, kernel };

std::string_view to_string(Suite s);
Suite parse_suite(std::string_view name);

// One grid axis per field; every combination is a setting, and every setting
// runs on the same instances (instances depend only on seed, m, points).
struct SuiteConfig {
  Suite suite = Suite::ablation;
  int dim = 2;
  double noise = 0.1;
  double box_side = 10.0;
  std::vector<int> hyperplane_counts;
  std::vector<int> point_counts;
  std::vector<double> windows;
  std::vector<Kernel> kernels;
  std::vector<InitMethod> inits;
  std::vector<FitMode> modes;
  int instances = 20;
  int trials = 10;
  std::optional<int> budget;
  std::uint64_t seed = 0;
  int threads = 1;
  bool timing = false;

  void validate() const;
};

/// Grid of the named suite with its reference settings.
SuiteConfig default_suite(Suite suite);

struct BenchRow {
  int m = 0;
  int points = 0;
  double window = 0.0;
  Kernel kernel = Kernel::inverse_square;
  InitMethod init = InitMethod::density;
  FitMode mode = FitMode::full;
  int runs = 0;
  int failures = 0;  // runs that ended with no surviving hyperplane
  double hn = 0.0;
  double exact_hn = 0.0;  // fraction of runs with HN == m
  double tc = 0.0;
  double tc_per_point = 0.0;
  double he = 0.0;
  double seconds = 0.0;
};

std::uint64_t instance_seed(std::uint64_t base, int m, int points, int instance);
std::uint64_t trial_seed(std::uint64_t instance_seed, int trial);

/// Rows in grid order: m, points, window, kernel, init, mode.
std::vector<BenchRow> run_suite(const SuiteConfig& cfg);

void write_csv(std::ostream& out, const SuiteConfig& cfg, const std::vector<BenchRow>& rows);
std::string to_json(const SuiteConfig& cfg, const std::vector<BenchRow>& rows);

}  // namespace hyperfit::cli
