#include "hyperfit_cli/bench.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <tuple>

namespace hyperfit::cli {

std::string_view to_string(InitMethod m) { return m == InitMethod::density ? "density" : "random"; }

InitMethod parse_init_method(std::string_view name) {
  if (name == "density") return InitMethod::density;
  if (name == "random") return InitMethod::random;
  throw ConfigError("unknown init method '" + std::string(name) + "' (density|random)");
}

std::string_view to_string(Suite s) {
  switch (s) {
    case Suite::ablation: return "ablation";
    case Suite::scaling: return "scaling";
    case Suite::window: return "window";
    case Suite::kernel: return "kernel";
  }
  return "?";
}

Suite parse_suite(std::string_view name) {
  for (Suite s : {Suite::ablation, Suite::scaling, Suite::window, Suite::kernel}) {
    if (name == to_string(s)) return s;
  }
  throw ConfigError("unknown suite '" + std::string(name) + "' (ablation|scaling|window|kernel)");
}

void SuiteConfig::validate() const {
  if (dim < 2) throw ConfigError("bench: dim must be >= 2");
  if (!(noise > 0.0)) throw ConfigError("bench: noise must be positive");
  if (hyperplane_counts.empty() || point_counts.empty() || windows.empty() || kernels.empty() ||
      inits.empty() || modes.empty()) {
    throw ConfigError("bench: every grid axis needs at least one value");
  }
  for (int m : hyperplane_counts) {
    if (m < 1) throw ConfigError("bench: hyperplane counts must be >= 1");
  }
  for (int n : point_counts) {
    if (n < 1) throw ConfigError("bench: point counts must be >= 1");
  }
  for (double w : windows) {
    if (!(w > 0.0)) throw ConfigError("bench: windows must be positive");
  }
  if (instances < 1 || trials < 1) throw ConfigError("bench: instances and trials must be >= 1");
  if (budget && *budget < 1) throw ConfigError("bench: budget must be >= 1");
}

SuiteConfig default_suite(Suite suite) {
  SuiteConfig cfg;
  cfg.suite = suite;
  cfg.kernels = {Kernel::inverse_square};
  cfg.inits = {InitMethod::density};
  cfg.modes = {FitMode::full};
  switch (suite) {
    case Suite::ablation:
      cfg.noise = 0.1;
      cfg.hyperplane_counts = {2, 3, 4, 5};
      cfg.point_counts = {120};
      cfg.windows = {0.4};
      cfg.inits = {InitMethod::random, InitMethod::density};
      cfg.modes = {FitMode::soft_only, FitMode::hard_only, FitMode::full};
      break;
    case Suite::scaling:
      cfg.noise = 0.1;
      cfg.hyperplane_counts = {3, 4, 5};
      cfg.point_counts = {600, 1200, 3000};
      cfg.windows = {0.4};
      break;
    case Suite::window:
      cfg.noise = 0.3;
      cfg.hyperplane_counts = {3, 4, 5};
      cfg.point_counts = {1200};
      cfg.windows = {0.1, 0.2, 0.4, 0.6, 0.8, 1.0, 1.2};
      break;
    case Suite::kernel:
      cfg.noise = 0.3;
      cfg.hyperplane_counts = {3, 4, 5};
      cfg.point_counts = {1200};
      cfg.windows = {0.6};
      cfg.kernels = {Kernel::gaussian, Kernel::inverse, Kernel::inverse_square};
      break;
  }
  return cfg;
}

std::uint64_t instance_seed(std::uint64_t base, int m, int points, int instance) {
  const std::uint64_t s = derive_seed(derive_seed(base, static_cast<std::uint64_t>(m)), static_cast<std::uint64_t>(points));
  return derive_seed(s, static_cast<std::uint64_t>(instance));
}

std::uint64_t trial_seed(std::uint64_t instance_seed, int trial) {
  return derive_seed(instance_seed, 0x7472ULL + static_cast<std::uint64_t>(trial));
}

namespace {

struct Setting {
  int m;
  int points;
  double window;
  Kernel kernel;
  InitMethod init;
  FitMode mode;
};

struct Outcome {
  bool ok = false;
  MetricsRecord metrics;
};

Outcome run_one(const Instance& inst, const Setting& s, std::uint64_t seed, const SuiteConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Outcome out;
  try {
    std::vector<Hyperplane> init;
    if (s.init == InitMethod::density) {
      SamplingPlan plan = SamplingPlan::for_dim(cfg.dim);
      if (cfg.budget) plan.budget = *cfg.budget;
      WindowConfig wc;
      wc.width = s.window;
      init = initial_hyperplanes(inst.points, plan, wc, 1);
    } else {
      Rng rng(seed);
      init = random_hyperplanes(inst.points, s.m, rng);
    }
    if (init.empty()) return out;
    FitConfig fc;
    fc.kernel = s.kernel;
    fc.mode = s.mode;
    const FitResult res = fit(inst.points, init, fc);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.metrics = evaluate(res, inst.truth, inst.points, secs);
    out.ok = true;
  } catch (const NumericalError&) {
    // counted as a failed run
  }
  return out;
}

}  // namespace

std::vector<BenchRow> run_suite(const SuiteConfig& cfg) {
  cfg.validate();

  std::vector<std::tuple<int, int, int>> keys;
  for (int m : cfg.hyperplane_counts) {
    for (int n : cfg.point_counts) {
      for (int i = 0; i < cfg.instances; ++i) keys.emplace_back(m, n, i);
    }
  }
  std::vector<Instance> instances(keys.size());
  parallel_for(keys.size(), cfg.threads, [&](std::size_t k) {
    const auto [m, n, i] = keys[k];
    InstanceSpec spec;
    spec.dim = cfg.dim;
    spec.num_hyperplanes = m;
    spec.total_points = n;
    spec.noise = cfg.noise;
    spec.box_side = cfg.box_side;
    spec.seed = instance_seed(cfg.seed, m, n, i);
    instances[k] = generate_instance(spec);
  });
  std::map<std::tuple<int, int, int>, std::size_t> index;
  for (std::size_t k = 0; k < keys.size(); ++k) index[keys[k]] = k;

  std::vector<Setting> settings;
  for (int m : cfg.hyperplane_counts) {
    for (int n : cfg.point_counts) {
      for (double w : cfg.windows) {
        for (Kernel kern : cfg.kernels) {
          for (InitMethod init : cfg.inits) {
            for (FitMode mode : cfg.modes) settings.push_back({m, n, w, kern, init, mode});
          }
        }
      }
    }
  }

  const auto per_setting = static_cast<std::size_t>(cfg.instances) * static_cast<std::size_t>(cfg.trials);
  std::vector<Outcome> outcomes(settings.size() * per_setting);
  parallel_for(outcomes.size(), cfg.threads, [&](std::size_t cell) {
    const Setting& s = settings[cell / per_setting];
    const auto rest = cell % per_setting;
    const int i = static_cast<int>(rest / static_cast<std::size_t>(cfg.trials));
    const int t = static_cast<int>(rest % static_cast<std::size_t>(cfg.trials));
    const Instance& inst = instances[index.at({s.m, s.points, i})];
    outcomes[cell] = run_one(inst, s, trial_seed(instance_seed(cfg.seed, s.m, s.points, i), t), cfg);
  });

  std::vector<BenchRow> rows;
  rows.reserve(settings.size());
  for (std::size_t k = 0; k < settings.size(); ++k) {
    const Setting& s = settings[k];
    BenchRow row{s.m, s.points, s.window, s.kernel, s.init, s.mode};
    int exact = 0;
    for (std::size_t c = k * per_setting; c < (k + 1) * per_setting; ++c) {
      const Outcome& o = outcomes[c];
      if (!o.ok) {
        ++row.failures;
        continue;
      }
      ++row.runs;
      row.hn += o.metrics.hn;
      row.tc += o.metrics.tc;
      row.he += o.metrics.he;
      row.seconds += o.metrics.runtime_seconds;
      exact += o.metrics.hn == s.m;
    }
    const double runs = row.runs > 0 ? row.runs : std::numeric_limits<double>::quiet_NaN();
    row.hn /= runs;
    row.tc /= runs;
    row.he /= runs;
    row.seconds /= runs;
    row.exact_hn = exact / runs;
    row.tc_per_point = row.tc / s.points;
    rows.push_back(row);
  }
  return rows;
}

void write_csv(std::ostream& out, const SuiteConfig& cfg, const std::vector<BenchRow>& rows) {
  out << "suite,dim,noise,m,points,window,kernel,init,mode,instances,trials,runs,failures,hn,exact_hn,tc,tc_per_point,he";
  if (cfg.timing) out << ",seconds";
  out << '\n';
  for (const BenchRow& r : rows) {
    out << to_string(cfg.suite) << ',' << cfg.dim << ',' << format_real(cfg.noise) << ',' << r.m << ',' << r.points
        << ',' << format_real(r.window) << ',' << to_string(r.kernel) << ',' << to_string(r.init) << ','
        << to_string(r.mode) << ',' << cfg.instances << ',' << cfg.trials << ',' << r.runs << ',' << r.failures
        << ',' << format_real(r.hn) << ',' << format_real(r.exact_hn) << ',' << format_real(r.tc) << ','
        << format_real(r.tc_per_point) << ',' << format_real(r.he);
    if (cfg.timing) out << ',' << format_real(r.seconds);
    out << '\n';
  }
}

std::string to_json(const SuiteConfig& cfg, const std::vector<BenchRow>& rows) {
  auto num = [](double v) -> nlohmann::json { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
  nlohmann::json doc;
  doc["suite"] = to_string(cfg.suite);
  doc["dim"] = cfg.dim;
  doc["noise"] = cfg.noise;
  doc["instances"] = cfg.instances;
  doc["trials"] = cfg.trials;
  doc["seed"] = cfg.seed;
  doc["rows"] = nlohmann::json::array();
  for (const BenchRow& r : rows) {
    nlohmann::json j;
    j["m"] = r.m;
    j["points"] = r.points;
    j["window"] = r.window;
    j["kernel"] = to_string(r.kernel);
    j["init"] = to_string(r.init);
    j["mode"] = to_string(r.mode);
    j["runs"] = r.runs;
    j["failures"] = r.failures;
    j["hn"] = num(r.hn);
    j["exact_hn"] = num(r.exact_hn);
    j["tc"] = num(r.tc);
    j["tc_per_point"] = num(r.tc_per_point);
    j["he"] = num(r.he);
    if (cfg.timing) j["seconds"] = num(r.seconds);
    doc["rows"].push_back(std::move(j));
  }
  return doc.dump(2);
}

}  // namespace hyperfit::cli
