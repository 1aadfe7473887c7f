#include "hyperfit_cli/commands.hpp"
#include "hyperfit_cli/bench.hpp"

#include <hyperfit/hyperfit.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#ifndef HYPERFIT_VERSION
#define HYPERFIT_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace hyperfit::cli {

std::string_view tool_version() { return HYPERFIT_VERSION; }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view s, std::string_view what) {
  s = trim(s);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ConfigError("bad " + std::string(what) + " '" + std::string(s) + "'");
  }
  return value;
}

template <typename F>
void for_each_item(std::string_view text, F&& f) {
  if (trim(text).empty()) throw ConfigError("empty list");
  while (true) {
    const auto comma = text.find(',');
    f(trim(text.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

json hyperplane_json(const Hyperplane& h) {
  return json{{"normal", std::vector<double>(h.normal.data(), h.normal.data() + h.normal.size())}, {"d", h.offset}};
}

int resolve_thread_flag(const std::optional<int>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kThreadsEnv); env && *env) return parse_number<int>(env, kThreadsEnv);
  return 1;
}

json manifest(std::string_view command, const std::vector<std::string>& args, json config, json artifacts) {
  return json{{"tool", "hyperfit"},
              {"version", tool_version()},
              {"command", command},
              {"args", args},
              {"config", std::move(config)},
              {"artifacts", std::move(artifacts)}};
}

// ---- generate ---------------------------------------------------------------

struct GenerateOptions {
  int dim = 2;
  int m = 0;
  int n = 0;
  double delta = 0.0;
  double box = 10.0;
  std::optional<double> min_sep;
  std::uint64_t seed = 0;
  std::string out;
  bool json = false;
};

int cmd_generate(const GenerateOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  InstanceSpec spec;
  spec.dim = o.dim;
  spec.num_hyperplanes = o.m;
  spec.total_points = o.n;
  spec.noise = o.delta;
  spec.box_side = o.box;
  spec.min_separation = o.min_sep;
  spec.seed = o.seed;
  spec.validate();

  const Instance inst = generate_instance(spec);
  const fs::path dir(o.out);
  save_instance(dir, inst, spec);

  json config{{"dim", spec.dim},           {"num_hyperplanes", spec.num_hyperplanes},
              {"total_points", spec.total_points}, {"noise", spec.noise},
              {"box_side", spec.box_side}, {"min_separation", spec.separation()},
              {"seed", spec.seed}};
  json artifacts{{"points", InstanceFiles::points},
                 {"truth", InstanceFiles::truth},
                 {"labels", InstanceFiles::labels},
                 {"meta", InstanceFiles::meta}};
  write_text(dir / "manifest.json", manifest("generate", args, config, artifacts).dump(2) + "\n");

  if (o.json) {
    out << json{{"dir", dir.string()}, {"points", inst.points.rows()}, {"hyperplanes", inst.truth.hyperplanes.size()}}.dump()
        << '\n';
  } else {
    out << "wrote " << inst.points.rows() << " points from " << inst.truth.hyperplanes.size() << " hyperplanes to "
        << dir.string() << '\n';
  }
  return kExitOk;
}

// ---- fit --------------------------------------------------------------------

struct FitOptions {
  std::string points;
  std::string out;
  bool header = false;
  std::string meta;
  std::string init = "density";
  std::string mode = "full";
  std::string kernel = "inv2";
  std::optional<double> window;
  std::optional<int> budget;
  std::string select = "none";
  std::optional<int> m;
  int m_max = 6;
  int restarts = 10;
  std::optional<double> outlier_threshold;
  double epsilon = 1e-8;
  double tol = 1e-4;
  std::uint64_t seed = 0;
  std::optional<int> threads;
  std::optional<int> thres;
  std::optional<int> min_points;
  bool weights = false;
  bool json = false;
};

std::optional<InstanceSpec> find_meta(const FitOptions& o) {
  if (!o.meta.empty()) return load_instance_meta(o.meta);
  const fs::path sidecar = fs::path(o.points).parent_path() / InstanceFiles::meta;
  if (fs::exists(sidecar)) return load_instance_meta(sidecar);
  return std::nullopt;
}

void write_assignment(const fs::path& path, const FitResult& r) {
  std::ostringstream s;
  s << "hyperplane,residual\n";
  for (std::size_t i = 0; i < r.assignment.size(); ++i) s << r.assignment[i] << ',' << format_real(r.residuals[i]) << '\n';
  write_text(path, s.str());
}

void write_weights(const fs::path& path, const WeightMatrix& w) {
  std::ostringstream s;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) s << (j ? "," : "") << format_real(w(i, j));
    s << '\n';
  }
  write_text(path, s.str());
}

int cmd_fit(const FitOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  const PointSet points = load_points(o.points, o.header);
  if (points.rows() == 0) throw ConfigError("no points in " + o.points);
  const auto dim = static_cast<int>(points.cols());
  const InitMethod init_method = parse_init_method(o.init);
  if (o.select != "none" && o.select != "bic") throw ConfigError("--select must be none or bic");
  const bool bic = o.select == "bic";

  FitConfig cfg;
  cfg.kernel = parse_kernel(o.kernel);
  cfg.mode = parse_fit_mode(o.mode);
  cfg.epsilon = o.epsilon;
  cfg.em_tol = o.tol;
  cfg.outlier_threshold = o.outlier_threshold;
  cfg.threads = resolve_thread_flag(o.threads);
  cfg.validate();

  SamplingPlan plan = SamplingPlan::for_dim(dim);
  if (o.budget) plan.budget = *o.budget;
  WindowConfig wc;
  wc.thres = o.thres;
  wc.min_points = o.min_points;

  json config{{"init", o.init},       {"mode", o.mode},       {"kernel", o.kernel},    {"select", o.select},
              {"epsilon", o.epsilon}, {"em_tol", o.tol},      {"seed", o.seed},        {"threads", cfg.threads},
              {"budget", plan.budget}, {"scheme", to_string(plan.scheme)}, {"header", o.header}};
  if (o.outlier_threshold) config["outlier_threshold"] = *o.outlier_threshold;
  if (o.m) config["m"] = *o.m;
  if (o.thres) config["thres"] = *o.thres;
  if (o.min_points) config["min_points"] = *o.min_points;

  json diag;
  FitResult result;
  if (bic) {
    if (o.m) throw ConfigError("--m fixes the order; use --m-max with --select bic");
    config["m_max"] = o.m_max;
    config["restarts"] = o.restarts;
    SweepResult sweep = sweep_model_order(points, o.m_max, cfg, o.restarts, o.seed);
    json table = json::array();
    for (const OrderCandidate& c : sweep.per_m) {
      table.push_back({{"m", c.m}, {"total_cost", c.total_cost}, {"bic", c.bic}, {"hyperplanes", c.hyperplanes},
                       {"best_restart", c.best_restart}});
    }
    diag["selection"] = {{"chosen_m", sweep.chosen_m}, {"candidates", table}};
    result = std::move(sweep.chosen_fit);
  } else {
    std::vector<Hyperplane> init;
    if (init_method == InitMethod::density) {
      if (o.window) {
        wc.width = *o.window;
      } else if (const auto meta = find_meta(o)) {
        wc.width = 2.0 * meta->noise;
      } else {
        throw ConfigError("--window is required when no instance.meta gives the noise level");
      }
      config["window"] = wc.width;
      init = initial_hyperplanes(points, plan, wc, cfg.threads);
      if (o.m) {
        if (static_cast<int>(init.size()) < *o.m) {
          throw NumericalError("density initialisation found " + std::to_string(init.size()) +
                               " hyperplanes, fewer than --m " + std::to_string(*o.m));
        }
        init.resize(static_cast<std::size_t>(*o.m));
      }
      if (init.empty()) throw NumericalError("density initialisation found no hyperplane");
    } else {
      if (!o.m) throw ConfigError("--init random needs --m");
      Rng rng(derive_seed(o.seed, 0));
      init = random_hyperplanes(points, *o.m, rng);
    }
    diag["initial_hyperplanes"] = init.size();
    result = fit(points, init, cfg);
  }

  std::size_t outliers = 0;
  for (int a : result.assignment) outliers += a == kOutlier;
  double cost = 0.0;
  for (double r : result.residuals) cost += r;
  diag["hn"] = result.hyperplanes.size();
  diag["total_cost"] = cost;
  diag["outliers"] = outliers;
  diag["em_iterations"] = result.em_iterations;
  diag["em_converged"] = result.em_converged;
  diag["dropped_clusters"] = result.dropped_clusters;
  diag["origin_shifted"] = result.origin_shifted;

  const fs::path dir(o.out);
  ensure_dir(dir);
  save_hyperplanes(dir / "hyperplanes.jsonl", result.hyperplanes);
  write_assignment(dir / "assignment.csv", result);
  write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
  json artifacts{{"hyperplanes", "hyperplanes.jsonl"}, {"assignment", "assignment.csv"}, {"diagnostics", "diagnostics.json"}};
  if (o.weights) {
    write_weights(dir / "weights.csv", result.weights);
    artifacts["weights"] = "weights.csv";
  }
  config["points"] = o.points;
  write_text(dir / "manifest.json", manifest("fit", args, config, artifacts).dump(2) + "\n");

  if (o.json) {
    json summary = diag;
    summary["hyperplanes"] = json::array();
    for (const Hyperplane& h : result.hyperplanes) summary["hyperplanes"].push_back(hyperplane_json(h));
    out << summary.dump() << '\n';
  } else {
    out << "hn=" << result.hyperplanes.size() << " tc=" << format_real(cost) << " -> " << dir.string() << '\n';
  }
  return kExitOk;
}

// ---- eval -------------------------------------------------------------------

struct EvalOptions {
  std::string result;
  std::string truth;
  std::string points;
  bool header = false;
  std::string out;
  bool json = false;
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  const fs::path result_path = fs::is_directory(o.result) ? fs::path(o.result) / "hyperplanes.jsonl" : fs::path(o.result);
  const fs::path truth_path = fs::is_directory(o.truth) ? fs::path(o.truth) / InstanceFiles::truth : fs::path(o.truth);
  fs::path points_path = o.points;
  if (points_path.empty()) {
    points_path = truth_path.parent_path() / InstanceFiles::points;
    if (!fs::exists(points_path)) throw ConfigError("--points is required (no points.csv next to the ground truth)");
  }

  const std::vector<Hyperplane> estimated = load_hyperplanes(result_path);
  GroundTruth truth;
  truth.hyperplanes = load_hyperplanes(truth_path);
  const PointSet points = load_points(points_path, o.header);
  const MetricsRecord rec = evaluate(estimated, truth, points);

  std::string text;
  if (o.json) {
    text = json{{"hn", rec.hn}, {"tc", rec.tc}, {"tc_per_point", rec.tc_per_point}, {"he", rec.he}}.dump() + "\n";
  } else {
    text = "hn,tc,tc_per_point,he\n" + std::to_string(rec.hn) + "," + format_real(rec.tc) + "," +
           format_real(rec.tc_per_point) + "," + format_real(rec.he) + "\n";
  }
  if (o.out.empty()) {
    out << text;
  } else {
    write_text(o.out, text);
  }
  return kExitOk;
}

// ---- bench ------------------------------------------------------------------

struct BenchOptions {
  std::string suite;
  std::string m;
  std::string points;
  std::string w;
  std::string kernel;
  std::string init;
  std::string mode;
  std::optional<double> delta;
  std::optional<int> dim;
  std::optional<int> instances;
  std::optional<int> trials;
  std::optional<int> budget;
  std::uint64_t seed = 0;
  std::optional<int> threads;
  std::string out;
  bool json = false;
  bool timing = false;
};

template <typename T, typename Parse>
std::vector<T> parse_names(std::string_view text, Parse parse) {
  std::vector<T> out;
  for_each_item(text, [&](std::string_view item) { out.push_back(parse(item)); });
  return out;
}

int cmd_bench(const BenchOptions& o, const std::vector<std::string>& args, std::ostream& out) {
  SuiteConfig cfg = default_suite(parse_suite(o.suite));
  if (!o.m.empty()) cfg.hyperplane_counts = parse_int_list(o.m);
  if (!o.points.empty()) cfg.point_counts = parse_int_list(o.points);
  if (!o.w.empty()) cfg.windows = parse_real_list(o.w);
  if (!o.kernel.empty()) cfg.kernels = parse_names<Kernel>(o.kernel, parse_kernel);
  if (!o.init.empty()) cfg.inits = parse_names<InitMethod>(o.init, parse_init_method);
  if (!o.mode.empty()) cfg.modes = parse_names<FitMode>(o.mode, parse_fit_mode);
  if (o.delta) cfg.noise = *o.delta;
  if (o.dim) cfg.dim = *o.dim;
  if (o.instances) cfg.instances = *o.instances;
  if (o.trials) cfg.trials = *o.trials;
  cfg.budget = o.budget;
  cfg.seed = o.seed;
  cfg.threads = resolve_thread_flag(o.threads);
  cfg.timing = o.timing;

  const std::vector<BenchRow> rows = run_suite(cfg);
  std::string text;
  if (o.json) {
    text = to_json(cfg, rows) + "\n";
  } else {
    std::ostringstream s;
    write_csv(s, cfg, rows);
    text = s.str();
  }
  if (o.out.empty()) {
    out << text;
    return kExitOk;
  }
  const fs::path path(o.out);
  if (path.has_parent_path()) ensure_dir(path.parent_path());
  write_text(path, text);
  json config{{"suite", to_string(cfg.suite)}, {"dim", cfg.dim},           {"noise", cfg.noise},
              {"box_side", cfg.box_side},      {"m", cfg.hyperplane_counts}, {"points", cfg.point_counts},
              {"windows", cfg.windows},        {"instances", cfg.instances}, {"trials", cfg.trials},
              {"seed", cfg.seed},              {"threads", cfg.threads}};
  for (Kernel k : cfg.kernels) config["kernels"].push_back(to_string(k));
  for (InitMethod i : cfg.inits) config["inits"].push_back(to_string(i));
  for (FitMode m : cfg.modes) config["modes"].push_back(to_string(m));
  if (cfg.budget) config["budget"] = *cfg.budget;
  fs::path manifest_path = path;
  manifest_path.replace_extension(".manifest.json");
  write_text(manifest_path, manifest("bench", args, config, json{{"table", path.filename().string()}}).dump(2) + "\n");
  return kExitOk;
}

}  // namespace

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for_each_item(text, [&](std::string_view item) {
    const auto dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parse_number<int>(item, "integer"));
      return;
    }
    const int lo = parse_number<int>(item.substr(0, dots), "range start");
    const int hi = parse_number<int>(item.substr(dots + 2), "range end");
    if (hi < lo) throw ConfigError("empty range '" + std::string(item) + "'");
    for (int v = lo; v <= hi; ++v) out.push_back(v);
  });
  return out;
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for_each_item(text, [&](std::string_view item) { out.push_back(parse_number<double>(item, "number")); });
  return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit an unknown number of hyperplanes to noisy points.", "hyperfit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(tool_version()));

  GenerateOptions gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic instance (points, ground truth, sidecar)");
  g->add_option("--dim", gen.dim, "Ambient dimension")->capture_default_str();
  g->add_option("--m", gen.m, "Number of hyperplanes")->required();
  g->add_option("--n", gen.n, "Total number of points")->required();
  g->add_option("--delta", gen.delta, "Noise half-width")->required();
  g->add_option("--box", gen.box, "Side of the sampling box")->capture_default_str();
  g->add_option("--min-sep", gen.min_sep, "Minimum hbar separation (default 6 delta)");
  g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  g->add_option("--out", gen.out, "Output directory")->required();
  g->add_flag("--json", gen.json, "Print a JSON summary");

  FitOptions fo;
  auto* f = app.add_subcommand("fit", "Fit hyperplanes to a point CSV");
  f->add_option("points", fo.points, "Point CSV")->required();
  f->add_option("--out", fo.out, "Output directory")->required();
  f->add_flag("--header", fo.header, "The point CSV has a header row");
  f->add_option("--meta", fo.meta, "Instance sidecar giving the noise level (default: next to the points)");
  f->add_option("--init", fo.init, "density|random")->capture_default_str();
  f->add_option("--mode", fo.mode, "soft|hard|full")->capture_default_str();
  f->add_option("--kernel", fo.kernel, "inv|inv2|gauss")->capture_default_str();
  f->add_option("--window", fo.window, "Window width W (default 2 delta from the sidecar)");
  f->add_option("--budget", fo.budget, "Number of sampled normals");
  f->add_option("--select", fo.select, "none|bic")->capture_default_str();
  f->add_option("--m", fo.m, "Fixed number of hyperplanes");
  f->add_option("--m-max", fo.m_max, "Largest order tried by --select bic")->capture_default_str();
  f->add_option("--restarts", fo.restarts, "Random restarts per order for --select bic")->capture_default_str();
  f->add_option("--outlier-threshold", fo.outlier_threshold, "Exclude points farther than this from Phase II");
  f->add_option("--epsilon", fo.epsilon, "Kernel regulariser")->capture_default_str();
  f->add_option("--tol", fo.tol, "Phase I weight-change tolerance")->capture_default_str();
  f->add_option("--seed", fo.seed, "Seed for random initialisation")->capture_default_str();
  f->add_option("--threads", fo.threads, std::string("Worker threads (default $") + kThreadsEnv + " or 1)");
  f->add_option("--thres", fo.thres, "Stop initialisation at this many remaining points");
  f->add_option("--min-points", fo.min_points, "Smallest accepted window count");
  f->add_flag("--weights", fo.weights, "Also write the Phase I weights");
  f->add_flag("--json", fo.json, "Print a JSON summary");

  EvalOptions eo;
  auto* e = app.add_subcommand("eval", "Score fitted hyperplanes against ground truth");
  e->add_option("result", eo.result, "Fit output directory or hyperplanes file")->required();
  e->add_option("truth", eo.truth, "Instance directory or truth file")->required();
  e->add_option("--points", eo.points, "Point CSV (default: next to the truth file)");
  e->add_flag("--header", eo.header, "The point CSV has a header row");
  e->add_option("--out", eo.out, "Write the metrics CSV here instead of stdout");
  e->add_flag("--json", eo.json, "JSON instead of CSV");

  BenchOptions bo;
  auto* b = app.add_subcommand("bench", "Run a seeded experiment suite");
  b->add_option("--suite", bo.suite, "ablation|scaling|window|kernel")->required();
  b->add_option("--m", bo.m, "Hyperplane counts, e.g. 2..5");
  b->add_option("--points", bo.points, "Point counts, e.g. 600,1200");
  b->add_option("--w", bo.w, "Window widths, e.g. 0.1,0.2");
  b->add_option("--kernel", bo.kernel, "Kernels, e.g. inv,inv2");
  b->add_option("--init", bo.init, "Initialisations, e.g. density,random");
  b->add_option("--mode", bo.mode, "Modes, e.g. soft,hard,full");
  b->add_option("--delta", bo.delta, "Noise half-width");
  b->add_option("--dim", bo.dim, "Ambient dimension");
  b->add_option("--instances", bo.instances, "Instances per cell");
  b->add_option("--trials", bo.trials, "Trials per instance");
  b->add_option("--budget", bo.budget, "Number of sampled normals");
  b->add_option("--seed", bo.seed, "Base seed")->capture_default_str();
  b->add_option("--threads", bo.threads, std::string("Worker threads (default $") + kThreadsEnv + " or 1)");
  b->add_option("--out", bo.out, "CSV path (default stdout); a manifest is written next to it");
  b->add_flag("--json", bo.json, "JSON instead of CSV");
  b->add_flag("--timing", bo.timing, "Add mean wall-clock seconds per run");

  std::vector<const char*> argv{"hyperfit"};
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, args, out);
    if (f->parsed()) return cmd_fit(fo, args, out);
    if (e->parsed()) return cmd_eval(eo, out);
    if (b->parsed()) return cmd_bench(bo, args, out);
  } catch (const ConfigError& ex) {
    err << "hyperfit: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& ex) {
    err << "hyperfit: " << ex.what() << '\n';
    return kExitNumerical;
  } catch (const Error& ex) {
    // IoError, ParseError, DimensionError: the inputs on disk are unusable
    err << "hyperfit: " << ex.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& ex) {
    err << "hyperfit: " << ex.what() << '\n';
    return kExitIo;
  } catch (const std::exception& ex) {
    err << "hyperfit: " << ex.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hyperfit::cli
