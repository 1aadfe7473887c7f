#include <hyperfit_cli/bench.hpp>
#include <hyperfit_cli/commands.hpp>

#include <hyperfit/hyperfit.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace hyperfit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("hyperfit_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path generated(const fs::path& root, int m, const std::string& seed) {
  const fs::path dir = root / "inst";
  const Outcome g = run({"generate", "--dim", "2", "--m", std::to_string(m), "--n", "120", "--delta", "0.1", "--seed",
                         seed, "--out", dir.string()});
  EXPECT_EQ(g.code, 0) << g.err;
  return dir;
}

}  // namespace

TEST(CliGenerate, WritesContractFiles) {
  const fs::path root = scratch("gen");
  const fs::path dir = generated(root, 3, "7");
  EXPECT_EQ(load_points(dir / InstanceFiles::points).rows(), 120);
  EXPECT_EQ(load_hyperplanes(dir / InstanceFiles::truth).size(), 3u);
  EXPECT_TRUE(fs::exists(dir / "manifest.json"));
}

TEST(CliGenerate, ByteIdenticalOnRepeat) {
  const fs::path a = generated(scratch("gen_a"), 3, "7");
  const fs::path b = generated(scratch("gen_b"), 3, "7");
  for (const char* f : {InstanceFiles::points, InstanceFiles::truth, InstanceFiles::labels, InstanceFiles::meta}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(CliGenerate, ZeroHyperplanesIsUsageError) {
  const fs::path root = scratch("gen_bad");
  const Outcome r = run({"generate", "--m", "0", "--n", "120", "--delta", "0.1", "--out", (root / "x").string()});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_FALSE(r.err.empty());
}

TEST(CliUsage, UnknownFlagAndHelp) {
  EXPECT_EQ(run({"fit", "--bogus"}).code, cli::kExitUsage);
  EXPECT_EQ(run({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run({}).code, cli::kExitUsage);
}

TEST(CliFit, DensityFullRecoversCount) {
  const fs::path root = scratch("fit");
  for (int m = 2; m <= 4; ++m) {
    const fs::path dir = generated(root, m, std::to_string(100 + m));
    const fs::path res = root / ("res" + std::to_string(m));
    const Outcome f = run({"fit", (dir / InstanceFiles::points).string(), "--init", "density", "--mode", "full",
                           "--window", "0.4", "--out", res.string()});
    ASSERT_EQ(f.code, 0) << f.err;
    EXPECT_EQ(static_cast<int>(load_hyperplanes(res / "hyperplanes.jsonl").size()), m);
    EXPECT_TRUE(fs::exists(res / "assignment.csv"));
    EXPECT_TRUE(fs::exists(res / "diagnostics.json"));
  }
}

TEST(CliFit, WindowDefaultsFromSidecar) {
  const fs::path root = scratch("fit_meta");
  const fs::path dir = generated(root, 3, "9");
  const Outcome f = run({"fit", (dir / InstanceFiles::points).string(), "--out", (root / "r").string()});
  EXPECT_EQ(f.code, 0) << f.err;
  fs::copy_file(dir / InstanceFiles::points, root / "bare.csv");
  const Outcome g = run({"fit", (root / "bare.csv").string(), "--out", (root / "r2").string()});
  EXPECT_EQ(g.code, cli::kExitUsage);
}

TEST(CliFit, SoftAndFullShareWeights) {
  const fs::path root = scratch("fit_soft");
  const fs::path dir = generated(root, 3, "11");
  const std::string pts = (dir / InstanceFiles::points).string();
  ASSERT_EQ(run({"fit", pts, "--mode", "soft", "--window", "0.4", "--weights", "--out", (root / "soft").string()}).code,
            0);
  ASSERT_EQ(run({"fit", pts, "--mode", "full", "--window", "0.4", "--weights", "--out", (root / "full").string()}).code,
            0);
  EXPECT_EQ(slurp(root / "soft" / "weights.csv"), slurp(root / "full" / "weights.csv"));
  EXPECT_NE(slurp(root / "soft" / "hyperplanes.jsonl"), slurp(root / "full" / "hyperplanes.jsonl"));
}

TEST(CliFit, ThreadCountDoesNotChangeOutputs) {
  const fs::path root = scratch("fit_threads");
  const fs::path dir = generated(root, 4, "13");
  const std::string pts = (dir / InstanceFiles::points).string();
  for (const std::string& init : {"density", "random"}) {
    for (const std::string& threads : {"1", "8"}) {
      const Outcome r = run({"fit", pts, "--init", init, "--m", "4", "--window", "0.4", "--threads", threads,
                             "--weights", "--out", (root / (init + threads)).string()});
      ASSERT_EQ(r.code, 0) << r.err;
    }
    for (const char* f : {"hyperplanes.jsonl", "assignment.csv", "diagnostics.json", "weights.csv"}) {
      EXPECT_EQ(slurp(root / (init + "1") / f), slurp(root / (init + "8") / f)) << init << " " << f;
    }
  }
}

TEST(CliFit, BicSelection) {
  const fs::path root = scratch("fit_bic");
  const fs::path dir = generated(root, 2, "15");
  const Outcome r = run({"fit", (dir / InstanceFiles::points).string(), "--select", "bic", "--m-max", "3", "--restarts",
                         "3", "--out", (root / "r").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(slurp(root / "r" / "diagnostics.json").find("selection"), std::string::npos);
  EXPECT_EQ(run({"fit", (dir / InstanceFiles::points).string(), "--select", "bic", "--m", "2", "--out",
                 (root / "r2").string()})
                .code,
            cli::kExitUsage);
}

TEST(CliFit, MissingPointsIsIoError) {
  const fs::path root = scratch("fit_missing");
  EXPECT_EQ(run({"fit", (root / "nope.csv").string(), "--window", "0.4", "--out", (root / "r").string()}).code,
            cli::kExitIo);
}

TEST(CliEval, MatchesLibraryAndExactMatchIsZero) {
  const fs::path root = scratch("eval");
  const fs::path dir = generated(root, 3, "17");
  const fs::path res = root / "res";
  ASSERT_EQ(run({"fit", (dir / InstanceFiles::points).string(), "--window", "0.4", "--out", res.string()}).code, 0);
  const Outcome e = run({"eval", res.string(), dir.string()});
  ASSERT_EQ(e.code, 0) << e.err;

  GroundTruth gt;
  gt.hyperplanes = load_hyperplanes(dir / InstanceFiles::truth);
  const MetricsRecord rec =
      evaluate(load_hyperplanes(res / "hyperplanes.jsonl"), gt, load_points(dir / InstanceFiles::points));
  const std::string expected = "hn,tc,tc_per_point,he\n" + std::to_string(rec.hn) + "," + format_real(rec.tc) + "," +
                               format_real(rec.tc_per_point) + "," + format_real(rec.he) + "\n";
  EXPECT_EQ(e.out, expected);

  const Outcome self = run({"eval", (dir / InstanceFiles::truth).string(), dir.string(), "--json"});
  ASSERT_EQ(self.code, 0);
  EXPECT_NE(self.out.find("\"he\":0.0"), std::string::npos) << self.out;
}

TEST(CliEval, MissingTruthIsIoError) {
  const fs::path root = scratch("eval_missing");
  const fs::path dir = generated(root, 2, "19");
  EXPECT_EQ(run({"eval", (dir / InstanceFiles::truth).string(), (root / "none.jsonl").string(), "--points",
                 (dir / InstanceFiles::points).string()})
                .code,
            cli::kExitIo);
}

TEST(CliBench, SmallAblationTable) {
  const fs::path root = scratch("bench");
  const fs::path csv = root / "t.csv";
  const Outcome b = run({"bench", "--suite", "ablation", "--m", "2..3", "--instances", "2", "--trials", "2", "--mode",
                         "full", "--init", "density", "--threads", "4", "--out", csv.string()});
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string table = slurp(csv);
  EXPECT_EQ(table.rfind("suite,dim,noise,m,points,window,kernel,init,mode,instances,trials,runs,failures,hn,", 0), 0u);
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 3);
  EXPECT_TRUE(fs::exists(root / "t.manifest.json"));
  EXPECT_EQ(run({"bench", "--suite", "nope"}).code, cli::kExitUsage);
}

TEST(CliLists, IntAndRealLists) {
  EXPECT_EQ(cli::parse_int_list("2..5"), (std::vector<int>{2, 3, 4, 5}));
  EXPECT_EQ(cli::parse_int_list("1,3..5"), (std::vector<int>{1, 3, 4, 5}));
  EXPECT_EQ(cli::parse_int_list("7"), (std::vector<int>{7}));
  EXPECT_EQ(cli::parse_real_list("0.1,0.2,0.4"), (std::vector<double>{0.1, 0.2, 0.4}));
  EXPECT_THROW(cli::parse_int_list("5..2"), ConfigError);
  EXPECT_THROW(cli::parse_int_list("a"), ConfigError);
}

TEST(CliBench, SeedsAreIndependentOfThreads) {
  cli::SuiteConfig cfg = cli::default_suite(cli::Suite::ablation);
  cfg.hyperplane_counts = {3};
  cfg.instances = 3;
  cfg.trials = 2;
  cfg.inits = {cli::InitMethod::random};
  cfg.modes = {FitMode::full};
  const auto a = cli::run_suite(cfg);
  cfg.threads = 8;
  const auto b = cli::run_suite(cfg);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].tc, b[k].tc);
    EXPECT_EQ(a[k].he, b[k].he);
    EXPECT_EQ(a[k].hn, b[k].hn);
  }
}
