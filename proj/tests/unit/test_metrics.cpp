#include <hyperfit/hyperfit.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <atomic>
#include <limits>
#include <numeric>
#include <vector>

using namespace hyperfit;

namespace {

Hyperplane plane(double nx, double ny, double d) {
  Vector n(2);
  n << nx, ny;
  return canonicalize(Hyperplane{n, d});
}

PointSet random_points(int n, int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  PointSet p(n, dim);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < dim; ++k) p(i, k) = u(rng);
  }
  return p;
}

std::vector<Hyperplane> random_planes(int m, int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 5.0);
  std::vector<Hyperplane> out;
  for (int j = 0; j < m; ++j) out.push_back(Hyperplane{random_unit_vector(dim, rng), u(rng)});
  return out;
}

}  // namespace

TEST(TotalCost, ZeroOnPlanes) {
  PointSet p(3, 2);
  p << 1, 5, 1, -2, 4, 3;
  EXPECT_EQ(total_cost(p, {plane(1, 0, 1), plane(0, 1, 3)}), 0.0);
}

TEST(TotalCost, SinglePointAtDistanceTwo) {
  PointSet p(1, 2);
  p << 3, 0;
  EXPECT_DOUBLE_EQ(total_cost(p, {plane(1, 0, 1)}), 2.0);
}

TEST(TotalCost, FivePointsTwoPlanesBruteForce) {
  PointSet p(5, 2);
  p << 0, 0, 1, 2, -3, 1, 2, -2, 4, 4;
  const std::vector<Hyperplane> hs{plane(1, 0, 1), plane(0.6, 0.8, 2)};
  double oracle = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double d0 = std::abs(p(i, 0) - 1.0);
    const double d1 = std::abs(0.6 * p(i, 0) + 0.8 * p(i, 1) - 2.0);
    oracle += std::min(d0, d1);
  }
  EXPECT_NEAR(total_cost(p, hs), oracle, 1e-12);
  EXPECT_NEAR(oracle, 1.0 + 0.0 + 3.0 + 1.0 + 3.0, 1e-12);
}

TEST(TotalCost, EmptyListThrows) {
  PointSet p(1, 2);
  p << 0, 0;
  EXPECT_THROW(total_cost(p, {}), ConfigError);
}

TEST(HyperplaneError, ExactMatchIsZero) {
  const std::vector<Hyperplane> gt{plane(1, 0, 2), plane(0, 1, 3)};
  EXPECT_EQ(hyperplane_error(gt, gt), 0.0);
}

TEST(HyperplaneError, DuplicateAddsNothing) {
  const std::vector<Hyperplane> gt{plane(1, 0, 2), plane(0, 1, 3)};
  std::vector<Hyperplane> est = gt;
  est.push_back(gt[1]);
  EXPECT_EQ(hyperplane_error(est, gt), 0.0);
}

TEST(HyperplaneError, TwoByTwoByHand) {
  // hbar: gt (2,0) and (0,3); est (2,1) and (0,2.5).
  const std::vector<Hyperplane> gt{plane(1, 0, 2), plane(0, 1, 3)};
  const std::vector<Hyperplane> est{plane(2, 1, std::sqrt(5.0) * std::sqrt(5.0)), plane(0, 1, 2.5)};
  EXPECT_NEAR(hyperplane_error(est, gt), 1.0 + 0.5, 1e-12);
}

TEST(HyperplaneError, EmptyTruthThrows) { EXPECT_THROW(hyperplane_error({plane(1, 0, 1)}, {}), ConfigError); }

TEST(Evaluate, PerfectNoiselessFit) {
  PointSet p(6, 2);
  p << 1, 0, 1, 4, 1, -3, 0, 3, 5, 3, -2, 3;
  GroundTruth gt{{plane(1, 0, 1), plane(0, 1, 3)}, {0, 0, 0, 1, 1, 1}};
  const MetricsRecord r = evaluate(gt.hyperplanes, gt, p, 0.25);
  EXPECT_EQ(r.hn, 2);
  EXPECT_EQ(r.tc, 0.0);
  EXPECT_EQ(r.he, 0.0);
  EXPECT_EQ(r.runtime_seconds, 0.25);
}

TEST(Evaluate, OverSplitTradesCostForError) {
  InstanceSpec spec;
  spec.num_hyperplanes = 2;
  spec.seed = 91;
  const Instance inst = generate_instance(spec);
  const MetricsRecord exact = evaluate(inst.truth.hyperplanes, inst.truth, inst.points);
  // Split the first hyperplane into two parallel copies at +-delta/2.
  std::vector<Hyperplane> split{inst.truth.hyperplanes[1]};
  const Hyperplane& h = inst.truth.hyperplanes[0];
  split.push_back(canonicalize(Hyperplane{h.normal, h.offset + 0.05}));
  split.push_back(canonicalize(Hyperplane{h.normal, h.offset - 0.05}));
  const MetricsRecord over = evaluate(split, inst.truth, inst.points);
  EXPECT_EQ(over.hn, 3);
  EXPECT_LT(over.tc, exact.tc);
  EXPECT_GT(over.he, exact.he);
  EXPECT_DOUBLE_EQ(over.tc_per_point, over.tc / 120.0);
}

// ---- properties ---------------------------------------------------------------

TEST(MetricsProperty, CostPermutationInvariantAndMonotone) {
  Rng rng(derive_seed(92, 0));
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 2 + trial % 3;
    const PointSet p = random_points(20, dim, rng);
    auto hs = random_planes(1 + trial % 5, dim, rng);
    const double base = total_cost(p, hs);
    std::vector<Hyperplane> rev(hs.rbegin(), hs.rend());
    EXPECT_EQ(total_cost(p, rev), base);
    const auto extra = random_planes(1, dim, rng);
    hs.push_back(extra[0]);
    EXPECT_LE(total_cost(p, hs), base);
  }
}

TEST(MetricsProperty, ErrorIsSumOfFixedTerms) {
  Rng rng(derive_seed(93, 0));
  for (int trial = 0; trial < 300; ++trial) {
    const int dim = 2 + trial % 3;
    const auto gt = random_planes(3, dim, rng);
    auto est = random_planes(2, dim, rng);
    const double before = hyperplane_error(est, gt);
    const auto extra = random_planes(1, dim, rng);
    const double added = hyperplane_error(extra, gt);
    est.push_back(extra[0]);
    EXPECT_NEAR(hyperplane_error(est, gt), before + added, 1e-12);
    EXPECT_EQ(hyperplane_error({gt[trial % 3]}, gt), 0.0);
  }
}

TEST(Parallel, EveryIndexOnceAndExceptionsPropagate) {
  for (int threads : {1, 3, 8, 0}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i].fetch_add(1); });
    for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
    EXPECT_THROW(parallel_for(50, threads,
                              [](std::size_t i) {
                                if (i == 17) throw NumericalError("boom");
                              }),
                 NumericalError);
  }
  EXPECT_GE(resolve_threads(0), 1);
  EXPECT_EQ(resolve_threads(5), 5);
}

TEST(Random, DerivedSeedsAreStableAndDistinct) {
  EXPECT_EQ(derive_seed(1, 2), derive_seed(1, 2));
  EXPECT_NE(derive_seed(1, 2), derive_seed(1, 3));
  EXPECT_NE(derive_seed(1, 2), derive_seed(2, 2));
  Rng rng(derive_seed(94, 0));
  Vector mean = Vector::Zero(3);
  for (int k = 0; k < 20000; ++k) {
    const Vector v = random_unit_vector(3, rng);
    ASSERT_NEAR(v.norm(), 1.0, 1e-12);
    mean += v;
  }
  EXPECT_LT((mean / 20000.0).norm(), 0.03);
}
