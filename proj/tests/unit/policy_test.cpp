#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "hisim/error.hpp"
#include "hisim/policy.hpp"
#include "test_support.hpp"

namespace hisim {
namespace {

using testing::cifar;
using testing::dogs;
using testing::sample;

TEST(Params, Ranges) {
  EXPECT_NO_THROW(CostParams(0.0));
  EXPECT_THROW(CostParams(1.0), ConfigError);
  EXPECT_THROW(CostParams(-0.1), ConfigError);
  EXPECT_NO_THROW(ThresholdPolicy(0.0));
  EXPECT_THROW(ThresholdPolicy(1.0), ConfigError);
}

TEST(Decide, Examples) {
  ThresholdPolicy star(0.607);
  EXPECT_EQ(decide(sample(0, 0.3, true), star), Decision::offload);
  EXPECT_EQ(decide(sample(0, 0.607, true), star), Decision::accept);
  for (double p : {0.0, 0.2, 1.0}) EXPECT_EQ(decide(sample(0, p, false), ThresholdPolicy(0.0)), Decision::accept);
}

TEST(SampleCost, Examples) {
  CostParams half(0.5);
  ThresholdPolicy theta(0.6);
  EXPECT_DOUBLE_EQ(sample_cost(sample(0, 0.1, false, true), theta, half), 0.5);
  EXPECT_DOUBLE_EQ(sample_cost(sample(0, 0.9, false, true), theta, half), 1.0);
  EXPECT_DOUBLE_EQ(sample_cost(sample(0, 0.1, true, false), theta, half), 1.5);
  EXPECT_DOUBLE_EQ(sample_cost(sample(0, 0.9, true, false), theta, half), 0.0);
}

TEST(EvaluatePolicy, CifarAtPublishedThreshold) {
  auto o = evaluate_policy(cifar(), ThresholdPolicy(0.607), CostParams(0.5));
  EXPECT_EQ(o.offloaded_count, 3550u);
  EXPECT_EQ(o.local_errors, 1577u);
  EXPECT_EQ(o.remote_errors, 71u);
  EXPECT_EQ(o.cost_beta_coefficient(), 3550u);
  EXPECT_EQ(o.cost_constant(), 1648u);
  EXPECT_EQ(o.accuracy(), 1.0 - 1648.0 / 10000.0);
  EXPECT_EQ(o.total_cost(), 3423.0);
}

TEST(EvaluatePolicy, CifarExtremes) {
  auto none = evaluate_policy(cifar(), ThresholdPolicy(0.0), CostParams(0.5));
  EXPECT_EQ(none.offloaded_count, 0u);
  EXPECT_EQ(none.cost_constant(), 3742u);
  EXPECT_NEAR(none.accuracy(), 0.6258, 1e-12);

  auto all = evaluate_policy(cifar(), ThresholdPolicy(std::nextafter(1.0, 0.0)), CostParams(0.5));
  EXPECT_EQ(all.offloaded_count, 10000u);
  EXPECT_EQ(all.cost_constant(), 500u);
  EXPECT_NEAR(all.accuracy(), 0.95, 1e-12);
}

TEST(EvaluatePolicy, RejectsBinaryTrace) {
  EXPECT_THROW(evaluate_policy(dogs(), ThresholdPolicy(0.5), CostParams(0.5)), KindMismatch);
  EXPECT_THROW(optimal_threshold(dogs(), CostParams(0.5)), KindMismatch);
}

TEST(OptimalThreshold, PerfectLocalModel) {
  auto t = Trace::multiclass({sample(0, 1.0, true), sample(1, 1.0, true), sample(2, 1.0, true)});
  auto r = optimal_threshold(t, CostParams(0.5));
  EXPECT_EQ(r.policy.theta(), 0.0);
  EXPECT_EQ(r.total_cost, 0.0);
}

TEST(OptimalThreshold, TwoSamples) {
  // Hand enumeration of the four assignments (A: p=.9 right, B: p=.1 wrong):
  // accept both = 1, offload B = 0.5, offload both = 1.0, offload A only is
  // not a threshold partition. Minimum 0.5 for theta in (0.1, 0.9].
  auto t = Trace::multiclass({sample(0, 0.9, true), sample(1, 0.1, false, true)});
  auto r = optimal_threshold(t, CostParams(0.5));
  EXPECT_GT(r.policy.theta(), 0.1);
  EXPECT_LE(r.policy.theta(), 0.9);
  EXPECT_EQ(r.total_cost, 0.5);
}

TEST(OptimalThreshold, Cifar) {
  auto r = optimal_threshold(cifar(), CostParams(0.5));
  EXPECT_EQ(r.outcome.offloaded_count, 3550u);
  EXPECT_EQ(r.outcome.cost_constant(), 1648u);
  EXPECT_NEAR(r.policy.theta(), 0.607, 1e-4);
}

TEST(OptimalThreshold, EmptyTrace) {
  EXPECT_THROW(optimal_threshold(Trace::multiclass({}), CostParams(0.5)), InputError);
}

TEST(ThresholdCandidates, IncludesAllOffloadPartition) {
  auto t = Trace::multiclass({sample(0, 0.4, false), sample(1, 0.4, false), sample(2, 0.8, false)});
  auto c = threshold_candidates(t, CostParams(0.1));
  std::vector<double> thetas;
  for (const auto& x : c) thetas.push_back(x.theta);
  std::vector<double> expected{0.0, 0.4, 0.6, 0.8, 0.9};
  ASSERT_EQ(thetas.size(), expected.size());
  for (std::size_t i = 0; i < thetas.size(); ++i) EXPECT_NEAR(thetas[i], expected[i], 1e-12);
  EXPECT_EQ(c.back().outcome.offloaded_count, 3u);
  // Optimal: offload everything, each sample fixed remotely for 0.1.
  auto r = optimal_threshold(t, CostParams(0.1));
  EXPECT_EQ(r.outcome.offloaded_count, 3u);
  EXPECT_NEAR(r.policy.theta(), 0.9, 1e-12);
}

TEST(ThresholdCandidates, ConfidenceOneCannotBeOffloaded) {
  auto t = Trace::multiclass({sample(0, 1.0, false)});
  auto c = threshold_candidates(t, CostParams(0.1));
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].outcome.offloaded_count, 0u);
}

TEST(CostReduction, CifarClosedForm) {
  auto hi = evaluate_policy(cifar(), ThresholdPolicy(0.607), CostParams(0.5));
  double expected = (6450 * 0.5 - 1148) / (10000 * 0.5 + 500) * 100;
  EXPECT_NEAR(cost_reduction_vs_full_offload(hi, 10000, 500, 0.5), expected, 1e-9);
  EXPECT_NEAR(expected, 37.763636, 1e-5);

  double equal_beta = 1148.0 / 6450.0;
  EXPECT_NEAR(cost_reduction_vs_full_offload(hi, 10000, 500, equal_beta), 0.0, 1e-9);
  EXPECT_NEAR(cost_reduction_vs_full_offload(hi, 10000, 500, 1.0), 5302.0 / 10500.0 * 100, 1e-9);
  EXPECT_THROW(cost_reduction_percent(0.0, 1.0), InputError);
  EXPECT_THROW(cost_reduction_vs_full_offload(hi, 9999, 500, 0.5), InputError);
}

TEST(Filter, DecideBoundary) {
  EXPECT_EQ(filter_decide({0, 0.5, true}), FilterDecision::offload);
  EXPECT_EQ(filter_decide({0, 0.49, true}), FilterDecision::discard);
  EXPECT_EQ(filter_decide({0, 1.0, false}), FilterDecision::offload);
}

TEST(Filter, DogFixture) {
  auto o = evaluate_filter(dogs(), CostParams(0.5));
  EXPECT_EQ(o.relevant_count, 1000u);
  EXPECT_EQ(o.offloaded_count, 4433u);
  EXPECT_EQ(o.true_positives, 912u);
  EXPECT_EQ(o.false_negatives, 88u);
  EXPECT_EQ(o.false_positives, 3521u);
  EXPECT_EQ(o.cost_beta_coefficient(), 912u);
  EXPECT_EQ(o.cost_constant(), 3521u);
  EXPECT_DOUBLE_EQ(o.accuracy(), 0.912);

  auto full = evaluate_filter_full_offload(dogs(), CostParams(0.5));
  EXPECT_EQ(full.cost_beta_coefficient(), 1000u);
  EXPECT_EQ(full.cost_constant(), 9000u);
  EXPECT_EQ(full.accuracy(), 1.0);
}

TEST(Filter, ZeroRelevantIsVacuous) {
  auto t = Trace::binary({{0, 0.1, false}, {1, 0.3, false}});
  auto o = evaluate_filter(t, CostParams(0.7));
  EXPECT_EQ(o.total_cost(), 0.0);
  EXPECT_EQ(o.accuracy(), 1.0);
  EXPECT_TRUE(o.zero_relevant());
  EXPECT_THROW(evaluate_filter(cifar(), CostParams(0.5)), KindMismatch);
}

TEST(PolicyProperties, MonotoneAndDecomposes) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 200; ++iter) {
    auto t = testing::random_trace(rng, 1 + rng() % 30, iter % 2 == 0);
    CostParams costs(u(rng) * 0.999);
    std::vector<double> thetas;
    for (int k = 0; k < 12; ++k) thetas.push_back(u(rng) * 0.999);
    std::sort(thetas.begin(), thetas.end());
    std::size_t prev = 0;
    for (double th : thetas) {
      auto o = evaluate_policy(t, ThresholdPolicy(th), costs);
      EXPECT_GE(o.offloaded_count, prev);
      prev = o.offloaded_count;
      double summed = 0.0;
      for (const auto& s : t.multiclass_samples()) summed += sample_cost(s, ThresholdPolicy(th), costs);
      EXPECT_NEAR(o.total_cost(), summed, 1e-9);
      EXPECT_NEAR(o.total_cost(), o.offloaded_count * costs.beta() + o.local_errors + o.remote_errors, 1e-9);
    }
  }
}

TEST(PolicyProperties, ExtremesMatchBaselines) {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 100; ++iter) {
    auto t = testing::random_trace(rng, 1 + rng() % 20, false);
    CostParams costs(0.3);
    auto none = evaluate_policy(t, ThresholdPolicy(0.0), costs);
    std::size_t local_errors = 0, remote_errors = 0;
    double max_p = 0.0;
    for (const auto& s : t.multiclass_samples()) {
      local_errors += !s.local_correct();
      remote_errors += !s.remote_correct();
      max_p = std::max(max_p, s.confidence);
    }
    EXPECT_EQ(none.offloaded_count, 0u);
    EXPECT_EQ(none.local_errors, local_errors);
    auto above = std::nextafter(max_p, 1.0);
    if (above < 1.0) {
      auto all = evaluate_policy(t, ThresholdPolicy(above), costs);
      auto full = evaluate_full_offload(t, costs);
      EXPECT_EQ(all.offloaded_count, full.offloaded_count);
      EXPECT_EQ(all.remote_errors, remote_errors);
      EXPECT_EQ(all.total_cost(), full.total_cost());
    }
  }
}

TEST(PolicyProperties, OptimalMatchesBruteForce) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 300; ++iter) {
    auto t = testing::random_trace(rng, 1 + rng() % 12, iter % 3 == 0);
    CostParams costs(u(rng) * 0.999);
    auto r = optimal_threshold(t, costs);
    EXPECT_EQ(r.total_cost, testing::brute_force_min_cost(t, costs.beta())) << "iteration " << iter;
    EXPECT_EQ(evaluate_policy(t, r.policy, costs).total_cost(), r.total_cost);
  }
}

TEST(PolicyProperties, FilterAccuracyIgnoresIrrelevant) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int iter = 0; iter < 100; ++iter) {
    std::vector<BinarySample> samples;
    std::size_t n = 2 + rng() % 50;
    for (std::size_t i = 0; i < n; ++i) samples.push_back({i, u(rng), rng() % 3 == 0});
    auto base = evaluate_filter(Trace::binary(samples), CostParams(0.4));
    for (auto& s : samples) {
      if (!s.is_relevant) s.confidence = u(rng);
    }
    std::shuffle(samples.begin(), samples.end(), rng);
    auto rescored = evaluate_filter(Trace::binary(samples), CostParams(0.4));
    EXPECT_EQ(base.accuracy(), rescored.accuracy());
    EXPECT_EQ(base.true_positives, rescored.true_positives);
  }
}

}  // namespace
}  // namespace hisim
