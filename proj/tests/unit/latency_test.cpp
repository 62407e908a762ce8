#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hisim/error.hpp"
#include "hisim/latency.hpp"
#include "hisim/schedulers.hpp"

namespace hisim {
namespace {

TEST(CommInterval, MeasuredRows) {
  BandwidthStats bw;
  struct Row {
    double mb, lo, hi;
  };
  // Transfer times printed for the raw image and the seven layer outputs.
  const Row rows[] = {{0.003, 0.28, 0.30},     {3.06, 276.92, 310.65}, {1.64, 148.41, 166.49},
                      {1.13, 102.26, 114.72},  {0.97, 87.78, 98.47},   {1.56, 141.17, 158.37},
                      {1.98, 179.18, 201.0},   {0.53, 47.96, 53.80}};
  for (const auto& r : rows) {
    auto t = comm_interval(r.mb, bw);
    EXPECT_NEAR(t.lo_ms, r.lo, 0.02) << r.mb;
    EXPECT_NEAR(t.hi_ms, r.hi, 0.02) << r.mb;
  }
}

TEST(CommInterval, EdgeCases) {
  auto zero = comm_interval(0.0, BandwidthStats{});
  EXPECT_EQ(zero.lo_ms, 0.0);
  EXPECT_EQ(zero.hi_ms, 0.0);
  EXPECT_THROW(comm_interval(1.0, BandwidthStats{0.5, 0.5, 30}), ConfigError);
  EXPECT_THROW(comm_interval(-1.0, BandwidthStats{}), ConfigError);
}

TEST(CommInterval, Homogeneous) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int i = 0; i < 100; ++i) {
    double mb = u(rng);
    auto a = comm_interval(mb, BandwidthStats{});
    auto b = comm_interval(2 * mb, BandwidthStats{});
    EXPECT_NEAR(b.lo_ms, 2 * a.lo_ms, 1e-9 * b.lo_ms);
    EXPECT_NEAR(b.hi_ms, 2 * a.hi_ms, 1e-9 * b.hi_ms);
  }
}

TEST(Makespan, Examples) {
  TimingParams t;
  EXPECT_NEAR(makespan_ms(10000, 0, t, MakespanMode::hi_serial), 9900.0, 1e-9);
  EXPECT_NEAR(makespan_ms(10000, 10000, t, MakespanMode::pure_partition_parallel), 743400.0, 1e-6);
  EXPECT_NEAR(makespan_ms(10000, 3550, t, MakespanMode::hi_serial), 273807.0, 1e-6);
  EXPECT_THROW(makespan_ms(1, 2, t, MakespanMode::hi_serial), ConfigError);

  auto iv = makespan_ms(10, 2, 1.0, TimeInterval{5.0, 7.0}, MakespanMode::hi_serial);
  EXPECT_DOUBLE_EQ(iv.lo_ms, 20.0);
  EXPECT_DOUBLE_EQ(iv.hi_ms, 24.0);
}

TEST(Makespan, SerialIsAffineInOffloads) {
  TimingParams t{1.3, 40.0};
  for (std::size_t k = 0; k < 100; ++k) {
    double d = makespan_ms(100, k + 1, t, MakespanMode::hi_serial) - makespan_ms(100, k, t, MakespanMode::hi_serial);
    EXPECT_NEAR(d, 40.0, 1e-9);
  }
}

TEST(Makespan, ParallelBalancePointMatchesExhaustive) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 100.0);
  for (int iter = 0; iter < 60; ++iter) {
    std::size_t n = 1 + rng() % 10000;
    TimingParams t{u(rng), u(rng)};
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k <= n; ++k) {
      best = std::min(best, std::max((n - k) * t.t_local_ms, k * t.t_offload_ms));
    }
    auto k = omd_offload_count(n, t);
    EXPECT_EQ(makespan_ms(n, k, t, MakespanMode::pure_partition_parallel), best);
    double local = (n - k) * t.t_local_ms;
    double server = k * t.t_offload_ms;
    EXPECT_LE(std::abs(local - server), std::max(t.t_local_ms, t.t_offload_ms) + 1e-9);
  }
}

TEST(Throughput, Examples) {
  EXPECT_NEAR(throughput_jps(10000, 9900), 1010.1, 0.01);
  EXPECT_NEAR(throughput_jps(10000, 743400), 13.45, 0.01);
  EXPECT_EQ(throughput_jps(1, 1000), 1.0);
  EXPECT_THROW(throughput_jps(1, 0.0), ConfigError);
}

TEST(Energy, Examples) {
  EXPECT_EQ(energy_estimate_mj(10, 0, 2.0, 9.0), 20.0);
  EXPECT_EQ(energy_estimate_mj(10, 10, 0.0, 9.0), 90.0);
  EXPECT_EQ(energy_estimate_mj(10, 4, 1.0, 10.0), 50.0);
  EXPECT_THROW(energy_estimate_mj(10, 4, -1.0, 10.0), ConfigError);
}

TEST(ModelConfig, ParsesKeysAndComments) {
  std::istringstream in(
      "# timings\n"
      "[timing]\n"
      "t_local_ms = 1.5\n"
      "t_offload_ms=80  # measured\n"
      "bw_mean = 12\n"
      "bw_sd = 1\n"
      "bw_n = 10\n");
  auto c = parse_model_config(in);
  EXPECT_EQ(c.timing.t_local_ms, 1.5);
  EXPECT_EQ(c.timing.t_offload_ms, 80.0);
  EXPECT_EQ(c.bandwidth.mean_mb_per_s, 12.0);
  EXPECT_EQ(c.bandwidth.sd_mb_per_s, 1.0);
  EXPECT_EQ(c.bandwidth.n_experiments, 10);
}

TEST(ModelConfig, Errors) {
  std::istringstream unknown("speed = 3\n");
  EXPECT_THROW(parse_model_config(unknown), ConfigError);
  std::istringstream bad("t_local_ms = fast\n");
  EXPECT_THROW(parse_model_config(bad), ConfigError);
  std::istringstream invalid("t_local_ms = 0\n");
  EXPECT_THROW(parse_model_config(invalid), ConfigError);
  std::istringstream noeq("t_local_ms\n");
  EXPECT_THROW(parse_model_config(noeq), ConfigError);
  EXPECT_THROW(load_model_config("/nonexistent.toml"), ConfigError);
}

}  // namespace
}  // namespace hisim
