#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hisim/latency.hpp"
#include "hisim/policy.hpp"
#include "hisim/trace.hpp"

namespace hisim {

/// Aggregate of one policy run over a trace. Cost is
/// `cost_beta_coefficient * beta + cost_constant`.
struct SimulationReport {
  std::string policy_name;
  double beta = 0.0;
  std::optional<double> theta;  // set for threshold policies
  std::size_t sample_count = 0;
  std::size_t offloaded_count = 0;
  std::size_t errors_total = 0;
  std::size_t cost_beta_coefficient = 0;
  std::size_t cost_constant = 0;
  double makespan_ms = 0.0;
  double throughput_jps = 0.0;
  bool budget_feasible = true;  // false when an OMA budget is below the minimal makespan

  double accuracy() const noexcept;
  double total_cost() const noexcept;
};

namespace policy_names {
inline constexpr const char* hi = "hi";
inline constexpr const char* no_offload = "no-offload";
inline constexpr const char* full_offload = "full-offload";
inline constexpr const char* omd = "omd";
inline constexpr const char* oma_random = "oma-random";
inline constexpr const char* oma_worst_case = "oma-worst-case";
inline constexpr const char* dnn_partition = "dnn-partition";
}  // namespace policy_names

SimulationReport hi_report(const Trace& trace, ThresholdPolicy policy, CostParams costs,
                           const TimingParams& timing);
SimulationReport no_offload(const Trace& trace, CostParams costs, const TimingParams& timing);
SimulationReport full_offload(const Trace& trace, CostParams costs, const TimingParams& timing);

/// Offload count minimising the parallel makespan; ties go to fewer offloads.
std::size_t omd_offload_count(std::size_t n_total, const TimingParams& timing);

/// Balances device and server makespans. Samples go to the server in id
/// order, or in a seeded shuffled order when `shuffle_seed` is set.
SimulationReport omd(const Trace& trace, CostParams costs, const TimingParams& timing,
                     std::optional<std::uint64_t> shuffle_seed = std::nullopt);

struct OmaVariant {
  enum class Kind { random, worst_case };
  Kind kind = Kind::random;
  std::uint64_t seed = 0;  // used by Kind::random only

  static OmaVariant random(std::uint64_t seed) { return {Kind::random, seed}; }
  static OmaVariant worst_case() { return {Kind::worst_case, 0}; }
};

struct OmaBudgetFit {
  std::size_t offloaded = 0;
  bool feasible = true;
  double min_makespan_ms = 0.0;  // smallest achievable parallel makespan
};

/// Largest offload count whose server side fits the budget; `feasible` is
/// false when the device side cannot meet the budget at that count.
OmaBudgetFit oma_offload_count(std::size_t n_total, const TimingParams& timing, double budget_ms);

SimulationReport oma(const Trace& trace, CostParams costs, const TimingParams& timing, double budget_ms,
                     OmaVariant variant);

struct LayerProfile {
  std::size_t layer_index = 0;  // 1-based
  double device_ms = 0.0;
  double server_ms = 0.0;
  double output_mb = 0.0;
};

std::vector<LayerProfile> parse_layer_profile(std::istream& in);
std::vector<LayerProfile> load_layer_profile(const std::filesystem::path& path);

struct PartitionCandidate {
  std::size_t split_after_layer = 0;
  TimeInterval latency;
};

/// Split 0 ships the raw input (full offload); split L runs fully on device.
struct PartitionPlan {
  std::size_t split_after_layer = 0;
  TimeInterval latency_interval;
  std::vector<PartitionCandidate> candidates;  // splits 0..L in order
  TimeInterval raw_offload_interval;           // comm(input) + all server layers, for reference
};

/// Per-split latency is device layers up to the split, the split output's
/// transfer interval, then the remaining server layers. Split 0 uses the
/// measured end-to-end offload time. The argmin is by interval midpoint.
PartitionPlan dnn_partition_plan(std::span<const LayerProfile> layers, double input_mb, const BandwidthStats& bw,
                                 double remote_only_ms);

SimulationReport dnn_partition_report(const Trace& trace, CostParams costs, const TimingParams& timing);

/// One report per (beta, policy), beta-major in grid order. HI's threshold is
/// re-searched for every beta and its makespan is the OMA budget.
std::vector<SimulationReport> compare_all(const Trace& trace, const TimingParams& timing,
                                          std::span<const double> beta_grid, std::uint64_t seed);

}  // namespace hisim
