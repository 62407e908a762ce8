#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>

namespace hisim {

struct TimingParams {
  double t_local_ms = 0.99;     // local small-model inference per sample
  double t_offload_ms = 74.34;  // end-to-end transfer plus remote inference per sample

  void validate() const;
};

struct BandwidthStats {
  double mean_mb_per_s = 10.45;
  double sd_mb_per_s = 0.6;
  int n_experiments = 30;

  void validate() const;
};

struct TimeInterval {
  double lo_ms = 0.0;
  double hi_ms = 0.0;

  double midpoint() const noexcept { return lo_ms + (hi_ms - lo_ms) / 2.0; }

  TimeInterval operator+(const TimeInterval& o) const noexcept { return {lo_ms + o.lo_ms, hi_ms + o.hi_ms}; }
  TimeInterval operator+(double ms) const noexcept { return {lo_ms + ms, hi_ms + ms}; }
};

/// Transfer time of `size_mb` over the one-standard-deviation bandwidth band
/// [mean - sd, mean + sd], in milliseconds.
TimeInterval comm_interval(double size_mb, const BandwidthStats& bw);

enum class MakespanMode {
  hi_serial,                // every sample runs locally; offloaded ones also pay t_offload
  pure_partition_parallel,  // device and server work concurrently on disjoint sets
};

double makespan_ms(std::size_t n_total, std::size_t n_offloaded, const TimingParams& timing,
                   MakespanMode mode);
TimeInterval makespan_ms(std::size_t n_total, std::size_t n_offloaded, double t_local_ms,
                         const TimeInterval& t_offload, MakespanMode mode);

double throughput_jps(std::size_t n_total, double makespan_ms);

double energy_estimate_mj(std::size_t n_total, std::size_t n_offloaded, double e_local_mj, double e_tx_mj);

struct ModelConfig {
  TimingParams timing;
  BandwidthStats bandwidth;
};

// `key = value` lines with '#' comments. Keys: t_local_ms, t_offload_ms,
// bw_mean, bw_sd, bw_n. Unknown keys are a ConfigError.
ModelConfig parse_model_config(std::istream& in, ModelConfig base = {});
ModelConfig load_model_config(const std::filesystem::path& path, ModelConfig base = {});

}  // namespace hisim
