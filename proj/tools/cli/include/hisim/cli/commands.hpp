#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hisim/cli/table.hpp"
#include "hisim/fault.hpp"
#include "hisim/latency.hpp"

namespace hisim::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kConfigError = 2 };

inline constexpr std::uint64_t kDefaultSeed = 42;

struct RunConfig {
  std::string subcommand;

  std::filesystem::path trace;
  std::filesystem::path series;
  std::filesystem::path profile;
  std::optional<std::string> trace_format;   // jsonl | csv, default from extension
  std::optional<std::string> series_format;  // csv | int16, default from extension

  double beta = 0.5;
  std::vector<double> beta_grid;  // compare; empty means 0.0..0.9 step 0.1
  std::optional<double> theta;    // simulate: skip the threshold search
  std::vector<std::string> policies;
  std::optional<double> budget_ms;  // OMA; default is the HI makespan at the same beta
  std::optional<double> e_local_mj;
  std::optional<double> e_tx_mj;

  ModelConfig model;
  DetectorConfig detector;
  double sample_rate_hz = 48000.0;
  std::size_t sensors = 1;
  std::size_t bytes_per_sample = 2;

  double input_mb = 0.003;
  std::optional<double> remote_only_ms;  // default: model.timing.t_offload_ms

  double bin_width = 0.05;

  std::uint64_t seed = kDefaultSeed;
  OutputFormat format = OutputFormat::csv;
  std::optional<std::filesystem::path> out;
  std::optional<std::filesystem::path> hist_out;
};

std::vector<double> default_beta_grid();
// "0,0.5,0.9" or "start:stop:step".
std::vector<double> parse_beta_grid(const std::string& text);

std::vector<Table> cmd_simulate(const RunConfig& config);
// Returns {candidates, histogram}.
std::vector<Table> cmd_sweep_theta(const RunConfig& config);
std::vector<Table> cmd_compare(const RunConfig& config);
// Returns {windows, summary}.
std::vector<Table> cmd_fault(const RunConfig& config);
// Returns {splits, summary}.
std::vector<Table> cmd_partition(const RunConfig& config);

/// Full command-line entry point; `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hisim::cli
