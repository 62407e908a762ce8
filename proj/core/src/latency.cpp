#include "hisim/latency.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <string>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"

namespace hisim {

void TimingParams::validate() const {
  if (!(t_local_ms > 0.0) || !(t_offload_ms > 0.0)) {
    throw ConfigError("t_local_ms and t_offload_ms must be positive");
  }
}

void BandwidthStats::validate() const {
  if (!(sd_mb_per_s >= 0.0)) {
    throw ConfigError("bandwidth standard deviation must be non-negative");
  }
  if (!(mean_mb_per_s - sd_mb_per_s > 0.0)) {
    throw ConfigError("bandwidth mean must exceed its standard deviation");
  }
  if (n_experiments < 1) {
    throw ConfigError("bandwidth experiment count must be positive");
  }
}

TimeInterval comm_interval(double size_mb, const BandwidthStats& bw) {
  bw.validate();
  if (!(size_mb >= 0.0)) {
    throw ConfigError("transfer size must be non-negative");
  }
  return {size_mb / (bw.mean_mb_per_s + bw.sd_mb_per_s) * 1000.0,
          size_mb / (bw.mean_mb_per_s - bw.sd_mb_per_s) * 1000.0};
}

namespace {

void check_counts(std::size_t n_total, std::size_t n_offloaded) {
  if (n_offloaded > n_total) {
    throw ConfigError("offloaded count exceeds total count");
  }
}

}  // namespace

double makespan_ms(std::size_t n_total, std::size_t n_offloaded, const TimingParams& timing,
                   MakespanMode mode) {
  check_counts(n_total, n_offloaded);
  auto total = static_cast<double>(n_total);
  auto off = static_cast<double>(n_offloaded);
  if (mode == MakespanMode::hi_serial) {
    return total * timing.t_local_ms + off * timing.t_offload_ms;
  }
  return std::max((total - off) * timing.t_local_ms, off * timing.t_offload_ms);
}

TimeInterval makespan_ms(std::size_t n_total, std::size_t n_offloaded, double t_local_ms,
                         const TimeInterval& t_offload, MakespanMode mode) {
  TimingParams lo{t_local_ms, t_offload.lo_ms};
  TimingParams hi{t_local_ms, t_offload.hi_ms};
  return {makespan_ms(n_total, n_offloaded, lo, mode), makespan_ms(n_total, n_offloaded, hi, mode)};
}

double throughput_jps(std::size_t n_total, double makespan) {
  if (!(makespan > 0.0)) {
    throw ConfigError("makespan must be positive to compute throughput");
  }
  return static_cast<double>(n_total) / (makespan / 1000.0);
}

double energy_estimate_mj(std::size_t n_total, std::size_t n_offloaded, double e_local_mj, double e_tx_mj) {
  check_counts(n_total, n_offloaded);
  if (e_local_mj < 0.0 || e_tx_mj < 0.0) {
    throw ConfigError("energies must be non-negative");
  }
  return static_cast<double>(n_total) * e_local_mj + static_cast<double>(n_offloaded) * e_tx_mj;
}

ModelConfig parse_model_config(std::istream& in, ModelConfig base) {
  std::string raw;
  std::size_t line = 0;
  auto trim = [](std::string s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  while (std::getline(in, raw)) {
    ++line;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    auto text = trim(raw);
    if (text.empty() || text.front() == '[') continue;  // table headers are accepted and ignored
    auto eq = text.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line) + ": expected key = value");
    }
    auto key = trim(text.substr(0, eq));
    auto value = trim(text.substr(eq + 1));
    try {
      if (key == "t_local_ms") {
        base.timing.t_local_ms = parse_double(value);
      } else if (key == "t_offload_ms") {
        base.timing.t_offload_ms = parse_double(value);
      } else if (key == "bw_mean") {
        base.bandwidth.mean_mb_per_s = parse_double(value);
      } else if (key == "bw_sd") {
        base.bandwidth.sd_mb_per_s = parse_double(value);
      } else if (key == "bw_n") {
        base.bandwidth.n_experiments = static_cast<int>(parse_integer(value));
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const InputError& e) {
      throw ConfigError("config line " + std::to_string(line) + ": " + e.what());
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line) + ": " + e.what());
    }
  }
  base.timing.validate();
  base.bandwidth.validate();
  return base;
}

ModelConfig load_model_config(const std::filesystem::path& path, ModelConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file " + path.string());
  }
  return parse_model_config(in, base);
}

}  // namespace hisim
