#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hisim/policy.hpp"
#include "hisim/trace.hpp"

namespace hisim::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(HISIM_DATA_DIR) / name;
}

inline const Trace& cifar() {
  static const Trace trace = parse_trace(data_path("cifar_fixture.jsonl"), TraceFormat::jsonl);
  return trace;
}

inline const Trace& dogs() {
  static const Trace trace = parse_trace(data_path("dog_fixture.jsonl"), TraceFormat::jsonl);
  return trace;
}

inline std::filesystem::path temp_path(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / "hisim_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

inline InferenceSample sample(std::uint64_t id, double p, bool local_ok, bool remote_ok = true) {
  InferenceSample s;
  s.id = id;
  s.confidence = p;
  s.true_label = 1;
  s.local_label = local_ok ? 1 : 2;
  s.remote_label = remote_ok ? 1 : 3;
  return s;
}

/// Random multiclass trace; confidences drawn from a small grid so ties occur.
inline Trace random_trace(std::mt19937_64& rng, std::size_t n, bool coarse) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> grid(0, 10);
  std::bernoulli_distribution coin(0.5);
  std::vector<InferenceSample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    double p = coarse ? grid(rng) / 10.0 : u(rng);
    samples.push_back(sample(i, p, coin(rng), !coin(rng) || coin(rng)));
  }
  return Trace::multiclass(std::move(samples));
}

// ---- independent oracles (test-only) ----

struct PartitionCost {
  std::size_t offloaded = 0;
  std::size_t errors = 0;
};

/// Minimum cost over all 2^N accept/offload assignments that some threshold
/// theta in [0,1) can produce, counted sample by sample.
inline double brute_force_min_cost(const Trace& trace, double beta) {
  auto samples = trace.multiclass_samples();
  const std::size_t n = samples.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double max_off = -1.0;
    double min_acc = 2.0;
    PartitionCost c;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = samples[i];
      if (mask >> i & 1) {
        max_off = std::max(max_off, s.confidence);
        ++c.offloaded;
        c.errors += s.remote_correct() ? 0 : 1;
      } else {
        min_acc = std::min(min_acc, s.confidence);
        c.errors += s.local_correct() ? 0 : 1;
      }
    }
    // Representable iff some theta in [0,1) has max_off < theta <= min_acc.
    bool representable = max_off < min_acc && max_off < 1.0;
    if (!representable) continue;
    best = std::min(best, linear_cost(c.offloaded, c.errors, beta));
  }
  return best;
}

/// Store-all-then-mean, accumulated in long double.
inline std::vector<double> direct_window_means(const std::vector<double>& xs, std::size_t window) {
  std::vector<double> out;
  for (std::size_t start = 0; start + window <= xs.size(); start += window) {
    long double sum = 0.0L;
    for (std::size_t i = start; i < start + window; ++i) sum += xs[i];
    out.push_back(static_cast<double>(sum / static_cast<long double>(window)));
  }
  return out;
}

}  // namespace hisim::testing
