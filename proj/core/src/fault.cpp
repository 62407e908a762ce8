#include "hisim/fault.hpp"

#include <fstream>
#include <random>
#include <string>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"

namespace hisim {

void DetectorConfig::validate() const {
  if (window < 1) {
    throw ConfigError("window must be at least 1");
  }
}

WindowAverager::WindowAverager(std::size_t window) : window_(window) {
  if (window_ < 1) {
    throw ConfigError("window must be at least 1");
  }
}

std::optional<double> WindowAverager::push(double value) noexcept {
  sum_ += value;
  if (++count_ < window_) return std::nullopt;
  double mean = sum_ / static_cast<double>(window_);
  sum_ = 0.0;
  count_ = 0;
  return mean;
}

std::vector<double> windowed_averages(std::span<const double> samples, const DetectorConfig& config) {
  config.validate();
  if (samples.size() < config.window) {
    throw InputError("series has " + std::to_string(samples.size()) + " samples, fewer than one window of " +
                     std::to_string(config.window));
  }
  std::vector<double> out;
  out.reserve(samples.size() / config.window);
  WindowAverager averager(config.window);
  for (double v : samples) {
    if (auto mean = averager.push(v)) out.push_back(*mean);
  }
  return out;
}

std::vector<double> windowed_averages(const VibrationSeries& series, const DetectorConfig& config) {
  return windowed_averages(std::span<const double>(series.samples), config);
}

WindowState classify_window(double average, const DetectorConfig& config) noexcept {
  return average < config.threshold ? WindowState::normal : WindowState::not_normal;
}

std::vector<WindowState> classify_windows(std::span<const double> averages, const DetectorConfig& config) {
  std::vector<WindowState> out;
  out.reserve(averages.size());
  for (double a : averages) out.push_back(classify_window(a, config));
  return out;
}

double offload_fraction(std::span<const WindowState> decisions) {
  if (decisions.empty()) {
    throw InputError("no window decisions");
  }
  std::size_t flagged = 0;
  for (auto d : decisions) flagged += d == WindowState::not_normal ? 1 : 0;
  return static_cast<double>(flagged) / static_cast<double>(decisions.size());
}

double raw_bandwidth_bps(std::size_t sensor_count, double sample_rate_hz, std::size_t bytes_per_sample) {
  if (sensor_count == 0 || !(sample_rate_hz > 0.0) || bytes_per_sample == 0) {
    throw ConfigError("sensor count, sample rate and bytes per sample must be positive");
  }
  return static_cast<double>(sensor_count) * sample_rate_hz * static_cast<double>(bytes_per_sample) * 8.0;
}

VibrationSeries synthesize_series(const SyntheticSeriesSpec& spec, std::uint64_t seed) {
  if (spec.window < 1 || !(spec.sigma >= 0.0) || !(spec.sample_rate_hz > 0.0)) {
    throw ConfigError("invalid synthetic series parameters");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spec.sigma);
  VibrationSeries series;
  series.sample_rate_hz = spec.sample_rate_hz;
  series.samples.reserve(spec.window * spec.pattern.size());
  bool any_fault = false;
  for (auto state : spec.pattern) {
    double mean = state == WindowState::normal ? spec.normal_mean : spec.fault_mean;
    any_fault |= state == WindowState::not_normal;
    for (std::size_t i = 0; i < spec.window; ++i) {
      series.samples.push_back(mean + (spec.sigma > 0.0 ? noise(rng) : 0.0));
    }
  }
  if (any_fault) {
    series.label = FaultState{};
  } else {
    series.label = NormalState{};
  }
  return series;
}

namespace {

void check_rate(double sample_rate_hz) {
  if (!(sample_rate_hz > 0.0)) {
    throw ConfigError("sample rate must be positive");
  }
}

}  // namespace

VibrationSeries read_series_csv(const std::filesystem::path& path, double sample_rate_hz) {
  check_rate(sample_rate_hz);
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open series file " + path.string());
  }
  VibrationSeries series;
  series.sample_rate_hz = sample_rate_hz;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      series.samples.push_back(parse_double(line));
    } catch (const InputError& e) {
      throw ParseError(e.what(), n);
    }
  }
  return series;
}

VibrationSeries read_series_int16(const std::filesystem::path& path, double sample_rate_hz) {
  check_rate(sample_rate_hz);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open series file " + path.string());
  }
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 2 != 0) {
    throw InputError("int16 series has an odd number of bytes");
  }
  VibrationSeries series;
  series.sample_rate_hz = sample_rate_hz;
  series.samples.reserve(bytes.size() / 2);
  for (std::size_t i = 0; i < bytes.size(); i += 2) {
    auto raw = static_cast<std::uint16_t>(bytes[i] | (bytes[i + 1] << 8));
    series.samples.push_back(static_cast<double>(static_cast<std::int16_t>(raw)));
  }
  return series;
}

void write_series_csv(const VibrationSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot write series file " + path.string());
  }
  for (double v : series.samples) out << format_double(v) << '\n';
}

}  // namespace hisim
