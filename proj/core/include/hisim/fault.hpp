#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace hisim {

enum class FaultKind { inner_race, outer_race, ball };

struct NormalState {};
struct FaultState {
  FaultKind kind = FaultKind::inner_race;
  double width_mm = 0.0;
};
using SeriesLabel = std::variant<NormalState, FaultState>;

struct VibrationSeries {
  std::vector<double> samples;
  double sample_rate_hz = 48000.0;
  std::optional<SeriesLabel> label;
};

struct DetectorConfig {
  std::size_t window = 4096;
  double threshold = 0.07;

  void validate() const;
};

enum class WindowState { normal, not_normal };

/// Streaming mean over non-overlapping batches of `window` samples.
class WindowAverager {
 public:
  explicit WindowAverager(std::size_t window);

  /// Returns the batch mean when `value` completes a batch.
  std::optional<double> push(double value) noexcept;

  std::size_t pending() const noexcept { return count_; }

 private:
  std::size_t window_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
};

std::vector<double> windowed_averages(std::span<const double> samples, const DetectorConfig& config);
std::vector<double> windowed_averages(const VibrationSeries& series, const DetectorConfig& config);

WindowState classify_window(double average, const DetectorConfig& config) noexcept;
std::vector<WindowState> classify_windows(std::span<const double> averages, const DetectorConfig& config);

/// Fraction of windows that are not normal, i.e. the share of data sent on.
double offload_fraction(std::span<const WindowState> decisions);

double raw_bandwidth_bps(std::size_t sensor_count, double sample_rate_hz, std::size_t bytes_per_sample);

/// Two-regime Gaussian series: each entry of `pattern` yields one window of
/// samples with the normal or fault mean.
struct SyntheticSeriesSpec {
  double normal_mean = 0.03;
  double fault_mean = 0.2;
  double sigma = 0.01;
  std::size_t window = 4096;
  double sample_rate_hz = 48000.0;
  std::vector<WindowState> pattern;
};

VibrationSeries synthesize_series(const SyntheticSeriesSpec& spec, std::uint64_t seed);

// One amplitude per line.
VibrationSeries read_series_csv(const std::filesystem::path& path, double sample_rate_hz);
// Little-endian signed 16-bit samples.
VibrationSeries read_series_int16(const std::filesystem::path& path, double sample_rate_hz);
void write_series_csv(const VibrationSeries& series, const std::filesystem::path& path);

}  // namespace hisim
