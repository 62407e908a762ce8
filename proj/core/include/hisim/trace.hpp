#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hisim {

enum class TraceKind { multiclass, binary };
enum class TraceFormat { jsonl, csv };

/// One data item as seen by a multiclass local/remote model pair.
///
/// `confidence` is the top-1 probability of the local model's output pmf.
/// A missing `remote_label` means the remote model is treated as an oracle.
struct InferenceSample {
  std::uint64_t id = 0;
  double confidence = 0.0;
  int local_label = 0;
  std::optional<int> remote_label;
  int true_label = 0;

  bool local_correct() const noexcept { return local_label == true_label; }
  bool remote_correct() const noexcept { return !remote_label || *remote_label == true_label; }

  friend bool operator==(const InferenceSample&, const InferenceSample&) = default;
};

/// One data item for a relevance filter: confidence is the probability of the
/// positive (relevant) class.
struct BinarySample {
  std::uint64_t id = 0;
  double confidence = 0.0;
  bool is_relevant = false;

  friend bool operator==(const BinarySample&, const BinarySample&) = default;
};

using Metadata = std::map<std::string, std::string>;

/// Immutable, validated sequence of samples of a single kind.
class Trace {
 public:
  /// Throws InputError if a confidence is outside [0,1] or an id repeats.
  static Trace multiclass(std::vector<InferenceSample> samples, Metadata metadata = {});
  static Trace binary(std::vector<BinarySample> samples, Metadata metadata = {});

  TraceKind kind() const noexcept;
  std::size_t size() const noexcept;
  bool empty() const noexcept { return size() == 0; }

  /// Throws KindMismatch when the trace holds the other kind.
  std::span<const InferenceSample> multiclass_samples() const;
  std::span<const BinarySample> binary_samples() const;

  const Metadata& metadata() const noexcept { return metadata_; }

  friend bool operator==(const Trace&, const Trace&) = default;

 private:
  Trace() = default;

  std::variant<std::vector<InferenceSample>, std::vector<BinarySample>> samples_;
  Metadata metadata_;
};

TraceFormat trace_format_from_path(const std::filesystem::path& path);

Trace parse_trace(const std::filesystem::path& path, TraceFormat format);
Trace parse_trace(std::istream& in, TraceFormat format);

void write_trace(const Trace& trace, const std::filesystem::path& path, TraceFormat format);
void write_trace(const Trace& trace, std::ostream& out, TraceFormat format);

}  // namespace hisim
