#include "hisim/trace.hpp"

#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string_view>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"

namespace hisim {

namespace {

constexpr std::string_view kMulticlassHeader = "id,confidence,local_label,remote_label,true_label";
constexpr std::string_view kBinaryHeader = "id,confidence,is_relevant";

void check_confidence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    throw InputError("confidence out of range: " + format_double(c));
  }
}

template <typename Sample>
void validate_samples(const std::vector<Sample>& samples) {
  std::unordered_set<std::uint64_t> ids;
  ids.reserve(samples.size());
  for (const auto& s : samples) {
    check_confidence(s.confidence);
    if (!ids.insert(s.id).second) {
      throw InputError("duplicate id " + std::to_string(s.id));
    }
  }
}

std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

// Accumulates records of either kind while parsing, enforcing per-line
// invariants so errors carry the offending line number.
class TraceBuilder {
 public:
  void add(InferenceSample s, std::size_t line) {
    set_kind(TraceKind::multiclass, line);
    check(s.id, s.confidence, line);
    multiclass_.push_back(s);
  }

  void add(BinarySample s, std::size_t line) {
    set_kind(TraceKind::binary, line);
    check(s.id, s.confidence, line);
    binary_.push_back(s);
  }

  void set_kind(TraceKind kind, std::size_t line) {
    if (kind_ && *kind_ != kind) {
      throw ParseError("record kind differs from earlier records", line);
    }
    kind_ = kind;
  }

  Metadata& metadata() { return metadata_; }

  Trace build() && {
    if (!kind_ || (multiclass_.empty() && binary_.empty())) {
      throw InputError("empty trace file");
    }
    if (*kind_ == TraceKind::multiclass) {
      return Trace::multiclass(std::move(multiclass_), std::move(metadata_));
    }
    return Trace::binary(std::move(binary_), std::move(metadata_));
  }

 private:
  void check(std::uint64_t id, double confidence, std::size_t line) {
    if (!(confidence >= 0.0 && confidence <= 1.0)) {
      throw ParseError("confidence out of range: " + format_double(confidence), line);
    }
    if (!ids_.insert(id).second) {
      throw ParseError("duplicate id " + std::to_string(id), line);
    }
  }

  std::optional<TraceKind> kind_;
  std::vector<InferenceSample> multiclass_;
  std::vector<BinarySample> binary_;
  std::unordered_set<std::uint64_t> ids_;
  Metadata metadata_;
};

using nlohmann::json;

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(std::string("missing field '") + key + "'", line);
  }
  return *it;
}

int json_label(const json& v, const char* key, std::size_t line) {
  if (!v.is_number_integer()) {
    throw ParseError(std::string("field '") + key + "' must be an integer", line);
  }
  auto value = v.get<long long>();
  if (value < std::numeric_limits<int>::min() || value > std::numeric_limits<int>::max()) {
    throw ParseError(std::string("field '") + key + "' out of range", line);
  }
  return static_cast<int>(value);
}

std::uint64_t json_id(const json& v, std::size_t line) {
  if (!v.is_number_unsigned()) {
    throw ParseError("field 'id' must be a non-negative integer", line);
  }
  return v.get<std::uint64_t>();
}

double json_confidence(const json& v, std::size_t line) {
  if (!v.is_number()) {
    throw ParseError("field 'confidence' must be a number", line);
  }
  return v.get<double>();
}

Trace parse_jsonl(std::istream& in) {
  TraceBuilder builder;
  std::string raw;
  std::size_t line = 0;
  bool seen_record = false;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = strip_cr(raw);
    if (is_blank(text)) continue;
    json obj;
    try {
      obj = json::parse(text);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line);
    }
    if (!obj.is_object()) {
      throw ParseError("record must be a JSON object", line);
    }
    if (obj.size() == 1 && obj.contains("metadata")) {
      if (seen_record) {
        throw ParseError("metadata must precede records", line);
      }
      const auto& meta = obj["metadata"];
      if (!meta.is_object()) {
        throw ParseError("metadata must be an object", line);
      }
      for (const auto& [key, value] : meta.items()) {
        if (!value.is_string()) {
          throw ParseError("metadata values must be strings", line);
        }
        builder.metadata()[key] = value.get<std::string>();
      }
      continue;
    }
    seen_record = true;
    if (obj.contains("is_relevant")) {
      BinarySample s;
      s.id = json_id(require(obj, "id", line), line);
      s.confidence = json_confidence(require(obj, "confidence", line), line);
      const auto& rel = obj["is_relevant"];
      if (!rel.is_boolean()) {
        throw ParseError("field 'is_relevant' must be a boolean", line);
      }
      s.is_relevant = rel.get<bool>();
      builder.add(s, line);
    } else {
      InferenceSample s;
      s.id = json_id(require(obj, "id", line), line);
      s.confidence = json_confidence(require(obj, "confidence", line), line);
      s.local_label = json_label(require(obj, "local_label", line), "local_label", line);
      s.true_label = json_label(require(obj, "true_label", line), "true_label", line);
      if (auto it = obj.find("remote_label"); it != obj.end() && !it->is_null()) {
        s.remote_label = json_label(*it, "remote_label", line);
      }
      builder.add(s, line);
    }
  }
  return std::move(builder).build();
}

template <typename Fn>
auto csv_field(std::size_t line, Fn&& fn) {
  try {
    return fn();
  } catch (const ParseError&) {
    throw;
  } catch (const InputError& e) {
    throw ParseError(e.what(), line);
  }
}

bool parse_bool(std::string_view text, std::size_t line) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ParseError("field 'is_relevant' must be true/false", line);
}

Trace parse_csv(std::istream& in) {
  TraceBuilder builder;
  std::string raw;
  std::size_t line = 0;
  std::optional<TraceKind> kind;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view text = strip_cr(raw);
    if (is_blank(text)) continue;
    if (!kind) {
      if (text.starts_with("#")) {
        auto body = text.substr(1);
        while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
        auto eq = body.find('=');
        if (eq == std::string_view::npos) {
          throw ParseError("metadata comment must be '# key=value'", line);
        }
        builder.metadata()[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
        continue;
      }
      if (text == kMulticlassHeader) {
        kind = TraceKind::multiclass;
      } else if (text == kBinaryHeader) {
        kind = TraceKind::binary;
      } else {
        throw ParseError("unrecognised CSV header", line);
      }
      builder.set_kind(*kind, line);
      continue;
    }
    auto fields = split_csv(text);
    if (*kind == TraceKind::multiclass) {
      if (fields.size() != 5) {
        throw ParseError("expected 5 fields, got " + std::to_string(fields.size()), line);
      }
      InferenceSample s;
      auto id = csv_field(line, [&] { return parse_integer(fields[0]); });
      if (id < 0) throw ParseError("field 'id' must be a non-negative integer", line);
      s.id = static_cast<std::uint64_t>(id);
      s.confidence = csv_field(line, [&] { return parse_double(fields[1]); });
      s.local_label = static_cast<int>(csv_field(line, [&] { return parse_integer(fields[2]); }));
      if (fields[3] != "null") {
        s.remote_label = static_cast<int>(csv_field(line, [&] { return parse_integer(fields[3]); }));
      }
      s.true_label = static_cast<int>(csv_field(line, [&] { return parse_integer(fields[4]); }));
      builder.add(s, line);
    } else {
      if (fields.size() != 3) {
        throw ParseError("expected 3 fields, got " + std::to_string(fields.size()), line);
      }
      BinarySample s;
      auto id = csv_field(line, [&] { return parse_integer(fields[0]); });
      if (id < 0) throw ParseError("field 'id' must be a non-negative integer", line);
      s.id = static_cast<std::uint64_t>(id);
      s.confidence = csv_field(line, [&] { return parse_double(fields[1]); });
      s.is_relevant = parse_bool(fields[2], line);
      builder.add(s, line);
    }
  }
  return std::move(builder).build();
}

void write_jsonl(const Trace& trace, std::ostream& out) {
  if (!trace.metadata().empty()) {
    nlohmann::ordered_json meta;
    meta["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : trace.metadata()) meta["metadata"][k] = v;
    out << meta.dump() << '\n';
  }
  if (trace.kind() == TraceKind::multiclass) {
    for (const auto& s : trace.multiclass_samples()) {
      nlohmann::ordered_json rec;
      rec["id"] = s.id;
      rec["confidence"] = s.confidence;
      rec["local_label"] = s.local_label;
      rec["remote_label"] = s.remote_label ? nlohmann::ordered_json(*s.remote_label) : nlohmann::ordered_json(nullptr);
      rec["true_label"] = s.true_label;
      out << rec.dump() << '\n';
    }
  } else {
    for (const auto& s : trace.binary_samples()) {
      nlohmann::ordered_json rec;
      rec["id"] = s.id;
      rec["confidence"] = s.confidence;
      rec["is_relevant"] = s.is_relevant;
      out << rec.dump() << '\n';
    }
  }
}

void write_csv(const Trace& trace, std::ostream& out) {
  for (const auto& [k, v] : trace.metadata()) {
    if (k.find_first_of("=\n\r") != std::string::npos || v.find_first_of("\n\r") != std::string::npos) {
      throw InputError("metadata entry '" + k + "' cannot be written as a CSV comment");
    }
    out << "# " << k << '=' << v << '\n';
  }
  if (trace.kind() == TraceKind::multiclass) {
    out << kMulticlassHeader << '\n';
    for (const auto& s : trace.multiclass_samples()) {
      out << s.id << ',' << format_double(s.confidence) << ',' << s.local_label << ','
          << (s.remote_label ? std::to_string(*s.remote_label) : std::string("null")) << ','
          << s.true_label << '\n';
    }
  } else {
    out << kBinaryHeader << '\n';
    for (const auto& s : trace.binary_samples()) {
      out << s.id << ',' << format_double(s.confidence) << ',' << (s.is_relevant ? "true" : "false")
          << '\n';
    }
  }
}

}  // namespace

Trace Trace::multiclass(std::vector<InferenceSample> samples, Metadata metadata) {
  validate_samples(samples);
  Trace t;
  t.samples_ = std::move(samples);
  t.metadata_ = std::move(metadata);
  return t;
}

Trace Trace::binary(std::vector<BinarySample> samples, Metadata metadata) {
  validate_samples(samples);
  Trace t;
  t.samples_ = std::move(samples);
  t.metadata_ = std::move(metadata);
  return t;
}

TraceKind Trace::kind() const noexcept {
  return samples_.index() == 0 ? TraceKind::multiclass : TraceKind::binary;
}

std::size_t Trace::size() const noexcept {
  return std::visit([](const auto& v) { return v.size(); }, samples_);
}

std::span<const InferenceSample> Trace::multiclass_samples() const {
  if (const auto* v = std::get_if<std::vector<InferenceSample>>(&samples_)) return *v;
  throw KindMismatch("expected a multiclass trace, got a binary trace");
}

std::span<const BinarySample> Trace::binary_samples() const {
  if (const auto* v = std::get_if<std::vector<BinarySample>>(&samples_)) return *v;
  throw KindMismatch("expected a binary trace, got a multiclass trace");
}

TraceFormat trace_format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? TraceFormat::csv : TraceFormat::jsonl;
}

Trace parse_trace(std::istream& in, TraceFormat format) {
  return format == TraceFormat::jsonl ? parse_jsonl(in) : parse_csv(in);
}

Trace parse_trace(const std::filesystem::path& path, TraceFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open trace file " + path.string());
  }
  return parse_trace(in, format);
}

void write_trace(const Trace& trace, std::ostream& out, TraceFormat format) {
  if (format == TraceFormat::jsonl) {
    write_jsonl(trace, out);
  } else {
    write_csv(trace, out);
  }
}

void write_trace(const Trace& trace, const std::filesystem::path& path, TraceFormat format) {
  std::ostringstream buffer;
  write_trace(trace, buffer, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw InputError("cannot write trace file " + path.string());
  }
  out << buffer.str();
  if (!out.flush()) {
    throw InputError("failed writing trace file " + path.string());
  }
}

}  // namespace hisim
