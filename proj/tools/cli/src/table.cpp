#include "hisim/cli/table.hpp"

#include <ostream>

#include <nlohmann/json.hpp>

#include "hisim/error.hpp"
#include "hisim/numfmt.hpp"

namespace hisim::cli {

OutputFormat parse_output_format(const std::string& text) {
  if (text == "csv") return OutputFormat::csv;
  if (text == "json") return OutputFormat::json;
  throw ConfigError("unknown output format '" + text + "' (expected csv or json)");
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string quoted = "\"";
  for (char c : s) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

struct CsvCell {
  std::string operator()(std::monostate) const { return {}; }
  std::string operator()(const std::string& s) const { return csv_escape(s); }
  std::string operator()(double d) const { return format_double(d); }
  std::string operator()(long long v) const { return std::to_string(v); }
  std::string operator()(bool b) const { return b ? "true" : "false"; }
};

struct JsonCell {
  nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
  nlohmann::ordered_json operator()(const std::string& s) const { return s; }
  nlohmann::ordered_json operator()(double d) const { return d; }
  nlohmann::ordered_json operator()(long long v) const { return v; }
  nlohmann::ordered_json operator()(bool b) const { return b; }
};

}  // namespace

void write_tables(std::ostream& out, std::span<const Table> tables, OutputFormat format) {
  if (format == OutputFormat::json) {
    nlohmann::ordered_json doc = nlohmann::ordered_json::object();
    for (const auto& t : tables) {
      auto rows = nlohmann::ordered_json::array();
      for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < t.columns.size(); ++c) obj[t.columns[c]] = std::visit(JsonCell{}, row[c]);
        rows.push_back(std::move(obj));
      }
      doc[t.name] = std::move(rows);
    }
    out << doc.dump(2) << '\n';
    return;
  }
  bool first = true;
  for (const auto& t : tables) {
    if (!first) out << '\n';
    first = false;
    for (std::size_t c = 0; c < t.columns.size(); ++c) out << (c ? "," : "") << t.columns[c];
    out << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << std::visit(CsvCell{}, row[c]);
      out << '\n';
    }
  }
}

}  // namespace hisim::cli
