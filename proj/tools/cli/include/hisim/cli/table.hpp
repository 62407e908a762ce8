#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace hisim::cli {

using Cell = std::variant<std::monostate, std::string, double, long long, bool>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

enum class OutputFormat { csv, json };

OutputFormat parse_output_format(const std::string& text);

/// CSV: each table as header + rows, tables separated by one blank line.
/// JSON: one object mapping table name to an array of row objects.
void write_tables(std::ostream& out, std::span<const Table> tables, OutputFormat format);

}  // namespace hisim::cli
