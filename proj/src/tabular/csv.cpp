#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "iife/tabular.hpp"
#include "json.hpp"

namespace iife::tabular {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

bool is_missing(std::string_view cell) { return trim(cell).empty(); }

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  if (!std::isfinite(value)) return std::nullopt;
  return value;
}

bool needs_quotes(std::string_view cell) {
  return cell.find_first_of(",\"\r\n") != std::string_view::npos;
}

}  // namespace

CsvData parse_csv(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB &&
      static_cast<unsigned char>(text[2]) == 0xBF) {
    text.remove_prefix(3);
  }

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields a single empty field; skip it.
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !trim(field).empty()) {
          throw std::runtime_error("csv: stray quote on line " + std::to_string(line));
        }
        field.clear();
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw std::runtime_error("csv: unterminated quoted field");
  if (field_started || !record.empty()) end_record();

  if (records.empty()) throw std::runtime_error("csv: missing header row");

  CsvData data;
  data.header = std::move(records.front());
  std::unordered_set<std::string> seen;
  for (auto& name : data.header) {
    name = std::string(trim(name));
    if (name.empty()) throw std::runtime_error("csv: empty column name in header");
    if (!seen.insert(name).second) {
      throw std::runtime_error("csv: duplicate column name '" + name + "'");
    }
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != data.header.size()) {
      throw std::runtime_error("csv: record " + std::to_string(r) + " has " +
                               std::to_string(records[r].size()) + " fields, expected " +
                               std::to_string(data.header.size()));
    }
    data.rows.push_back(std::move(records[r]));
  }
  return data;
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string format_csv(const CsvData& data) {
  std::string out;
  auto write_record = [&](const std::vector<std::string>& record) {
    for (std::size_t i = 0; i < record.size(); ++i) {
      if (i > 0) out.push_back(',');
      const std::string& cell = record[i];
      if (needs_quotes(cell)) {
        out.push_back('"');
        for (char ch : cell) {
          if (ch == '"') out.push_back('"');
          out.push_back(ch);
        }
        out.push_back('"');
      } else {
        out += cell;
      }
    }
    out.push_back('\n');
  };
  write_record(data.header);
  for (const auto& row : data.rows) write_record(row);
  return out;
}

Schema load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("schema '" + path + "': " + e.what());
  }
  if (!doc.is_object() || !doc.contains("columns") || !doc["columns"].is_object()) {
    throw std::runtime_error("schema '" + path + "' must contain a \"columns\" object");
  }
  Schema schema;
  for (const auto& [name, kind] : doc["columns"].items()) {
    if (!kind.is_string()) throw std::runtime_error("schema: kind of '" + name + "' must be a string");
    schema[name] = parse_column_kind(kind.get<std::string>());
  }
  return schema;
}

std::vector<Column> infer_columns(const CsvData& data, const LoadOptions& opts) {
  for (const auto& [name, kind] : opts.schema) {
    bool found = false;
    for (const auto& h : data.header) found = found || h == name;
    if (!found) throw std::runtime_error("schema names unknown column '" + name + "'");
  }

  std::vector<Column> columns;
  columns.reserve(data.header.size());
  for (std::size_t c = 0; c < data.header.size(); ++c) {
    const std::string& name = data.header[c];
    std::vector<double> numbers(data.rows.size(), std::numeric_limits<double>::quiet_NaN());
    bool parseable = true;
    std::set<double> distinct;
    for (std::size_t r = 0; r < data.rows.size(); ++r) {
      const std::string& cell = data.rows[r][c];
      if (is_missing(cell)) continue;
      auto value = parse_number(cell);
      if (!value) {
        parseable = false;
        break;
      }
      numbers[r] = *value;
      distinct.insert(*value);
    }

    ColumnKind kind = (parseable && distinct.size() > opts.max_cat_card)
                          ? ColumnKind::Numeric
                          : ColumnKind::Categorical;
    if (auto it = opts.schema.find(name); it != opts.schema.end()) {
      kind = it->second;
      if (kind == ColumnKind::Numeric && !parseable) {
        throw std::runtime_error("column '" + name + "' declared numeric but has non-numeric cells");
      }
    }

    if (kind == ColumnKind::Numeric) {
      columns.push_back(Column::numeric(name, std::move(numbers)));
    } else {
      std::vector<std::string> symbols;
      symbols.reserve(data.rows.size());
      for (const auto& row : data.rows) {
        std::string_view cell = trim(row[c]);
        symbols.emplace_back(cell.empty() ? std::string(kMissingCategory) : std::string(cell));
      }
      columns.push_back(Column::categorical(name, std::move(symbols)));
    }
  }
  return columns;
}

Table table_from_csv(const CsvData& data, const std::string& target, TaskKind task,
                     const LoadOptions& opts) {
  std::size_t target_index = data.header.size();
  for (std::size_t c = 0; c < data.header.size(); ++c) {
    if (data.header[c] == target) target_index = c;
  }
  if (target_index == data.header.size()) {
    throw std::runtime_error("target column '" + target + "' not found");
  }

  LoadOptions effective = opts;
  effective.schema[target] =
      task == TaskKind::Classification ? ColumnKind::Categorical : ColumnKind::Numeric;
  std::vector<Column> columns;
  try {
    columns = infer_columns(data, effective);
  } catch (const std::runtime_error& e) {
    if (task == TaskKind::Regression) {
      throw std::runtime_error("regression target '" + target + "' must be numeric: " + e.what());
    }
    throw;
  }

  const Column& y = columns[target_index];
  if (task == TaskKind::Regression) {
    for (double v : y.numbers) {
      if (std::isnan(v)) throw std::runtime_error("regression target has missing values");
    }
  } else {
    std::set<std::string_view> classes(y.symbols.begin(), y.symbols.end());
    if (classes.size() > kMaxClasses) {
      throw std::runtime_error("classification target has " + std::to_string(classes.size()) +
                               " classes (limit " + std::to_string(kMaxClasses) + ")");
    }
  }
  return Table(std::move(columns), target, task);
}

Table load_csv(const std::string& path, const std::string& target, TaskKind task,
               const LoadOptions& opts) {
  return table_from_csv(read_csv(path), target, task, opts);
}

}  // namespace iife::tabular
