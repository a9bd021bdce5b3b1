#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

// Reader for the small structured-text dialect used by config files:
//
//   # comment
//   key = 1.5
//   poly = [-1, -1, 0]
//   body = { kind = "disk", center = [0.5, 0.5], radius = 0.35 }
//   [section]
//   name = "text"
//
// Arrays may span lines. Dotted section names create nested tables.

namespace tqmc::config {

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& message);
  int line() const { return line_; }
  const std::string& message() const { return message_; }

 private:
  int line_;
  std::string message_;
};

struct Value;
using Array = std::vector<Value>;
using Table = std::map<std::string, Value>;

struct Value {
  std::variant<bool, std::int64_t, double, std::string, Array, Table> data;
  int line = 0;
  std::string raw;  // source text of scalar tokens

  bool is_table() const { return std::holds_alternative<Table>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
  }

  std::int64_t as_int(const std::string& field) const;
  double as_double(const std::string& field) const;
  bool as_bool(const std::string& field) const;
  const std::string& as_string(const std::string& field) const;
  const Array& as_array(const std::string& field) const;
  const Table& as_table(const std::string& field) const;
};

Table parse(const std::string& text);
/// Parses a single value, e.g. an inline table given on a command line.
Value parse_value(const std::string& text);
Table parse_file(const std::string& path);

/// Field lookup with errors that name the field and its line.
const Value& require(const Table& table, const std::string& key, int context_line = 0);
const Value* find(const Table& table, const std::string& key);

std::vector<double> as_doubles(const Value& v, const std::string& field);
std::vector<std::int64_t> as_ints(const Value& v, const std::string& field);

}  // namespace tqmc::config
