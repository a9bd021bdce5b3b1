#include "tqmc/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace tqmc::config {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line), message_(message) {}

namespace {

std::string type_name(const Value& v) {
  switch (v.data.index()) {
    case 0: return "boolean";
    case 1: return "integer";
    case 2: return "float";
    case 3: return "string";
    case 4: return "array";
    default: return "table";
  }
}

[[noreturn]] void wrong_type(const Value& v, const std::string& field, const std::string& want) {
  throw ParseError(v.line, "field '" + field + "': expected " + want + ", got " + type_name(v));
}

class Parser {
 public:
  explicit Parser(const std::string& text) : text_(text) {}

  Table document() {
    Table root;
    Table* current = &root;
    while (true) {
      skip_blank_lines();
      if (at_end()) break;
      if (peek() == '[') {
        ++pos_;
        current = &root;
        while (true) {
          skip_spaces();
          std::string name = key();
          auto [it, inserted] = current->try_emplace(name, Value{Table{}, line_, ""});
          if (!it->second.is_table())
            throw ParseError(line_, "section '" + name + "' redefines a non-table key");
          current = &std::get<Table>(it->second.data);
          skip_spaces();
          if (peek() == '.') {
            ++pos_;
            continue;
          }
          break;
        }
        expect(']');
        end_of_line();
        continue;
      }
      int key_line = line_;
      std::string name = key();
      skip_spaces();
      expect('=');
      skip_spaces();
      Value v = value();
      v.line = key_line;
      if (current->count(name)) throw ParseError(key_line, "duplicate key '" + name + "'");
      current->emplace(name, std::move(v));
      end_of_line();
    }
    return root;
  }

  Value single() {
    skip_ws_and_comments();
    Value v = value();
    skip_ws_and_comments();
    if (!at_end()) throw ParseError(line_, "trailing characters after value");
    return v;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void expect(char c) {
    if (peek() != c) {
      std::string got = at_end() ? "end of input" : std::string("'") + peek() + "'";
      throw ParseError(line_, std::string("expected '") + c + "', got " + got);
    }
    advance();
  }

  void skip_spaces() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!at_end() && peek() != '\n') ++pos_;
  }

  // Whitespace, newlines and comments; used inside arrays and tables.
  void skip_ws_and_comments() {
    while (!at_end()) {
      skip_spaces();
      skip_comment();
      if (peek() == '\n') {
        advance();
        continue;
      }
      break;
    }
  }

  void skip_blank_lines() { skip_ws_and_comments(); }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (at_end()) return;
    if (peek() != '\n') throw ParseError(line_, std::string("unexpected '") + peek() + "' after value");
    advance();
  }

  std::string key() {
    if (peek() == '"') return quoted();
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-'))
      ++pos_;
    if (start == pos_) throw ParseError(line_, "expected a key");
    return text_.substr(start, pos_ - start);
  }

  std::string quoted() {
    expect('"');
    std::string out;
    while (true) {
      if (at_end() || peek() == '\n') throw ParseError(line_, "unterminated string");
      char c = peek();
      ++pos_;
      if (c == '"') break;
      if (c == '\\') {
        char e = peek();
        ++pos_;
        switch (e) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: throw ParseError(line_, std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      out += c;
    }
    return out;
  }

  Value value() {
    int at = line_;
    char c = peek();
    if (c == '"') {
      std::string s = quoted();
      return Value{s, at, s};
    }
    if (c == '[') {
      advance();
      Array items;
      skip_ws_and_comments();
      while (peek() != ']') {
        items.push_back(value());
        skip_ws_and_comments();
        if (peek() == ',') {
          advance();
          skip_ws_and_comments();
          continue;
        }
        if (peek() != ']') throw ParseError(line_, "expected ',' or ']' in array");
      }
      advance();
      return Value{std::move(items), at, ""};
    }
    if (c == '{') {
      advance();
      Table t;
      skip_ws_and_comments();
      while (peek() != '}') {
        std::string name = key();
        skip_spaces();
        expect('=');
        skip_ws_and_comments();
        Value v = value();
        if (t.count(name)) throw ParseError(line_, "duplicate key '" + name + "' in inline table");
        t.emplace(name, std::move(v));
        skip_ws_and_comments();
        if (peek() == ',') {
          advance();
          skip_ws_and_comments();
          continue;
        }
        if (peek() != '}') throw ParseError(line_, "expected ',' or '}' in inline table");
      }
      advance();
      return Value{std::move(t), at, ""};
    }
    std::size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                         peek() == '.' || peek() == '_' || peek() == '/'))
      ++pos_;
    std::string tok = text_.substr(start, pos_ - start);
    if (tok.empty()) throw ParseError(line_, std::string("unexpected '") + c + "'");
    if (tok == "true") return Value{true, at, tok};
    if (tok == "false") return Value{false, at, tok};
    std::int64_t iv = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
    if (ec == std::errc() && p == tok.data() + tok.size()) return Value{iv, at, tok};
    double dv = 0;
    auto [q, ec2] = std::from_chars(tok.data(), tok.data() + tok.size(), dv);
    if (ec2 == std::errc() && q == tok.data() + tok.size()) return Value{dv, at, tok};
    // Bare rationals such as 3/2 are kept as strings.
    if (tok.find('/') != std::string::npos) return Value{tok, at, tok};
    throw ParseError(at, "cannot parse value '" + tok + "'");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

}  // namespace

std::int64_t Value::as_int(const std::string& field) const {
  if (auto p = std::get_if<std::int64_t>(&data)) return *p;
  wrong_type(*this, field, "integer");
}

double Value::as_double(const std::string& field) const {
  if (auto p = std::get_if<double>(&data)) return *p;
  if (auto p = std::get_if<std::int64_t>(&data)) return static_cast<double>(*p);
  wrong_type(*this, field, "number");
}

bool Value::as_bool(const std::string& field) const {
  if (auto p = std::get_if<bool>(&data)) return *p;
  wrong_type(*this, field, "boolean");
}

const std::string& Value::as_string(const std::string& field) const {
  if (auto p = std::get_if<std::string>(&data)) return *p;
  wrong_type(*this, field, "string");
}

const Array& Value::as_array(const std::string& field) const {
  if (auto p = std::get_if<Array>(&data)) return *p;
  wrong_type(*this, field, "array");
}

const Table& Value::as_table(const std::string& field) const {
  if (auto p = std::get_if<Table>(&data)) return *p;
  wrong_type(*this, field, "table");
}

Table parse(const std::string& text) { return Parser(text).document(); }

Value parse_value(const std::string& text) { return Parser(text).single(); }

Table parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse(ss.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.message());
  }
}

const Value* find(const Table& table, const std::string& key) {
  auto it = table.find(key);
  return it == table.end() ? nullptr : &it->second;
}

const Value& require(const Table& table, const std::string& key, int context_line) {
  auto it = table.find(key);
  if (it == table.end()) throw ParseError(context_line, "missing required field '" + key + "'");
  return it->second;
}

std::vector<double> as_doubles(const Value& v, const std::string& field) {
  std::vector<double> out;
  for (const auto& item : v.as_array(field)) out.push_back(item.as_double(field));
  return out;
}

std::vector<std::int64_t> as_ints(const Value& v, const std::string& field) {
  std::vector<std::int64_t> out;
  for (const auto& item : v.as_array(field)) out.push_back(item.as_int(field));
  return out;
}

}  // namespace tqmc::config
