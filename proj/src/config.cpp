#include "eitshape/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace eitshape {

const TomlValue& TomlValue::at(const std::string& key) const {
  auto it = entries.find(key);
  if (it == entries.end()) throw ConfigError("config: missing key '" + key + "'");
  return it->second;
}

double TomlValue::as_number(const std::string& context) const {
  if (kind != Kind::number) throw ConfigError("config: '" + context + "' must be a number");
  return num;
}

long long TomlValue::as_integer(const std::string& context) const {
  double v = as_number(context);
  if (v != std::floor(v) || std::abs(v) > 9.0e15)
    throw ConfigError("config: '" + context + "' must be an integer");
  return static_cast<long long>(v);
}

bool TomlValue::as_bool(const std::string& context) const {
  if (kind != Kind::boolean) throw ConfigError("config: '" + context + "' must be true or false");
  return flag;
}

const std::string& TomlValue::as_string(const std::string& context) const {
  if (kind != Kind::string) throw ConfigError("config: '" + context + "' must be a string");
  return str;
}

namespace {

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError("config line " + std::to_string(line) + ": " + msg);
  }
  bool done() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }
  void skip_blank_inline() {
    while (!done() && (peek() == ' ' || peek() == '\t')) ++pos;
  }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_bare_key(Cursor& c) {
  std::string key;
  while (!c.done() && is_bare_key_char(c.peek())) key.push_back(c.take());
  if (key.empty()) c.fail("expected a key");
  return key;
}

std::vector<std::string> parse_key_path(Cursor& c) {
  std::vector<std::string> path{parse_bare_key(c)};
  while (!c.done() && c.peek() == '.') {
    c.take();
    path.push_back(parse_bare_key(c));
  }
  return path;
}

std::string parse_quoted(Cursor& c) {
  c.take();  // opening quote
  std::string out;
  while (true) {
    if (c.done()) c.fail("unterminated string");
    char ch = c.take();
    if (ch == '"') break;
    if (ch == '\n') c.fail("newline inside string");
    if (ch == '\\') {
      if (c.done()) c.fail("dangling escape");
      char esc = c.take();
      switch (esc) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        default: c.fail(std::string("unsupported escape \\") + esc);
      }
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

TomlValue parse_value(Cursor& c);

TomlValue parse_array(Cursor& c) {
  c.take();  // '['
  TomlValue out;
  out.kind = TomlValue::Kind::array;
  while (true) {
    c.skip_blank_inline();
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    out.items.push_back(parse_value(c));
    c.skip_blank_inline();
    if (c.done()) c.fail("unterminated array");
    if (c.peek() == ',') {
      c.take();
    } else if (c.peek() != ']') {
      c.fail("expected ',' or ']' in array");
    }
  }
  return out;
}

TomlValue parse_value(Cursor& c) {
  c.skip_blank_inline();
  if (c.done()) c.fail("expected a value");
  char ch = c.peek();
  TomlValue v;
  if (ch == '"') {
    v.kind = TomlValue::Kind::string;
    v.str = parse_quoted(c);
    return v;
  }
  if (ch == '[') return parse_array(c);
  std::string token;
  while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
         c.peek() != '\n' && c.peek() != ' ' && c.peek() != '\t')
    token.push_back(c.take());
  if (token == "true" || token == "false") {
    v.kind = TomlValue::Kind::boolean;
    v.flag = (token == "true");
    return v;
  }
  const char* begin = token.c_str();
  char* end = nullptr;
  double num = std::strtod(begin, &end);
  if (end == begin || *end != '\0') c.fail("cannot parse value '" + token + "'");
  v.kind = TomlValue::Kind::number;
  v.num = num;
  return v;
}

void expect_line_end(Cursor& c) {
  c.skip_blank_inline();
  if (c.done()) return;
  if (c.peek() == '#')
    while (!c.done() && c.peek() != '\n') ++c.pos;
  if (!c.done()) {
    if (c.peek() != '\n') c.fail("unexpected trailing characters");
    c.take();
  }
}

TomlValue* navigate(TomlValue* root, const std::vector<std::string>& path, Cursor& c,
                    std::size_t upto) {
  TomlValue* node = root;
  for (std::size_t k = 0; k < upto; ++k) {
    TomlValue& child = node->entries[path[k]];
    if (child.kind == TomlValue::Kind::array) {
      if (child.items.empty()) c.fail("empty table array at '" + path[k] + "'");
      node = &child.items.back();
    } else if (child.kind == TomlValue::Kind::table) {
      node = &child;
    } else {
      c.fail("key '" + path[k] + "' is not a table");
    }
  }
  return node;
}

}  // namespace

TomlValue parse_toml(const std::string& text) {
  TomlValue root;
  Cursor c{text};
  TomlValue* current = &root;
  while (!c.done()) {
    c.skip_blank_inline();
    if (c.done()) break;
    char ch = c.peek();
    if (ch == '\n') {
      c.take();
      continue;
    }
    if (ch == '#') {
      while (!c.done() && c.peek() != '\n') ++c.pos;
      continue;
    }
    if (ch == '[') {
      c.take();
      bool table_array = (!c.done() && c.peek() == '[');
      if (table_array) c.take();
      c.skip_blank_inline();
      auto path = parse_key_path(c);
      c.skip_blank_inline();
      if (c.done() || c.take() != ']') c.fail("expected ']'");
      if (table_array && (c.done() || c.take() != ']')) c.fail("expected ']]'");
      TomlValue* parent = navigate(&root, path, c, path.size() - 1);
      TomlValue& slot = parent->entries[path.back()];
      if (table_array) {
        if (slot.kind == TomlValue::Kind::table && slot.entries.empty())
          slot.kind = TomlValue::Kind::array;  // first [[...]] use of this key
        if (slot.kind != TomlValue::Kind::array)
          c.fail("'" + path.back() + "' already used as a plain value");
        TomlValue fresh;
        fresh.kind = TomlValue::Kind::table;
        slot.items.push_back(fresh);
        current = &slot.items.back();
      } else {
        if (slot.kind != TomlValue::Kind::table)
          c.fail("'" + path.back() + "' already used as a non-table value");
        current = &slot;
      }
      expect_line_end(c);
      continue;
    }
    auto path = parse_key_path(c);
    c.skip_blank_inline();
    if (c.done() || c.take() != '=') c.fail("expected '=' after key");
    TomlValue value = parse_value(c);
    TomlValue* parent = navigate(current, path, c, path.size() - 1);
    if (parent->entries.count(path.back())) c.fail("duplicate key '" + path.back() + "'");
    parent->entries[path.back()] = std::move(value);
    expect_line_end(c);
  }
  return root;
}

TomlValue parse_toml_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_toml(buf.str());
}

namespace {

std::array<double, 2> point_from(const TomlValue& v, const std::string& context) {
  if (v.kind != TomlValue::Kind::array || v.items.size() != 2)
    throw ConfigError("config: '" + context + "' must be a pair [x, y]");
  return {v.items[0].as_number(context), v.items[1].as_number(context)};
}

SideValues flux_from(const TomlValue& v, const std::string& context) {
  if (v.kind != TomlValue::Kind::array || v.items.size() != 4)
    throw ConfigError("config: '" + context + "' must be [left, right, top, bottom]");
  return {v.items[0].as_number(context), v.items[1].as_number(context),
          v.items[2].as_number(context), v.items[3].as_number(context)};
}

}  // namespace

ShapeSpec shapes_from_toml(const TomlValue& list, const std::string& context) {
  if (list.kind != TomlValue::Kind::array)
    throw ConfigError("config: '" + context + "' must be a [[table array]]");
  ShapeSpec spec;
  for (const TomlValue& entry : list.items) {
    if (entry.kind != TomlValue::Kind::table)
      throw ConfigError("config: '" + context + "' entries must be tables");
    const std::string& kind = entry.at("kind").as_string(context + ".kind");
    auto center = point_from(entry.at("center"), context + ".center");
    if (kind == "ball") {
      Ball b;
      b.cx = center[0];
      b.cy = center[1];
      b.r = entry.at("r").as_number(context + ".r");
      spec.balls.push_back(b);
      if (entry.entries.size() != 3)
        throw ConfigError("config: '" + context + "' ball takes kind, center, r");
    } else if (kind == "ellipse") {
      Ellipse e;
      e.cx = center[0];
      e.cy = center[1];
      e.a = entry.at("a").as_number(context + ".a");
      e.b = entry.at("b").as_number(context + ".b");
      e.angle = entry.has("angle") ? entry.at("angle").as_number(context + ".angle") : 0.0;
      spec.ellipses.push_back(e);
      std::size_t allowed = entry.has("angle") ? 5 : 4;
      if (entry.entries.size() != allowed)
        throw ConfigError("config: '" + context + "' ellipse takes kind, center, a, b[, angle]");
    } else {
      throw ConfigError("config: unknown shape kind '" + kind + "'");
    }
  }
  return spec;
}

RunConfig run_config_from_toml(const TomlValue& root) {
  if (root.kind != TomlValue::Kind::table) throw ConfigError("config: root must be a table");
  RunConfig cfg;
  EitProblem& p = cfg.problem;
  for (const auto& [key, value] : root.entries) {
    if (key == "n") p.n = static_cast<int>(value.as_integer(key));
    else if (key == "sigma_plus") p.sigma_plus = value.as_number(key);
    else if (key == "sigma_minus") p.sigma_minus = value.as_number(key);
    else if (key == "alpha1") p.alpha1 = value.as_number(key);
    else if (key == "alpha2") p.alpha2 = value.as_number(key);
    else if (key == "delta") p.delta = value.as_number(key);
    else if (key == "seed") p.seed = static_cast<std::uint64_t>(value.as_integer(key));
    else if (key == "gamma") p.gamma = value.as_number(key);
    else if (key == "max_iterations") p.max_iterations = static_cast<int>(value.as_integer(key));
    else if (key == "c_armijo") p.c_armijo = value.as_number(key);
    else if (key == "max_backtracks") p.max_backtracks = static_cast<int>(value.as_integer(key));
    else if (key == "stop_patience") p.stop_patience = static_cast<int>(value.as_integer(key));
    else if (key == "cfl") p.cfl = value.as_number(key);
    else if (key == "cg_tol") p.cg_tol = value.as_number(key);
    else if (key == "sigma_rule") {
      try {
        p.sigma_rule = sigma_rule_from_name(value.as_string(key));
      } catch (const InvalidParameterError& e) {
        throw ConfigError(std::string("config: ") + e.what());
      }
    } else if (key == "fluxes") {
      if (value.kind != TomlValue::Kind::array || value.items.empty())
        throw ConfigError("config: 'fluxes' must be a non-empty array of side patterns");
      p.fluxes.clear();
      for (const TomlValue& f : value.items) p.fluxes.push_back(flux_from(f, "fluxes"));
    } else if (key == "true_shapes") {
      cfg.true_shapes = shapes_from_toml(value, "true_shapes");
    } else if (key == "initial_shapes") {
      cfg.initial_shapes = shapes_from_toml(value, "initial_shapes");
    } else if (key == "out_dir") {
      cfg.out_dir = value.as_string(key);
    } else if (key == "measurements_dir") {
      cfg.measurements_dir = value.as_string(key);
    } else if (key == "dump_every") {
      cfg.dump_every = static_cast<int>(value.as_integer(key));
      if (cfg.dump_every < 0) throw ConfigError("config: 'dump_every' must be >= 0");
    } else if (key == "dump_fields") {
      cfg.dump_fields = value.as_bool(key);
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_toml(parse_toml_file(path));
}

}  // namespace eitshape
