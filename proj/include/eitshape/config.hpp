#pragma once

#include <map>
#include <string>
#include <vector>

#include "eitshape/eit.hpp"

namespace eitshape {

// Value tree for the supported TOML subset: bare keys, quoted strings,
// numbers, booleans, inline arrays, [table] headers and [[array-of-tables]]
// headers with dotted paths, and # comments.
struct TomlValue {
  enum class Kind { string, number, boolean, array, table };
  Kind kind = Kind::table;
  std::string str;
  double num = 0;
  bool flag = false;
  std::vector<TomlValue> items;              // array elements
  std::map<std::string, TomlValue> entries;  // table fields

  bool has(const std::string& key) const { return entries.count(key) != 0; }
  const TomlValue& at(const std::string& key) const;

  double as_number(const std::string& context) const;
  long long as_integer(const std::string& context) const;
  bool as_bool(const std::string& context) const;
  const std::string& as_string(const std::string& context) const;
};

TomlValue parse_toml(const std::string& text);
TomlValue parse_toml_file(const std::string& path);

struct RunConfig {
  EitProblem problem;
  ShapeSpec true_shapes;
  ShapeSpec initial_shapes;
  std::string out_dir = "out";
  std::string measurements_dir;  // when set, reconstruct loads data from here
  int dump_every = 0;            // 0: dump only the initial and final state
  bool dump_fields = true;
};

// Applies the documented keys over the defaults; unknown keys are refused so
// typos fail loudly.
RunConfig run_config_from_toml(const TomlValue& root);
RunConfig load_run_config(const std::string& path);

ShapeSpec shapes_from_toml(const TomlValue& list, const std::string& context);

}  // namespace eitshape
