#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "freeprod/word_io.hpp"

namespace freeprod::cli {

namespace {

void check_keys(const Json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items())
    if (!ok.count(key)) throw ConfigError(where + ": unknown field '" + key + "'");
}

const Json& require(const Json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing field '" + key + "'");
  return obj.at(key);
}

std::string string_field(const Json& obj, const std::string& where, const char* key) {
  const auto& v = require(obj, where, key);
  if (!v.is_string()) throw ConfigError(where + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::int64_t int_field(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<std::int64_t>();
}

double real_field(const Json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  return v.get<double>();
}

FactorDescriptor parse_factor(const Json& f, const std::string& where) {
  const auto kind = string_field(f, where, "kind");
  if (kind == "integer") {
    check_keys(f, where, {"kind", "name"});
    return FactorDescriptor::integer(string_field(f, where, "name"));
  }
  if (kind == "cyclic") {
    check_keys(f, where, {"kind", "name", "order"});
    return FactorDescriptor::cyclic(string_field(f, where, "name"),
                                    int_field(require(f, where, "order"), where + ".order"));
  }
  if (kind == "table") {
    check_keys(f, where, {"kind", "name", "table", "generators", "generator_names"});
    std::vector<std::vector<int>> table;
    const auto& rows = require(f, where, "table");
    if (!rows.is_array()) throw ConfigError(where + ".table: expected an array of rows");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto row_where = where + ".table[" + std::to_string(i) + "]";
      if (!rows[i].is_array()) throw ConfigError(row_where + ": expected an array");
      std::vector<int> row;
      for (std::size_t j = 0; j < rows[i].size(); ++j)
        row.push_back(static_cast<int>(int_field(rows[i][j], row_where + "[" + std::to_string(j) + "]")));
      table.push_back(std::move(row));
    }
    std::vector<int> gens;
    const auto& g = require(f, where, "generators");
    if (!g.is_array()) throw ConfigError(where + ".generators: expected an array");
    for (std::size_t i = 0; i < g.size(); ++i)
      gens.push_back(static_cast<int>(int_field(g[i], where + ".generators[" + std::to_string(i) + "]")));
    std::vector<std::string> names;
    const auto& n = require(f, where, "generator_names");
    if (!n.is_array()) throw ConfigError(where + ".generator_names: expected an array");
    for (const auto& s : n) {
      if (!s.is_string()) throw ConfigError(where + ".generator_names: expected strings");
      names.push_back(s.get<std::string>());
    }
    return FactorDescriptor::table(string_field(f, where, "name"), std::move(table), std::move(gens),
                                   std::move(names));
  }
  throw ConfigError(where + ".kind: expected 'integer', 'cyclic' or 'table', got '" + kind + "'");
}

DrivingMeasure parse_measure(const Json& m, const GroupContext& ctx) {
  if (m.is_object()) {
    check_keys(m, "measure", {"kind", "lazy"});
    const auto kind = string_field(m, "measure", "kind");
    if (kind != "srw") throw ConfigError("measure.kind: only 'srw' is recognized");
    const double lazy = m.contains("lazy") ? real_field(m.at("lazy"), "measure.lazy") : 0.0;
    return DrivingMeasure::simple_random_walk(ctx, lazy);
  }
  if (!m.is_array()) throw ConfigError("measure: expected a list of atoms or {\"kind\": \"srw\"}");
  std::vector<MeasureAtom> atoms;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const auto where = "measure[" + std::to_string(i) + "]";
    check_keys(m[i], where, {"word", "prob"});
    try {
      atoms.push_back({parse_word(string_field(m[i], where, "word"), ctx),
                       real_field(require(m[i], where, "prob"), where + ".prob")});
    } catch (const ConfigError&) {
      throw;
    } catch (const MalformedInput& e) {
      throw ConfigError(where + ".word: " + e.what());
    }
  }
  return DrivingMeasure("config", std::move(atoms));
}

// Line and column of a byte offset, 1-based.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < std::min(offset, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

Config parse_config(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    const auto pos = what.find("syntax error");
    throw ConfigError("config line " + std::to_string(line) + ", column " + std::to_string(col) +
                      ": " + (pos == std::string::npos ? what : what.substr(pos)));
  }
  check_keys(j, "config", {"group", "lattice", "measure", "params"});
  Config cfg;
  cfg.raw = text;
  if (j.contains("group") && j.contains("lattice"))
    throw ConfigError("config: give either 'group' or 'lattice', not both");
  if (j.contains("group")) {
    const auto& g = j.at("group");
    if (!g.is_array() || g.empty()) throw ConfigError("group: expected a non-empty list of factors");
    std::vector<FactorDescriptor> factors;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto where = "group[" + std::to_string(i) + "]";
      try {
        factors.push_back(parse_factor(g[i], where));
      } catch (const ConfigError&) {
        throw;
      } catch (const MalformedInput& e) {
        throw ConfigError(where + ": " + e.what());
      }
    }
    try {
      cfg.group.emplace(std::move(factors));
    } catch (const MalformedInput& e) {
      throw ConfigError(std::string("group: ") + e.what());
    }
  }
  if (j.contains("lattice")) {
    const auto& l = j.at("lattice");
    check_keys(l, "lattice", {"dimension"});
    const auto d = int_field(require(l, "lattice", "dimension"), "lattice.dimension");
    if (d < 1 || d > 8) throw ConfigError("lattice.dimension: expected 1..8");
    cfg.lattice_dimension = static_cast<int>(d);
  }
  if (j.contains("measure")) {
    if (!cfg.group) throw ConfigError("measure: needs a 'group'");
    try {
      cfg.measure.emplace(parse_measure(j.at("measure"), *cfg.group));
    } catch (const ConfigError&) {
      throw;
    } catch (const MalformedInput& e) {
      throw ConfigError(std::string("measure: ") + e.what());
    }
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw ConfigError("params: expected an object");
    cfg.params = j.at("params");
  }
  return cfg;
}

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Params::Params(const Json& params, std::string command) : params_(params), command_(std::move(command)) {}

const Json* Params::find(const std::string& key) {
  used_.push_back(key);
  return params_.contains(key) ? &params_.at(key) : nullptr;
}

std::int64_t Params::integer(const std::string& key, std::optional<std::int64_t> fallback) {
  const auto* v = find(key);
  if (!v) {
    if (!fallback) throw ConfigError(path(key) + ": required by '" + command_ + "'");
    return *fallback;
  }
  return int_field(*v, path(key));
}

double Params::real(const std::string& key, std::optional<double> fallback) {
  const auto* v = find(key);
  if (!v) {
    if (!fallback) throw ConfigError(path(key) + ": required by '" + command_ + "'");
    return *fallback;
  }
  return real_field(*v, path(key));
}

std::string Params::text(const std::string& key, std::optional<std::string> fallback) {
  const auto* v = find(key);
  if (!v) {
    if (!fallback) throw ConfigError(path(key) + ": required by '" + command_ + "'");
    return *fallback;
  }
  if (!v->is_string()) throw ConfigError(path(key) + ": expected a string");
  return v->get<std::string>();
}

std::vector<double> Params::grid(const std::string& key, std::vector<double> fallback) {
  const auto* v = find(key);
  if (!v) return fallback;
  std::vector<double> out;
  if (v->is_array()) {
    for (std::size_t i = 0; i < v->size(); ++i)
      out.push_back(real_field((*v)[i], path(key) + "[" + std::to_string(i) + "]"));
    return out;
  }
  if (!v->is_object()) throw ConfigError(path(key) + ": expected a list or {from, to, step|count}");
  if (v->contains("step") == v->contains("count"))
    throw ConfigError(path(key) + ": give exactly one of 'step' and 'count'");
  check_keys(*v, path(key), {"from", "to", "step", "count"});
  const double from = real_field(require(*v, path(key), "from"), path(key) + ".from");
  const double to = real_field(require(*v, path(key), "to"), path(key) + ".to");
  if (v->contains("count")) {
    const auto count = int_field(v->at("count"), path(key) + ".count");
    if (count < 2) throw ConfigError(path(key) + ".count: expected at least 2");
    for (std::int64_t i = 0; i < count; ++i)
      out.push_back(from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1));
  } else {
    const double step = real_field(v->at("step"), path(key) + ".step");
    if (!(step > 0) || !(to >= from)) throw ConfigError(path(key) + ": expected step > 0 and to >= from");
    const auto count = static_cast<std::int64_t>(std::floor((to - from) / step + 1e-9));
    for (std::int64_t i = 0; i <= count; ++i) out.push_back(from + step * static_cast<double>(i));
  }
  return out;
}

std::vector<std::int64_t> Params::integers(const std::string& key, std::vector<std::int64_t> fallback) {
  const auto* v = find(key);
  if (!v) return fallback;
  if (!v->is_array()) throw ConfigError(path(key) + ": expected a list of integers");
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < v->size(); ++i)
    out.push_back(int_field((*v)[i], path(key) + "[" + std::to_string(i) + "]"));
  return out;
}

const Json& Params::raw(const std::string& key) {
  const auto* v = find(key);
  if (!v) throw ConfigError(path(key) + ": required by '" + command_ + "'");
  return *v;
}

void Params::finish() const {
  for (const auto& [key, value] : params_.items())
    if (std::find(used_.begin(), used_.end(), key) == used_.end())
      throw ConfigError("params: unknown field '" + key + "' for '" + command_ + "'");
}

}  // namespace freeprod::cli
