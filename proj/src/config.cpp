#include "metapop/config.hpp"

#include "metapop/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>

namespace metapop {

namespace {

using nlohmann::json;

// Line and column of a byte offset, 1-based.
std::string locate(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ConfigError("field \"" + field + "\" must be a number");
  return j.get<double>();
}

const json& require(const json& doc, const std::string& field) {
  auto it = doc.find(field);
  if (it == doc.end()) throw ConfigError("missing field \"" + field + "\"");
  return *it;
}

Vec3 vector_field(const json& doc, const std::string& name) {
  Vec3 v;
  if (auto it = doc.find(name); it != doc.end()) {
    if (!it->is_array() || it->size() != 3) throw ConfigError("field \"" + name + "\" must be an array of 3 numbers");
    for (int i = 0; i < 3; ++i) v(i) = number((*it)[i], name + "[" + std::to_string(i) + "]");
    return v;
  }
  for (int i = 0; i < 3; ++i) {
    const std::string field = name + std::to_string(i + 1);
    v(i) = number(require(doc, field), field);
  }
  return v;
}

Mat3 migration_field(const json& doc) {
  Mat3 m = Mat3::Zero();
  if (auto it = doc.find("m"); it != doc.end()) {
    if (!it->is_array() || it->size() != 3) throw ConfigError("field \"m\" must be a 3x3 array");
    for (int i = 0; i < 3; ++i) {
      const json& row = (*it)[i];
      if (!row.is_array() || row.size() != 3) throw ConfigError("field \"m\" must be a 3x3 array");
      for (int j = 0; j < 3; ++j) m(i, j) = number(row[j], "m[" + std::to_string(i) + "][" + std::to_string(j) + "]");
    }
    return m;
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      const std::string field = "m" + std::to_string(i + 1) + std::to_string(j + 1);
      m(i, j) = number(require(doc, field), field);
    }
  return m;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error at " + locate(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  const Vec3 r = vector_field(doc, "r");
  const Vec3 k = vector_field(doc, "k");
  const Mat3 m = migration_field(doc);
  RunConfig cfg{ModelParams::make(r, k, m), TopologyId::Full, std::nullopt, {}, 0, 200};

  if (auto it = doc.find("topology"); it != doc.end()) {
    if (!it->is_string()) throw ConfigError("field \"topology\" must be a string token");
    const auto id = parse_topology(it->get<std::string>());
    if (!id) throw ConfigError("unknown topology token \"" + it->get<std::string>() + "\"");
    cfg.topology = *id;
  }
  if (auto it = doc.find("seed"); it != doc.end()) {
    if (!it->is_number_unsigned()) throw ConfigError("field \"seed\" must be a nonnegative integer");
    cfg.seed = it->get<std::uint64_t>();
  }
  if (auto it = doc.find("samples"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) throw ConfigError("field \"samples\" must be an integer >= 1");
    cfg.samples = it->get<int>();
  }
  if (auto it = doc.find("sweep"); it != doc.end()) {
    const json& s = *it;
    if (!s.is_object()) throw ConfigError("field \"sweep\" must be an object");
    const json& param = require(s, "param");
    if (!param.is_string() || !parse_param(param.get<std::string>()))
      throw ConfigError("field \"sweep.param\" must be a parameter token such as \"r2\"");
    SweepSpec spec;
    spec.param = *parse_param(param.get<std::string>());
    spec.lo = number(require(s, "lo"), "sweep.lo");
    spec.hi = number(require(s, "hi"), "sweep.hi");
    const json& steps = require(s, "steps");
    if (!steps.is_number_integer()) throw ConfigError("field \"sweep.steps\" must be an integer");
    spec.steps = steps.get<int>();
    cfg.sweep = spec;
  }
  if (auto it = doc.find("simulate"); it != doc.end()) {
    const json& s = *it;
    if (!s.is_object()) throw ConfigError("field \"simulate\" must be an object");
    if (s.contains("x0")) cfg.simulate.x0 = vector_field(s, "x0");
    if (s.contains("t_end")) cfg.simulate.t_end = number(s["t_end"], "simulate.t_end");
    if (s.contains("rel_tol")) cfg.simulate.rel_tol = number(s["rel_tol"], "simulate.rel_tol");
    if (s.contains("abs_tol")) cfg.simulate.abs_tol = number(s["abs_tol"], "simulate.abs_tol");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file \"" + path + "\"");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const RunConfig& cfg) {
  const auto& p = cfg.params;
  json doc;
  doc["r"] = {p.r(0), p.r(1), p.r(2)};
  doc["k"] = {p.k(0), p.k(1), p.k(2)};
  doc["m"] = json::array();
  for (int i = 0; i < 3; ++i) doc["m"].push_back({p.m(i, 0), p.m(i, 1), p.m(i, 2)});
  doc["topology"] = std::string(to_string(cfg.topology));
  doc["seed"] = cfg.seed;
  doc["samples"] = cfg.samples;
  if (cfg.sweep) {
    doc["sweep"] = {{"param", std::string(to_string(cfg.sweep->param))},
                    {"lo", cfg.sweep->lo},
                    {"hi", cfg.sweep->hi},
                    {"steps", cfg.sweep->steps}};
  }
  const auto& s = cfg.simulate;
  doc["simulate"] = {{"x0", {s.x0(0), s.x0(1), s.x0(2)}},
                     {"t_end", s.t_end},
                     {"rel_tol", s.rel_tol},
                     {"abs_tol", s.abs_tol}};
  return doc.dump(2) + "\n";
}

}  // namespace metapop
