#include <fstream>
#include <algorithm>
#include <cctype>
#include <sstream>

#include "ltgap/harness.hpp"

namespace ltgap::harness {

using nlohmann::json;

const std::vector<std::string>& kinds() {
  static const std::vector<std::string> k{"identity-suite", "decoupling-suite", "gap-sum",
                                          "band-structure", "continuum-gap",    "szego",
                                          "dirac",          "index-suite"};
  return k;
}

json default_parameters(const std::string& kind) {
  if (kind == "identity-suite")
    return {{"instances", 500}, {"min_size", 4}, {"max_size", 24}, {"ky_fan_instances", 500},
            {"oracle_steps", 64}};
  if (kind == "decoupling-suite")
    return {{"instances", 500}, {"min_size", 4}, {"max_size", 24}, {"min_strict", 50},
            {"planted_degenerate", true}};
  if (kind == "gap-sum")
    return {{"layer_cake_instances", 100}, {"split_instances", 100}, {"tail_instances", 200},
            {"anchor_size", 4000},         {"sweep_sizes", {1001, 2001}},
            {"sweep_lambdas", 9},          {"constant_study_half_width", 400}};
  if (kind == "band-structure")
    return {{"beta", 1.0},
            {"theta_count", 64},
            {"edge_window", 0.2},
            {"discriminant_energies", 50},
            {"mathieu_e_min", -1.0},
            {"mathieu_e_max", 3.0},
            {"c3_betas", {0.25, 0.5, 1.0, 2.0}}};
  if (kind == "continuum-gap")
    return {{"points_per_period", 64}, {"periods", 40},       {"lambdas", 7},
            {"lambda_min", 0.1},       {"lambda_max", 10.0},  {"reference_lambda", 1.0}};
  if (kind == "szego")
    return {{"fekete_max", 160}, {"product_terms", 4096}, {"perturbation_b0", 1.5},
            {"coupling_sweep", {0.25, 0.5, 1.0, 1.5, 2.0, 3.0}}};
  if (kind == "dirac")
    return {{"instances", 100},
            {"half_modes", 32},
            {"well_half_modes", 64},
            {"symbol_points", 100000},
            {"box_length", 10.0},
            {"masses", {0.5, 1.0, 2.0, 4.0}},
            {"lambdas", {0.25, 0.5, 1.0, 2.0, 4.0}}};
  if (kind == "index-suite") return {{"instances", 300}, {"min_size", 2}, {"max_size", 16}};
  throw ScenarioError("unknown scenario kind '" + kind + "'", 0, 0);
}

namespace {

std::pair<std::size_t, std::size_t> position_of_offset(const std::string& text, std::size_t offset) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

/// Position of the first occurrence of "key" used as an object key.
std::pair<std::size_t, std::size_t> position_of_key(const std::string& text, const std::string& key) {
  const std::string quoted = json(key).dump();
  std::size_t pos = 0;
  while ((pos = text.find(quoted, pos)) != std::string::npos) {
    std::size_t after = pos + quoted.size();
    while (after < text.size() && std::isspace(static_cast<unsigned char>(text[after]))) ++after;
    if (after < text.size() && text[after] == ':') return position_of_offset(text, pos);
    pos = after;
  }
  return {0, 0};
}

[[noreturn]] void fail_at_key(const std::string& text, const std::string& key, const std::string& msg) {
  const auto [line, column] = position_of_key(text, key);
  throw ScenarioError(msg, line, column);
}

bool same_shape(const json& value, const json& reference) {
  if (reference.is_boolean()) return value.is_boolean();
  if (reference.is_number_unsigned() || reference.is_number_integer())
    return value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0);
  if (reference.is_number_float()) return value.is_number();
  if (reference.is_string()) return value.is_string();
  if (reference.is_array()) {
    if (!value.is_array() || value.empty()) return false;
    for (const json& v : value)
      if (!same_shape(v, reference.front())) return false;
    return true;
  }
  return false;
}

}  // namespace

Scenario parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = position_of_offset(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ScenarioError(std::string("malformed JSON: ") + e.what(), line, column);
  }
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object", 1, 1);
  for (const auto& [key, value] : doc.items()) {
    if (key != "name" && key != "kind" && key != "seed" && key != "parameters")
      fail_at_key(text, key, "unknown key '" + key + "'");
  }
  if (!doc.contains("kind") || !doc["kind"].is_string())
    throw ScenarioError("missing string key 'kind'", 1, 1);

  Scenario s;
  s.kind = doc["kind"].get<std::string>();
  if (std::find(kinds().begin(), kinds().end(), s.kind) == kinds().end())
    fail_at_key(text, "kind", "unknown scenario kind '" + s.kind + "'");
  s.name = s.kind;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) fail_at_key(text, "name", "'name' must be a string");
    s.name = doc["name"].get<std::string>();
  }
  if (doc.contains("seed")) {
    const json& seed = doc["seed"];
    if (!(seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0)))
      fail_at_key(text, "seed", "'seed' must be a nonnegative 64-bit integer");
    s.seed = seed.get<std::uint64_t>();
  }
  s.parameters = default_parameters(s.kind);
  if (doc.contains("parameters")) {
    const json& p = doc["parameters"];
    if (!p.is_object()) fail_at_key(text, "parameters", "'parameters' must be an object");
    for (const auto& [key, value] : p.items()) {
      if (!s.parameters.contains(key))
        fail_at_key(text, key, "unknown parameter '" + key + "' for kind " + s.kind);
      if (!same_shape(value, s.parameters[key]))
        fail_at_key(text, key, "parameter '" + key + "' has the wrong type");
      s.parameters[key] = value;
    }
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path.string(), 0, 0);
  std::ostringstream os;
  os << in.rdbuf();
  return parse_scenario(os.str());
}

}  // namespace ltgap::harness
