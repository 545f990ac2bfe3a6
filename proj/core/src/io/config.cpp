#include "polymine/io/config.hpp"

#include <fstream>
#include <set>

#include <json.hpp>

namespace polymine::io {

using nlohmann::json;

namespace {

const std::set<std::string> kLanguages = {"rbac",    "rbac-reg", "abac", "abac-log",
                                          "bm-rbac", "xacml",    "starbac"};

}  // namespace

void RunConfig::validate_against(const Dataset& d) const {
  if (!kLanguages.count(language)) throw ConfigError("unknown language '" + language + "'");
  schedule.validate();
  if (restarts < 1) throw ConfigError("restarts must be at least 1");
  if (lambda < 0 || lambda11 < 0 || lambda12 < 0 || lambda2 < 0)
    throw ConfigError("objective weights must be non-negative");
  bool needs_log = language == "abac-log" || language == "starbac";
  bool needs_matrix = language == "rbac" || language == "rbac-reg" || language == "bm-rbac";
  if (needs_log && d.kind != Dataset::Kind::Log)
    throw ConfigError(language + " mines from a request log");
  if (needs_matrix && d.kind != Dataset::Kind::Matrix)
    throw ConfigError(language + " mines from a permission-assignment matrix");
  if (language == "starbac") {
    for (const auto& e : d.log)
      if (!e.has_time || !e.has_positions)
        throw ConfigError("starbac needs log rows with time and positions");
  }
  if (language == "abac" || language == "abac-log") {
    if (d.user_attrs.empty() || d.perm_attrs.empty())
      throw ConfigError(language + " needs user and permission attribute tables");
  }
  if (language == "bm-rbac" && d.user_attrs.empty())
    throw ConfigError("bm-rbac needs a user attribute table");
}

RunConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad config document: ") + e.what());
  }
  RunConfig c;
  if (!doc.contains("language")) throw ConfigError("config is missing \"language\"");
  c.language = doc.at("language").get<std::string>();
  c.roles = doc.value("roles", c.roles);
  c.rules = doc.value("rules", c.rules);
  if (doc.contains("xacml")) {
    c.xacml_depth = doc["xacml"].value("depth", c.xacml_depth);
    c.xacml_breadth = doc["xacml"].value("breadth", c.xacml_breadth);
  }
  if (doc.contains("starbac")) {
    const auto& js = doc["starbac"];
    c.starbac.roles = js.value("roles", c.starbac.roles);
    c.starbac.spatial_slots = js.value("spatial_slots", c.starbac.spatial_slots);
    c.starbac.temporal_slots = js.value("temporal_slots", c.starbac.temporal_slots);
    c.starbac.max_distance = js.value("max_distance", c.starbac.max_distance);
  }
  if (doc.contains("objective")) {
    const auto& jo = doc["objective"];
    c.lambda = jo.value("lambda", c.lambda);
    c.lambda11 = jo.value("lambda11", c.lambda11);
    c.lambda12 = jo.value("lambda12", c.lambda12);
    c.lambda2 = jo.value("lambda2", c.lambda2);
  }
  if (doc.contains("schedule")) {
    const auto& js = doc["schedule"];
    c.schedule.beta0 = js.value("beta0", c.schedule.beta0);
    c.schedule.alpha = js.value("alpha", c.schedule.alpha);
    c.schedule.iterations = js.value("iterations", c.schedule.iterations);
  }
  c.seed = doc.value("seed", c.seed);
  c.restarts = doc.value("restarts", c.restarts);
  c.folds = doc.value("folds", c.folds);
  c.fpr_cap = doc.value("fpr_cap", c.fpr_cap);
  if (doc.contains("grid")) {
    for (const auto& [name, values] : doc["grid"].items())
      c.grid.emplace_back(name, values.get<std::vector<double>>());
  }
  c.grid_budget = doc.value("grid_budget", c.grid_budget);
  c.checkpoint_every = doc.value("checkpoint_every", c.checkpoint_every);
  c.workers = doc.value("workers", c.workers);
  return c;
}

RunConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return config_from_json(text);
}

std::string config_to_json(const RunConfig& c) {
  json doc;
  doc["language"] = c.language;
  doc["roles"] = c.roles;
  doc["rules"] = c.rules;
  doc["xacml"] = {{"depth", c.xacml_depth}, {"breadth", c.xacml_breadth}};
  doc["starbac"] = {{"roles", c.starbac.roles},
                    {"spatial_slots", c.starbac.spatial_slots},
                    {"temporal_slots", c.starbac.temporal_slots},
                    {"max_distance", c.starbac.max_distance}};
  doc["objective"] = {{"lambda", c.lambda},
                      {"lambda11", c.lambda11},
                      {"lambda12", c.lambda12},
                      {"lambda2", c.lambda2}};
  doc["schedule"] = {{"beta0", c.schedule.beta0},
                     {"alpha", c.schedule.alpha},
                     {"iterations", c.schedule.iterations}};
  doc["seed"] = c.seed;
  doc["restarts"] = c.restarts;
  doc["folds"] = c.folds;
  doc["fpr_cap"] = c.fpr_cap;
  json grid = json::object();
  for (const auto& [name, values] : c.grid) grid[name] = values;
  doc["grid"] = std::move(grid);
  doc["grid_budget"] = c.grid_budget;
  doc["checkpoint_every"] = c.checkpoint_every;
  doc["workers"] = c.workers;
  return doc.dump(2);
}

RunConfig apply_grid_point(const RunConfig& base, const std::map<std::string, double>& point) {
  RunConfig c = base;
  for (const auto& [name, value] : point) {
    if (name == "lambda")
      c.lambda = value;
    else if (name == "lambda11")
      c.lambda11 = value;
    else if (name == "lambda12")
      c.lambda12 = value;
    else if (name == "lambda2")
      c.lambda2 = value;
    else if (name == "beta0")
      c.schedule.beta0 = value;
    else if (name == "alpha")
      c.schedule.alpha = value;
    else if (name == "iterations")
      c.schedule.iterations = static_cast<int>(value);
    else if (name == "restarts")
      c.restarts = static_cast<int>(value);
    else if (name == "roles")
      c.roles = c.starbac.roles = static_cast<int>(value);
    else if (name == "rules")
      c.rules = static_cast<int>(value);
    else
      throw ConfigError("unknown grid dimension '" + name + "'");
  }
  return c;
}

}  // namespace polymine::io
