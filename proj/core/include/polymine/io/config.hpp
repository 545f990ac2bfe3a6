#pragma once

#include <map>
#include <string>
#include <vector>

#include "polymine/io/dataset.hpp"
#include "polymine/lang/starbac.hpp"
#include "polymine/mining/miner.hpp"

namespace polymine::io {

struct RunConfig {
  std::string language;  // rbac | rbac-reg | abac | abac-log | bm-rbac | xacml | starbac

  int roles = 2;            // rbac, rbac-reg, bm-rbac
  int rules = 2;            // abac
  int xacml_depth = 1;
  int xacml_breadth = 2;
  lang::StarbacConfig starbac;

  double lambda = 0.0;      // regularizer weight (lambda0 for abac-log)
  double lambda11 = 1.0;    // missed allowed entries
  double lambda12 = 1.0;    // granted denied entries
  double lambda2 = 0.0;     // over-grant on undecided requests

  mining::AnnealSchedule schedule;
  std::uint64_t seed = 1;
  int restarts = 1;

  int folds = 5;
  double fpr_cap = 0.05;
  std::vector<std::pair<std::string, std::vector<double>>> grid;
  int grid_budget = 64;

  int checkpoint_every = 25;
  int workers = 0;  // 0: use POLYMINE_WORKERS or hardware concurrency

  void validate_against(const Dataset& d) const;
};

RunConfig config_from_json(const std::string& text);
RunConfig config_from_json_file(const std::string& path);
std::string config_to_json(const RunConfig& c);

// Applies a grid-search point (keys like "lambda", "beta0", "alpha",
// "iterations", "restarts") onto a base configuration.
RunConfig apply_grid_point(const RunConfig& base, const std::map<std::string, double>& point);

}  // namespace polymine::io
