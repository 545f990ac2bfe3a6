#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "polymine/errors.hpp"
#include "polymine/lang/starbac.hpp"

namespace polymine::io {

struct LogEntry {
  std::string user, perm;
  bool allowed = false;
  bool has_time = false;
  int month = 0, day = 0, hour = 0;
  bool has_positions = false;
  double ux = 0, uy = 0, px = 0, py = 0;
};

// Either a permission-assignment matrix or a decided request log, plus the
// optional attribute tables the attribute-based languages need.
struct Dataset {
  enum class Kind { Matrix, Log };
  Kind kind = Kind::Matrix;

  std::vector<std::string> users, perms;  // sorted unique
  std::set<std::pair<std::string, std::string>> matrix;
  std::vector<LogEntry> log;

  std::map<std::string, std::set<std::string>> user_attrs, perm_attrs;
  std::vector<std::string> attvals;  // sorted union of attribute values

  std::vector<lang::Building> buildings;  // spatio-temporal geometry, optional

  std::vector<std::string> warnings;

  bool authorized(const std::string& user, const std::string& perm) const {
    return matrix.count({user, perm}) != 0;
  }
};

// Matrix rows: user,permission
Dataset load_matrix_csv(const std::string& path);

// Log rows: user,permission,decision[,month,day,hour[,ux,uy,px,py]]
Dataset load_log_csv(const std::string& path);

// Attribute rows: entity,attribute (side: "user" or "perm").
void load_attributes_csv(Dataset& d, const std::string& path, const std::string& side);

// JSON array of {"name","x0","y0","x1","y1"} rectangles.
void load_buildings_json(Dataset& d, const std::string& path);

void save_log_csv(const Dataset& d, const std::string& path);

}  // namespace polymine::io
