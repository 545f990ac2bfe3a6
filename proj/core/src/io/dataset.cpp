#include "polymine/io/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace polymine::io {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

int parse_int(const std::string& s, const std::string& what, int line_no) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  return v;
}

double parse_double(const std::string& s, const std::string& what, int line_no) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParseError("line " + std::to_string(line_no) + ": bad " + what + " '" + s + "'");
  }
}

template <class RowFn>
void for_each_row(const std::string& path, const RowFn& fn) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    fn(split_csv(t), line_no);
  }
}

void finalize_carriers(Dataset& d, const std::set<std::string>& users,
                       const std::set<std::string>& perms) {
  d.users.assign(users.begin(), users.end());
  d.perms.assign(perms.begin(), perms.end());
}

}  // namespace

Dataset load_matrix_csv(const std::string& path) {
  Dataset d;
  d.kind = Dataset::Kind::Matrix;
  std::set<std::string> users, perms;
  for_each_row(path, [&](const std::vector<std::string>& cells, int line_no) {
    if (cells.size() != 2)
      throw ParseError("line " + std::to_string(line_no) + ": expected user,permission");
    if (cells[0].empty() || cells[1].empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty field");
    users.insert(cells[0]);
    perms.insert(cells[1]);
    if (!d.matrix.emplace(cells[0], cells[1]).second)
      d.warnings.push_back("line " + std::to_string(line_no) + ": duplicate row " + cells[0] +
                           "," + cells[1]);
  });
  if (d.matrix.empty()) throw DataError("matrix file has no rows");
  finalize_carriers(d, users, perms);
  return d;
}

Dataset load_log_csv(const std::string& path) {
  Dataset d;
  d.kind = Dataset::Kind::Log;
  std::set<std::string> users, perms;
  std::map<std::string, bool> seen;  // full request key -> decision
  for_each_row(path, [&](const std::vector<std::string>& cells, int line_no) {
    if (cells.size() != 3 && cells.size() != 6 && cells.size() != 10)
      throw ParseError("line " + std::to_string(line_no) +
                       ": expected user,permission,decision[,month,day,hour[,ux,uy,px,py]]");
    LogEntry e;
    e.user = cells[0];
    e.perm = cells[1];
    if (e.user.empty() || e.perm.empty())
      throw ParseError("line " + std::to_string(line_no) + ": empty field");
    if (cells[2] == "allow") {
      e.allowed = true;
    } else if (cells[2] == "deny") {
      e.allowed = false;
    } else {
      throw ParseError("line " + std::to_string(line_no) + ": decision must be allow or deny, got '" +
                       cells[2] + "'");
    }
    if (cells.size() >= 6) {
      e.has_time = true;
      e.month = parse_int(cells[3], "month", line_no);
      e.day = parse_int(cells[4], "day", line_no);
      e.hour = parse_int(cells[5], "hour", line_no);
      if (e.month < 1 || e.month > 12 || e.day < 1 || e.day > 31 || e.hour < 1 || e.hour > 24)
        throw ParseError("line " + std::to_string(line_no) + ": time instant out of range");
    }
    if (cells.size() == 10) {
      e.has_positions = true;
      e.ux = parse_double(cells[6], "ux", line_no);
      e.uy = parse_double(cells[7], "uy", line_no);
      e.px = parse_double(cells[8], "px", line_no);
      e.py = parse_double(cells[9], "py", line_no);
      if (!std::isfinite(e.ux) || !std::isfinite(e.uy) || !std::isfinite(e.px) ||
          !std::isfinite(e.py))
        throw ParseError("line " + std::to_string(line_no) + ": non-finite position");
    }
    users.insert(e.user);
    perms.insert(e.perm);

    std::string key = e.user + "\x1f" + e.perm;
    if (e.has_time)
      key += "\x1f" + std::to_string(e.month) + "-" + std::to_string(e.day) + "-" +
             std::to_string(e.hour);
    if (e.has_positions)
      key += "\x1f" + std::to_string(e.ux) + ";" + std::to_string(e.uy) + ";" +
             std::to_string(e.px) + ";" + std::to_string(e.py);
    auto [it, fresh] = seen.emplace(key, e.allowed);
    if (!fresh) {
      if (it->second != e.allowed)
        throw DataError("line " + std::to_string(line_no) + ": request " + e.user + "," + e.perm +
                        " appears both allowed and denied");
      d.warnings.push_back("line " + std::to_string(line_no) + ": duplicate request, dropped");
      return;
    }
    d.log.push_back(std::move(e));
  });
  if (d.log.empty()) throw DataError("log file has no rows");
  finalize_carriers(d, users, perms);
  return d;
}

void load_attributes_csv(Dataset& d, const std::string& path, const std::string& side) {
  if (side != "user" && side != "perm") throw ConfigError("attribute side must be user or perm");
  auto& table = side == "user" ? d.user_attrs : d.perm_attrs;
  const auto& known = side == "user" ? d.users : d.perms;
  std::set<std::string> vals(d.attvals.begin(), d.attvals.end());
  for_each_row(path, [&](const std::vector<std::string>& cells, int line_no) {
    if (cells.size() != 2)
      throw ParseError("line " + std::to_string(line_no) + ": expected entity,attribute");
    if (!std::binary_search(known.begin(), known.end(), cells[0])) {
      d.warnings.push_back("line " + std::to_string(line_no) + ": attribute row for unknown " +
                           side + " '" + cells[0] + "', ignored");
      return;
    }
    table[cells[0]].insert(cells[1]);
    vals.insert(cells[1]);
  });
  d.attvals.assign(vals.begin(), vals.end());
}

void load_buildings_json(Dataset& d, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad buildings document: ") + e.what());
  }
  d.buildings.clear();
  for (const auto& jb : doc) {
    lang::Building b;
    b.name = jb.at("name").get<std::string>();
    b.x0 = jb.at("x0").get<double>();
    b.y0 = jb.at("y0").get<double>();
    b.x1 = jb.at("x1").get<double>();
    b.y1 = jb.at("y1").get<double>();
    d.buildings.push_back(std::move(b));
  }
}

void save_log_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path);
  for (const auto& e : d.log) {
    out << e.user << "," << e.perm << "," << (e.allowed ? "allow" : "deny");
    if (e.has_time) out << "," << e.month << "," << e.day << "," << e.hour;
    if (e.has_positions) out << "," << e.ux << "," << e.uy << "," << e.px << "," << e.py;
    out << "\n";
  }
}

}  // namespace polymine::io
