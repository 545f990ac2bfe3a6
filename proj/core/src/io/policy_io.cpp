#include "polymine/io/policy_io.hpp"

#include <fstream>

#include <json.hpp>

namespace polymine::io {

using nlohmann::json;

namespace {

json xacml_node_to_json(const lang::XacmlNode& n) {
  if (n.is_rule) {
    return json{{"rule", {{"decision", n.allow ? "allow" : "deny"},
                          {"attrs", std::vector<std::string>(n.attrs.begin(), n.attrs.end())}}}};
  }
  json children = json::array();
  for (const auto& c : n.children) children.push_back(xacml_node_to_json(c));
  return json{{"policy", {{"comb", n.comb}, {"children", std::move(children)}}}};
}

lang::XacmlNode xacml_node_from_json(const json& j) {
  if (j.contains("rule")) {
    const auto& r = j.at("rule");
    std::set<std::string> attrs;
    for (const auto& a : r.value("attrs", std::vector<std::string>{})) attrs.insert(a);
    return lang::XacmlNode::rule(r.at("decision").get<std::string>() == "allow",
                                 std::move(attrs));
  }
  const auto& p = j.at("policy");
  std::vector<lang::XacmlNode> children;
  for (const auto& c : p.value("children", json::array()))
    children.push_back(xacml_node_from_json(c));
  return lang::XacmlNode::policy(p.at("comb").get<std::string>(), std::move(children));
}

json periodic_to_json(const lang::PeriodicExpression& pe) {
  return json{{"months", std::vector<int>(pe.months.begin(), pe.months.end())},
              {"days", std::vector<int>(pe.days.begin(), pe.days.end())},
              {"hours", std::vector<int>(pe.hours.begin(), pe.hours.end())},
              {"window", pe.window}};
}

lang::PeriodicExpression periodic_from_json(const json& j) {
  lang::PeriodicExpression pe;
  for (int m : j.value("months", std::vector<int>{})) pe.months.insert(m);
  for (int d : j.value("days", std::vector<int>{})) pe.days.insert(d);
  for (int h : j.value("hours", std::vector<int>{})) pe.hours.insert(h);
  pe.window = j.value("window", 1);
  return pe;
}

json side_to_json(const lang::StarbacSide& side) {
  json spatial = json::array();
  for (const auto& sc : side.spatial)
    spatial.push_back(json{{"negated", sc.negated},
                           {"distance", sc.distance},
                           {"building", sc.building}});
  json temporal = json::array();
  for (const auto& pe : side.temporal) temporal.push_back(periodic_to_json(pe));
  return json{{"spatial", std::move(spatial)}, {"temporal", std::move(temporal)}};
}

lang::StarbacSide side_from_json(const json& j) {
  lang::StarbacSide side;
  for (const auto& sc : j.value("spatial", json::array())) {
    lang::SpatialConstraint out;
    out.negated = sc.value("negated", false);
    out.distance = sc.at("distance").get<int>();
    out.building = sc.at("building").get<std::string>();
    side.spatial.push_back(std::move(out));
  }
  for (const auto& pe : j.value("temporal", json::array()))
    side.temporal.push_back(periodic_from_json(pe));
  return side;
}

}  // namespace

std::string policy_to_json(const MinedPolicy& p) {
  json doc;
  doc["language"] = p.language;
  if (const auto* rbac = std::get_if<lang::RbacPolicy>(&p.body)) {
    json roles = json::array();
    for (int i = 0; i < rbac->roles; ++i)
      roles.push_back(
          json{{"role", "r" + std::to_string(i + 1)},
               {"users", std::vector<std::string>(rbac->role_users[i].begin(),
                                                  rbac->role_users[i].end())},
               {"perms", std::vector<std::string>(rbac->role_perms[i].begin(),
                                                  rbac->role_perms[i].end())}});
    doc["roles"] = std::move(roles);
  } else if (const auto* abac = std::get_if<lang::AbacPolicy>(&p.body)) {
    json rules = json::array();
    for (const auto& r : abac->rules)
      rules.push_back(json{
          {"user_attrs", std::vector<std::string>(r.user_attrs.begin(), r.user_attrs.end())},
          {"perm_attrs", std::vector<std::string>(r.perm_attrs.begin(), r.perm_attrs.end())}});
    doc["rules"] = std::move(rules);
  } else if (const auto* tree = std::get_if<lang::XacmlNode>(&p.body)) {
    doc["tree"] = xacml_node_to_json(*tree);
  } else if (const auto* st = std::get_if<lang::StarbacPolicy>(&p.body)) {
    json roles = json::array();
    for (const auto& role : st->roles)
      roles.push_back(json{{"user_side", side_to_json(role.user_side)},
                           {"perm_side", side_to_json(role.perm_side)}});
    doc["roles"] = std::move(roles);
    json buildings = json::array();
    for (const auto& b : p.buildings)
      buildings.push_back(json{{"name", b.name},
                               {"x0", b.x0},
                               {"y0", b.y0},
                               {"x1", b.x1},
                               {"y1", b.y1}});
    doc["buildings"] = std::move(buildings);
  }
  return doc.dump(2);
}

MinedPolicy policy_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad policy document: ") + e.what());
  }
  MinedPolicy p;
  p.language = doc.at("language").get<std::string>();
  if (p.language == "rbac" || p.language == "rbac-reg" || p.language == "bm-rbac") {
    lang::RbacPolicy pol;
    const auto& roles = doc.at("roles");
    pol.roles = static_cast<int>(roles.size());
    for (const auto& jr : roles) {
      std::set<std::string> us, ps;
      for (const auto& u : jr.value("users", std::vector<std::string>{})) us.insert(u);
      for (const auto& q : jr.value("perms", std::vector<std::string>{})) ps.insert(q);
      pol.role_users.push_back(std::move(us));
      pol.role_perms.push_back(std::move(ps));
    }
    p.body = std::move(pol);
  } else if (p.language == "abac" || p.language == "abac-log") {
    lang::AbacPolicy pol;
    for (const auto& jr : doc.at("rules")) {
      lang::AbacRule rule;
      for (const auto& a : jr.value("user_attrs", std::vector<std::string>{}))
        rule.user_attrs.insert(a);
      for (const auto& a : jr.value("perm_attrs", std::vector<std::string>{}))
        rule.perm_attrs.insert(a);
      pol.rules.push_back(std::move(rule));
    }
    p.body = std::move(pol);
  } else if (p.language == "xacml") {
    p.body = xacml_node_from_json(doc.at("tree"));
  } else if (p.language == "starbac") {
    lang::StarbacPolicy pol;
    for (const auto& jr : doc.at("roles")) {
      lang::StarbacRole role;
      role.user_side = side_from_json(jr.at("user_side"));
      role.perm_side = side_from_json(jr.at("perm_side"));
      pol.roles.push_back(std::move(role));
    }
    p.body = std::move(pol);
    for (const auto& jb : doc.value("buildings", json::array())) {
      lang::Building b;
      b.name = jb.at("name").get<std::string>();
      b.x0 = jb.at("x0").get<double>();
      b.y0 = jb.at("y0").get<double>();
      b.x1 = jb.at("x1").get<double>();
      b.y1 = jb.at("y1").get<double>();
      p.buildings.push_back(std::move(b));
    }
  } else {
    throw ParseError("unknown policy language '" + p.language + "'");
  }
  return p;
}

MinedPolicy policy_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return policy_from_json(text);
}

}  // namespace polymine::io
