#pragma once

#include <string>
#include <variant>

#include "polymine/lang/abac.hpp"
#include "polymine/lang/rbac.hpp"
#include "polymine/lang/starbac.hpp"
#include "polymine/lang/xacml.hpp"

namespace polymine::io {

struct MinedPolicy {
  std::string language;
  std::variant<lang::RbacPolicy, lang::AbacPolicy, lang::XacmlNode, lang::StarbacPolicy> body;
  std::vector<lang::Building> buildings;  // starbac geometry context
};

std::string policy_to_json(const MinedPolicy& p);
MinedPolicy policy_from_json(const std::string& text);
MinedPolicy policy_from_json_file(const std::string& path);

}  // namespace polymine::io
