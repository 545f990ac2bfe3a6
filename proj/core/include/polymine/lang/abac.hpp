#pragma once

#include <map>
#include <set>
#include <string>

#include "polymine/logic/facts.hpp"

namespace polymine::lang {

using logic::Elem;
using logic::FactId;
using logic::FactSet;
using logic::FormulaPtr;
using logic::Interpretation;
using logic::Structure;

// Rule constants s1..sN over rigid UAtt/PAtt attribute tables; flexible
// RUA/RPA state which attribute values each rule requires. Free variables:
// u (0, USERS), p (1, PERMS).
struct AbacTemplate {
  Structure structure;
  FormulaPtr formula;
  FactSet facts;
  int rules = 0;
  std::vector<std::string> attvals;
  logic::SymbolId rua = -1, rpa = -1;
  logic::SortId rules_sort = -1, attvals_sort = -1;

  FactId rua_fact(int rule, int attval) const;
  FactId rpa_fact(int rule, int attval) const;
};

AbacTemplate build_abac(const std::vector<std::string>& users,
                        const std::vector<std::string>& perms,
                        const std::vector<std::string>& attvals,
                        const std::map<std::string, std::set<std::string>>& user_attrs,
                        const std::map<std::string, std::set<std::string>>& perm_attrs,
                        int n_rules);

struct AbacRule {
  std::set<std::string> user_attrs;
  std::set<std::string> perm_attrs;
};

struct AbacPolicy {
  std::vector<AbacRule> rules;

  // Grants when some rule's requirements are contained in the request's
  // user- and permission-attribute sets.
  bool grants(const std::set<std::string>& user_attrs,
              const std::set<std::string>& perm_attrs) const;
};

AbacPolicy extract_abac(const AbacTemplate& t, const Interpretation& interp);

}  // namespace polymine::lang
