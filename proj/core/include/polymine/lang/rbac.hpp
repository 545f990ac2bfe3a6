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

// Template with role constants r1..rN and flexible UA/PA relations; free
// variables are u (0, USERS) and p (1, PERMS).
struct RbacTemplate {
  Structure structure;
  FormulaPtr formula;
  FactSet facts;
  int roles = 0;
  logic::SymbolId ua = -1, pa = -1;
  logic::SortId roles_sort = -1;

  FactId ua_fact(Elem user, int role) const;
  FactId pa_fact(int role, Elem perm) const;
};

RbacTemplate build_rbac(const std::vector<std::string>& users,
                        const std::vector<std::string>& perms, int n_roles);

struct RbacPolicy {
  int roles = 0;
  std::vector<std::set<std::string>> role_users;
  std::vector<std::set<std::string>> role_perms;

  bool grants(const std::string& user, const std::string& perm) const;
};

RbacPolicy extract_rbac(const RbacTemplate& t, const Interpretation& interp);

// Attribute-constrained variant: the rigid AA table assigns exactly one
// attribute combination to every user.
struct BmRbacTemplate {
  RbacTemplate rbac;
  std::vector<std::string> combos;  // attribute-combination carrier
  std::vector<int> user_combo;      // per user index
};

// Rows are (user, attribute-combination); conflicting rows for one user are
// rejected, every user must be covered.
BmRbacTemplate build_bm_rbac(const std::vector<std::string>& users,
                             const std::vector<std::string>& perms,
                             const std::vector<std::pair<std::string, std::string>>& attr_rows,
                             int n_roles);

}  // namespace polymine::lang
