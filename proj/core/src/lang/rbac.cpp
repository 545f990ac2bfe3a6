#include "polymine/lang/rbac.hpp"

#include <algorithm>

#include "polymine/logic/formula.hpp"

namespace polymine::lang {

FactId RbacTemplate::ua_fact(Elem user, int role) const {
  Elem args[2] = {user, static_cast<Elem>(role)};
  return facts.id_of(ua, args);
}

FactId RbacTemplate::pa_fact(int role, Elem perm) const {
  Elem args[2] = {static_cast<Elem>(role), perm};
  return facts.id_of(pa, args);
}

RbacTemplate build_rbac(const std::vector<std::string>& users,
                        const std::vector<std::string>& perms, int n_roles) {
  if (n_roles < 1) throw ConfigError("role count must be at least 1");
  RbacTemplate t;
  t.roles = n_roles;
  Structure& s = t.structure;
  s.set_carrier(s.users_sort(), users);
  s.set_carrier(s.perms_sort(), perms);
  std::vector<std::string> role_names;
  for (int i = 1; i <= n_roles; ++i) role_names.push_back("r" + std::to_string(i));
  t.roles_sort = s.add_sort("ROLES", role_names);
  t.ua = s.add_relation("UA", {s.users_sort(), t.roles_sort}, false);
  t.pa = s.add_relation("PA", {t.roles_sort, s.perms_sort()}, false);
  s.validate();

  logic::FormulaFactory mk(s);
  auto u = mk.var(0, s.users_sort(), "u");
  auto p = mk.var(1, s.perms_sort(), "p");
  std::vector<FormulaPtr> branches;
  for (int i = 0; i < n_roles; ++i) {
    auto role = mk.lit(t.roles_sort, static_cast<Elem>(i));
    branches.push_back(mk.conj({mk.rel(t.ua, {u, role}), mk.rel(t.pa, {role, p})}));
  }
  t.formula = mk.disj(std::move(branches));
  t.facts = logic::enumerate_random_facts(*t.formula, s);
  return t;
}

bool RbacPolicy::grants(const std::string& user, const std::string& perm) const {
  for (int i = 0; i < roles; ++i)
    if (role_users[static_cast<std::size_t>(i)].count(user) &&
        role_perms[static_cast<std::size_t>(i)].count(perm))
      return true;
  return false;
}

RbacPolicy extract_rbac(const RbacTemplate& t, const Interpretation& interp) {
  RbacPolicy pol;
  pol.roles = t.roles;
  pol.role_users.resize(static_cast<std::size_t>(t.roles));
  pol.role_perms.resize(static_cast<std::size_t>(t.roles));
  const Structure& s = t.structure;
  std::size_t n_users = s.sort(s.users_sort()).size();
  std::size_t n_perms = s.sort(s.perms_sort()).size();
  for (int i = 0; i < t.roles; ++i) {
    for (std::size_t u = 0; u < n_users; ++u)
      if (interp.value(t.ua_fact(static_cast<Elem>(u), i)))
        pol.role_users[static_cast<std::size_t>(i)].insert(
            s.elem_name(s.users_sort(), static_cast<Elem>(u)));
    for (std::size_t p = 0; p < n_perms; ++p)
      if (interp.value(t.pa_fact(i, static_cast<Elem>(p))))
        pol.role_perms[static_cast<std::size_t>(i)].insert(
            s.elem_name(s.perms_sort(), static_cast<Elem>(p)));
  }
  return pol;
}

BmRbacTemplate build_bm_rbac(const std::vector<std::string>& users,
                             const std::vector<std::string>& perms,
                             const std::vector<std::pair<std::string, std::string>>& attr_rows,
                             int n_roles) {
  BmRbacTemplate t;
  t.rbac = build_rbac(users, perms, n_roles);

  std::map<std::string, std::string> combo_of;
  for (const auto& [u, combo] : attr_rows) {
    if (std::find(users.begin(), users.end(), u) == users.end())
      throw DataError("attribute row for unknown user '" + u + "'");
    auto [it, fresh] = combo_of.emplace(u, combo);
    if (!fresh && it->second != combo)
      throw DataError("user '" + u + "' is assigned more than one attribute combination");
  }
  for (const auto& u : users)
    if (!combo_of.count(u)) throw DataError("user '" + u + "' has no attribute combination");

  std::set<std::string> combo_set;
  for (const auto& [u, combo] : combo_of) combo_set.insert(combo);
  t.combos.assign(combo_set.begin(), combo_set.end());

  Structure& s = t.rbac.structure;
  logic::SortId avals = s.add_sort("AVALS", t.combos);
  logic::SymbolId aa = s.add_relation("AA", {s.users_sort(), avals}, true);
  t.user_combo.resize(users.size());
  for (std::size_t u = 0; u < users.size(); ++u) {
    const std::string& combo = combo_of.at(users[u]);
    int c = static_cast<int>(std::lower_bound(t.combos.begin(), t.combos.end(), combo) -
                             t.combos.begin());
    t.user_combo[u] = c;
    Elem args[2] = {static_cast<Elem>(u), static_cast<Elem>(c)};
    s.add_rigid_tuple(aa, args);
  }
  return t;
}

}  // namespace polymine::lang
