#include "polymine/lang/abac.hpp"

#include <algorithm>

#include "polymine/logic/formula.hpp"

namespace polymine::lang {

FactId AbacTemplate::rua_fact(int rule, int attval) const {
  Elem args[2] = {static_cast<Elem>(rule), static_cast<Elem>(attval)};
  return facts.id_of(rua, args);
}

FactId AbacTemplate::rpa_fact(int rule, int attval) const {
  Elem args[2] = {static_cast<Elem>(rule), static_cast<Elem>(attval)};
  return facts.id_of(rpa, args);
}

AbacTemplate build_abac(const std::vector<std::string>& users,
                        const std::vector<std::string>& perms,
                        const std::vector<std::string>& attvals,
                        const std::map<std::string, std::set<std::string>>& user_attrs,
                        const std::map<std::string, std::set<std::string>>& perm_attrs,
                        int n_rules) {
  if (n_rules < 1) throw ConfigError("rule count must be at least 1");
  if (attvals.empty()) throw ConfigError("attribute value set must be non-empty");
  AbacTemplate t;
  t.rules = n_rules;
  t.attvals = attvals;
  Structure& s = t.structure;
  s.set_carrier(s.users_sort(), users);
  s.set_carrier(s.perms_sort(), perms);
  std::vector<std::string> rule_names;
  for (int i = 1; i <= n_rules; ++i) rule_names.push_back("s" + std::to_string(i));
  t.rules_sort = s.add_sort("RULES", rule_names);
  t.attvals_sort = s.add_sort("ATTVALS", attvals);
  t.rua = s.add_relation("RUA", {t.rules_sort, t.attvals_sort}, false);
  t.rpa = s.add_relation("RPA", {t.rules_sort, t.attvals_sort}, false);
  logic::SymbolId uatt = s.add_relation("UAtt", {s.users_sort(), t.attvals_sort}, true);
  logic::SymbolId patt = s.add_relation("PAtt", {s.perms_sort(), t.attvals_sort}, true);

  auto fill = [&](logic::SymbolId rel, logic::SortId entity_sort,
                  const std::map<std::string, std::set<std::string>>& table) {
    for (const auto& [entity, attrs] : table) {
      Elem e = s.elem(entity_sort, entity);
      for (const auto& a : attrs) {
        Elem args[2] = {e, s.elem(t.attvals_sort, a)};
        s.add_rigid_tuple(rel, args);
      }
    }
  };
  fill(uatt, s.users_sort(), user_attrs);
  fill(patt, s.perms_sort(), perm_attrs);
  s.validate();

  logic::FormulaFactory mk(s);
  auto u = mk.var(0, s.users_sort(), "u");
  auto p = mk.var(1, s.perms_sort(), "p");
  std::vector<FormulaPtr> branches;
  for (int i = 0; i < n_rules; ++i) {
    auto rule = mk.lit(t.rules_sort, static_cast<Elem>(i));
    std::vector<FormulaPtr> conjuncts;
    for (std::size_t j = 0; j < attvals.size(); ++j) {
      auto a = mk.lit(t.attvals_sort, static_cast<Elem>(j));
      conjuncts.push_back(mk.implies(mk.rel(t.rua, {rule, a}), mk.rel(uatt, {u, a})));
      conjuncts.push_back(mk.implies(mk.rel(t.rpa, {rule, a}), mk.rel(patt, {p, a})));
    }
    branches.push_back(mk.conj(std::move(conjuncts)));
  }
  t.formula = mk.disj(std::move(branches));
  t.facts = logic::enumerate_random_facts(*t.formula, s);
  return t;
}

bool AbacPolicy::grants(const std::set<std::string>& user_attrs,
                        const std::set<std::string>& perm_attrs) const {
  for (const auto& rule : rules) {
    bool ok = std::includes(user_attrs.begin(), user_attrs.end(), rule.user_attrs.begin(),
                            rule.user_attrs.end()) &&
              std::includes(perm_attrs.begin(), perm_attrs.end(), rule.perm_attrs.begin(),
                            rule.perm_attrs.end());
    if (ok) return true;
  }
  return false;
}

AbacPolicy extract_abac(const AbacTemplate& t, const Interpretation& interp) {
  AbacPolicy pol;
  for (int i = 0; i < t.rules; ++i) {
    AbacRule rule;
    for (std::size_t j = 0; j < t.attvals.size(); ++j) {
      if (interp.value(t.rua_fact(i, static_cast<int>(j)))) rule.user_attrs.insert(t.attvals[j]);
      if (interp.value(t.rpa_fact(i, static_cast<int>(j)))) rule.perm_attrs.insert(t.attvals[j]);
    }
    pol.rules.push_back(std::move(rule));
  }
  return pol;
}

}  // namespace polymine::lang
