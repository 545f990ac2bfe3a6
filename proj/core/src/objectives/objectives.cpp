#include "polymine/objectives/objectives.hpp"

namespace polymine::objectives {

using logic::FactId;

namespace {

void add_fact_term(LossExpression& loss, FactId f, double weight) {
  if (weight == 0) return;
  LossExpression::MonomialTerm m;
  m.weight = weight;
  m.factors = {{f, 1}};
  loss.monomials.push_back(std::move(m));
}

}  // namespace

LossExpression symmetric_difference_loss(const FormulaPtr& formula,
                                         const std::vector<Binding>& requests,
                                         const std::vector<bool>& granted) {
  if (requests.size() != granted.size())
    throw ConfigError("request list and authorization flags differ in length");
  LossExpression loss;
  for (std::size_t i = 0; i < requests.size(); ++i) {
    LossExpression::FormulaTerm term;
    term.formula = formula;
    term.binding = requests[i];
    term.complement = granted[i];  // granted: 1 - E[phi]; otherwise E[phi]
    loss.formula_terms.push_back(std::move(term));
  }
  return loss;
}

void add_log_loss(LossExpression& loss, const FormulaPtr& formula,
                  const std::vector<Binding>& allowed, const std::vector<Binding>& denied,
                  double w_allow, double w_deny) {
  for (const auto& b : allowed) {
    LossExpression::FormulaTerm term;
    term.formula = formula;
    term.binding = b;
    term.complement = true;
    term.weight = w_allow;
    loss.formula_terms.push_back(std::move(term));
  }
  for (const auto& b : denied) {
    LossExpression::FormulaTerm term;
    term.formula = formula;
    term.binding = b;
    term.weight = w_deny;
    loss.formula_terms.push_back(std::move(term));
  }
}

void add_overgrant_loss(LossExpression& loss, const FormulaPtr& formula,
                        const std::vector<Binding>& undecided, double weight) {
  if (weight == 0) return;
  for (const auto& b : undecided) {
    LossExpression::FormulaTerm term;
    term.formula = formula;
    term.binding = b;
    term.weight = weight;
    loss.formula_terms.push_back(std::move(term));
  }
}

void add_rbac_complexity(LossExpression& loss, const lang::RbacTemplate& t, double lambda) {
  if (lambda == 0) return;
  const auto& s = t.structure;
  std::size_t n_users = s.sort(s.users_sort()).size();
  std::size_t n_perms = s.sort(s.perms_sort()).size();
  for (int i = 0; i < t.roles; ++i) {
    for (std::size_t u = 0; u < n_users; ++u)
      add_fact_term(loss, t.ua_fact(static_cast<logic::Elem>(u), i), lambda);
    for (std::size_t p = 0; p < n_perms; ++p)
      add_fact_term(loss, t.pa_fact(i, static_cast<logic::Elem>(p)), lambda);
  }
}

void add_abac_complexity(LossExpression& loss, const lang::AbacTemplate& t, double lambda) {
  if (lambda == 0) return;
  for (int i = 0; i < t.rules; ++i)
    for (std::size_t j = 0; j < t.attvals.size(); ++j) {
      add_fact_term(loss, t.rua_fact(i, static_cast<int>(j)), lambda);
      add_fact_term(loss, t.rpa_fact(i, static_cast<int>(j)), lambda);
    }
}

void add_bm_rbac_complexity(LossExpression& loss, const lang::BmRbacTemplate& t, double lambda) {
  if (lambda == 0) return;
  const auto& rbac = t.rbac;
  std::size_t n_users = t.user_combo.size();
  double scale = lambda / static_cast<double>(n_users);
  for (std::size_t u = 0; u < n_users; ++u) {
    for (std::size_t v = 0; v < n_users; ++v) {
      if (t.user_combo[u] != t.user_combo[v]) continue;
      for (int i = 0; i < rbac.roles; ++i) {
        FactId fu = rbac.ua_fact(static_cast<logic::Elem>(u), i);
        FactId fv = rbac.ua_fact(static_cast<logic::Elem>(v), i);
        LossExpression::MonomialTerm lin;
        lin.weight = scale;
        lin.factors = {{fu, 1}};
        loss.monomials.push_back(std::move(lin));
        LossExpression::MonomialTerm quad;
        quad.weight = -2.0 * scale;
        quad.factors = {{fu, 2}, {fv, 1}};
        loss.monomials.push_back(std::move(quad));
      }
    }
  }
}

void add_xacml_complexity(LossExpression& loss, const lang::XacmlTemplate& t, double lambda) {
  if (lambda == 0) return;
  int n = static_cast<int>(t.node_names.size());
  for (int i = 0; i < n; ++i) {
    add_fact_term(loss, t.active_fact(i), lambda);
    for (std::size_t a = 0; a < t.attvals.size(); ++a) {
      LossExpression::MonomialTerm m;
      m.weight = lambda;
      m.factors = {{t.active_fact(i), 1},
                   {t.isrule_fact(i), 1},
                   {t.req_fact(i, static_cast<int>(a)), 1}};
      loss.monomials.push_back(std::move(m));
    }
  }
}

void add_starbac_complexity(LossExpression& loss, const lang::StarbacTemplate& t, double lambda,
                            const StarbacComplexityWeights& w) {
  if (lambda == 0) return;
  for (int i = 0; i < t.config.roles; ++i)
    for (int side = 0; side < 2; ++side) {
      for (int k = 0; k < t.config.spatial_slots; ++k)
        add_fact_term(loss, t.sp_en_fact(t.sslot(i, side, k)), lambda * w.spatial);
      for (int j = 0; j < t.config.temporal_slots; ++j) {
        int slot = t.tslot(i, side, j);
        for (int m = 1; m <= 12; ++m) add_fact_term(loss, t.pm_fact(slot, m), lambda * w.month);
        for (int d = 1; d <= 31; ++d) add_fact_term(loss, t.pd_fact(slot, d), lambda * w.day);
        for (int h = 1; h <= 24; ++h) add_fact_term(loss, t.ph_fact(slot, h), lambda * w.hour);
      }
    }
}

}  // namespace polymine::objectives
