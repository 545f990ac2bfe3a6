#pragma once

#include "polymine/expect/loss.hpp"
#include "polymine/lang/abac.hpp"
#include "polymine/lang/rbac.hpp"
#include "polymine/lang/starbac.hpp"
#include "polymine/lang/xacml.hpp"

namespace polymine::objectives {

using expect::LossExpression;
using logic::Binding;
using logic::FormulaPtr;

// Size of the symmetric difference between the authorization relation and
// the policy-induced relation, summed over the given requests:
// sum over granted requests of (1 - phi) plus sum over others of phi.
LossExpression symmetric_difference_loss(const FormulaPtr& formula,
                                         const std::vector<Binding>& requests,
                                         const std::vector<bool>& granted);

// Log objective pieces: weighted misses on allowed entries, weighted grants
// on denied entries, and a weighted over-grant penalty on undecided requests.
void add_log_loss(LossExpression& loss, const FormulaPtr& formula,
                  const std::vector<Binding>& allowed, const std::vector<Binding>& denied,
                  double w_allow, double w_deny);
void add_overgrant_loss(LossExpression& loss, const FormulaPtr& formula,
                        const std::vector<Binding>& undecided, double weight);

// Sizes of the UA and PA relations.
void add_rbac_complexity(LossExpression& loss, const lang::RbacTemplate& t, double lambda);

// Number of attribute values required across rules.
void add_abac_complexity(LossExpression& loss, const lang::AbacTemplate& t, double lambda);

// Pairwise role-disagreement between users sharing an attribute combination,
// through the Bernoulli-power rewrite of the disagreement expression;
// normalized by the user count.
void add_bm_rbac_complexity(LossExpression& loss, const lang::BmRbacTemplate& t, double lambda);

// One unit per active node plus the attribute values required by rules.
void add_xacml_complexity(LossExpression& loss, const lang::XacmlTemplate& t, double lambda);

struct StarbacComplexityWeights {
  double spatial = 1.0;
  double month = 1.0;
  double day = 1.0;
  double hour = 1.0;
};

// Enabled spatial slots plus calendar memberships of the temporal slots.
void add_starbac_complexity(LossExpression& loss, const lang::StarbacTemplate& t, double lambda,
                            const StarbacComplexityWeights& w = {});

}  // namespace polymine::objectives
