#pragma once

#include "polymine/expect/loss.hpp"
#include "polymine/mining/rng.hpp"

namespace polymine::test {

// Test-only oracle: a mixed-radix sweep over every interpretation, weighting
// logic::eval_formula outcomes by the product of factor masses. Independent
// of the decomposition engine.
inline double exhaustive_expect(const logic::Structure& s, const logic::FactSet& facts,
                                const expect::FactorDistribution& q, const logic::Formula& f,
                                const logic::Binding& binding) {
  std::size_t states = 1;
  for (std::size_t i = 0; i < facts.size(); ++i)
    states *= static_cast<std::size_t>(facts.range_size(static_cast<logic::FactId>(i)));
  logic::Interpretation interp = logic::Interpretation::zeros(facts);
  double total = 0;
  for (std::size_t ix = 0; ix < states; ++ix) {
    std::size_t rest = ix;
    double weight = 1;
    for (std::size_t i = facts.size(); i-- > 0;) {
      int range = facts.range_size(static_cast<logic::FactId>(i));
      int v = static_cast<int>(rest % static_cast<std::size_t>(range));
      rest /= static_cast<std::size_t>(range);
      interp.set(static_cast<logic::FactId>(i), v);
      weight *= q.pmf(static_cast<logic::FactId>(i))[static_cast<std::size_t>(v)];
    }
    if (weight == 0) continue;
    total += weight * (logic::eval_formula(s, interp, binding, f) ? 1.0 : 0.0);
  }
  return total;
}

// Same sweep for a whole objective, valuing every interpretation through
// expect::loss_at.
inline double exhaustive_loss_mean(const logic::Structure& s, const logic::FactSet& facts,
                                   const expect::FactorDistribution& q,
                                   const expect::LossExpression& loss) {
  std::size_t states = 1;
  for (std::size_t i = 0; i < facts.size(); ++i)
    states *= static_cast<std::size_t>(facts.range_size(static_cast<logic::FactId>(i)));
  logic::Interpretation interp = logic::Interpretation::zeros(facts);
  double total = 0;
  for (std::size_t ix = 0; ix < states; ++ix) {
    std::size_t rest = ix;
    double weight = 1;
    for (std::size_t i = facts.size(); i-- > 0;) {
      int range = facts.range_size(static_cast<logic::FactId>(i));
      int v = static_cast<int>(rest % static_cast<std::size_t>(range));
      rest /= static_cast<std::size_t>(range);
      interp.set(static_cast<logic::FactId>(i), v);
      weight *= q.pmf(static_cast<logic::FactId>(i))[static_cast<std::size_t>(v)];
    }
    if (weight == 0) continue;
    total += weight * expect::loss_at(s, loss, interp);
  }
  return total;
}

inline expect::FactorDistribution random_factors(const logic::Structure& s,
                                                 const logic::FactSet& facts, mining::Rng& rng) {
  expect::FactorDistribution q(s, facts);
  std::vector<double> pmf;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    int k = facts.range_size(static_cast<logic::FactId>(i));
    pmf.resize(static_cast<std::size_t>(k));
    double sum = 0;
    for (auto& m : pmf) {
      m = 0.05 + rng.uniform();
      sum += m;
    }
    for (auto& m : pmf) m /= sum;
    q.set_pmf(static_cast<logic::FactId>(i), pmf);
  }
  return q;
}

inline logic::Interpretation random_interp(const logic::FactSet& facts, mining::Rng& rng) {
  logic::Interpretation interp = logic::Interpretation::zeros(facts);
  for (std::size_t i = 0; i < facts.size(); ++i)
    interp.set(static_cast<logic::FactId>(i),
               static_cast<int>(rng.below(
                   static_cast<std::uint64_t>(facts.range_size(static_cast<logic::FactId>(i))))));
  return interp;
}

inline logic::Interpretation sample_interp(const logic::FactSet& facts,
                                           const expect::FactorDistribution& q,
                                           mining::Rng& rng) {
  logic::Interpretation interp = logic::Interpretation::zeros(facts);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    auto pmf = q.pmf(static_cast<logic::FactId>(i));
    double x = rng.uniform();
    int v = 0;
    double acc = 0;
    for (std::size_t b = 0; b < pmf.size(); ++b) {
      acc += pmf[b];
      if (x < acc) {
        v = static_cast<int>(b);
        break;
      }
      v = static_cast<int>(b);
    }
    interp.set(static_cast<logic::FactId>(i), v);
  }
  return interp;
}

}  // namespace polymine::test
