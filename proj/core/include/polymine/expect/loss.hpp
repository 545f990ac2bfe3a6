#pragma once

#include <memory>
#include <optional>
#include <string>

#include "polymine/expect/ground.hpp"

namespace polymine::expect {

// Objective functions are sums of per-request formula terms (contributing
// E[phi] or 1-E[phi]) and regularizer monomials over fact means. Monomial
// powers follow the Bernoulli-power rewrite: a factor with power n
// contributes mean(f)^n, which coincides with the exact value on 0/1 points.
struct LossExpression {
  struct FormulaTerm {
    double weight = 1.0;
    bool complement = false;  // weight * (1 - E[phi]) instead of weight * E[phi]
    FormulaPtr formula;
    Binding binding;
  };
  struct MonomialTerm {
    double weight = 1.0;
    std::vector<std::pair<FactId, int>> factors;  // (fact, power)
  };

  std::vector<FormulaTerm> formula_terms;
  std::vector<MonomialTerm> monomials;
  double constant = 0.0;
};

// Value of the objective at a concrete interpretation. Evaluates formulas
// through logic::eval_formula, independent of the decomposition engine.
double loss_at(const Structure& s, const LossExpression& loss, const Interpretation& interp,
               bool check_exclusive = false);

// Reference expectation; grounds every term afresh.
double expect_loss(const Structure& s, const FactSet& facts, const FactorDistribution& q,
                   const LossExpression& loss, std::optional<Pin> pin = std::nullopt);

// Owns the factor distribution of one miner run and keeps per-term node
// expectations cached. Pinning one fact touches only the terms whose formula
// instance mentions it; updating a pmf refreshes the same region. The
// grounded shape is immutable and shared: copies for further runs reuse it.
class CompiledLoss {
 public:
  CompiledLoss(const Structure& s, const FactSet& facts, const LossExpression& loss,
               FactorDistribution q, GroundOptions opts = {});
  // Reuses the compiled shape of an existing instance under fresh factors.
  CompiledLoss(const CompiledLoss& proto, FactorDistribution q);

  const FactorDistribution& q() const { return q_; }
  const FactSet& facts() const { return *facts_; }

  double total() const { return total_; }
  double recompute_total();  // resums cached term values, returns total

  // Recomputes every cached node value from the current factors; makes the
  // cache state a pure function of q (used to pin down resumability).
  void refresh_all();

  // E[loss] with one fact pinned; does not mutate any cache.
  double with_pin(FactId f, int value);
  // E[loss | f -> b] for every b in the fact's range.
  void with_all_pins(FactId f, std::vector<double>& out);
  std::vector<double> with_all_pins(FactId f);

  // Replace one factor pmf and refresh affected caches.
  void set_pmf(FactId f, std::span<const double> pmf);

  // Formula-term ids whose instance mentions the fact (for tests/diagnostics).
  std::span<const std::int32_t> terms_containing(FactId f) const;
  std::size_t term_count() const { return shared_->terms.size(); }
  double term_value(std::size_t t) const;

 private:
  struct Csr {
    std::vector<std::int32_t> off;
    std::vector<std::int32_t> pool;
    std::span<const std::int32_t> row(std::int32_t key) const {
      return {pool.data() + off[static_cast<std::size_t>(key)],
              static_cast<std::size_t>(off[static_cast<std::size_t>(key) + 1] -
                                       off[static_cast<std::size_t>(key)])};
    }
  };
  struct TermShape {
    double weight = 1.0;
    bool complement = false;
    Ground g;
    Csr affected;  // fact -> ancestor closure of the nodes mentioning it,
                   // ascending (= topological) order; dense over fact ids
  };
  struct Monomial {
    double weight = 1.0;
    std::vector<std::pair<FactId, int>> factors;
  };
  struct Shape {
    std::vector<TermShape> terms;
    std::vector<Monomial> monos;
    Csr fact_terms;  // fact -> formula-term ids
    Csr fact_monos;  // fact -> monomial ids
    double constant = 0.0;
    std::size_t max_nodes = 0;
  };

  double term_contribution(std::size_t t) const {
    const TermShape& shape = shared_->terms[t];
    double v = cache_[t][static_cast<std::size_t>(shape.g.root)];
    return shape.weight * (shape.complement ? 1.0 - v : v);
  }
  void refresh_term(std::size_t t);
  // Value of one node from scratch/cache child values.
  double node_value(const TermShape& shape, std::int32_t id, const Pin* pin,
                    const std::vector<double>& cache) const;
  double monomial_value(const Monomial& m, const Pin* pin) const;

  const Structure* s_ = nullptr;
  const FactSet* facts_ = nullptr;
  std::shared_ptr<const Shape> shared_;
  FactorDistribution q_;
  std::vector<std::vector<double>> cache_;  // per term, per node
  std::vector<double> mono_cache_;
  double total_ = 0.0;

  // shared scratch for affected walks
  std::vector<double> scratch_;
  std::vector<std::int32_t> stamp_;
  std::int32_t epoch_ = 0;
};

}  // namespace polymine::expect
