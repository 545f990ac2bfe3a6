#include "polymine/oracle/exact.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "polymine/logic/eval.hpp"

namespace polymine::oracle {

namespace {

using logic::Binding;
using logic::Elem;
using logic::FactId;
using logic::Formula;
using logic::FormulaKind;
using logic::SymbolKind;
using logic::Term;
using logic::TermKind;

constexpr std::size_t kMaxStates = std::size_t{1} << 20;
constexpr std::size_t kMaxComponentTable = std::size_t{1} << 16;

// Oracle-local dependency collector. The oracle deliberately shares nothing
// with the decomposition engine beyond the logic primitives: values come
// from logic::eval_formula only.
void term_deps(const Structure& s, const FactSet& facts, const Term& t, const Binding& b,
               std::vector<FactId>& out) {
  if (t.kind != TermKind::App) return;
  for (const auto& a : t.args) term_deps(s, facts, *a, b, out);
  if (!s.symbol(t.symbol).rigid) {
    std::function<Elem(const Term&)> ev = [&](const Term& u) -> Elem {
      switch (u.kind) {
        case TermKind::Var:
          return b.at(static_cast<std::size_t>(u.var));
        case TermKind::Lit:
          return u.lit;
        case TermKind::App: {
          std::vector<Elem> args(u.args.size());
          for (std::size_t i = 0; i < u.args.size(); ++i) args[i] = ev(*u.args[i]);
          if (!s.symbol(u.symbol).rigid)
            throw DecompositionError("nested flexible symbols are unsupported");
          return s.rigid_value(u.symbol, args);
        }
      }
      throw Error("unreachable");
    };
    std::vector<Elem> args(t.args.size());
    for (std::size_t i = 0; i < t.args.size(); ++i) args[i] = ev(*t.args[i]);
    out.push_back(facts.id_of(t.symbol, args));
  }
}

void formula_deps(const Structure& s, const FactSet& facts, const Formula& f, const Binding& b,
                  std::vector<FactId>& out) {
  switch (f.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return;
    case FormulaKind::Rel: {
      if (!s.symbol(f.symbol).rigid) {
        std::vector<Elem> args(f.args.size());
        for (std::size_t i = 0; i < f.args.size(); ++i) {
          std::function<Elem(const Term&)> ev = [&](const Term& u) -> Elem {
            switch (u.kind) {
              case TermKind::Var:
                return b.at(static_cast<std::size_t>(u.var));
              case TermKind::Lit:
                return u.lit;
              case TermKind::App: {
                std::vector<Elem> as(u.args.size());
                for (std::size_t j = 0; j < u.args.size(); ++j) as[j] = ev(*u.args[j]);
                return s.rigid_value(u.symbol, as);
              }
            }
            throw Error("unreachable");
          };
          args[i] = ev(*f.args[i]);
        }
        out.push_back(facts.id_of(f.symbol, args));
      } else {
        for (const auto& a : f.args) term_deps(s, facts, *a, b, out);
      }
      return;
    }
    case FormulaKind::Cmp:
      term_deps(s, facts, *f.lhs, b, out);
      term_deps(s, facts, *f.rhs, b, out);
      return;
    default:
      for (const auto& c : f.children) formula_deps(s, facts, *c, b, out);
  }
}

struct Component {
  std::vector<FactId> deps;  // sorted ascending; empty = constant
  std::vector<double> table; // value per joint assignment of deps (may be empty)
  double constant = 0.0;
  // direct-eval fallback when the joint is too large for a table
  const LossExpression::FormulaTerm* direct = nullptr;
  FactId deepest = -1;
};

struct Enumerator {
  const Structure& s;
  const FactSet& facts;
  std::vector<Component> comps;
  std::vector<std::vector<const Component*>> by_depth;
  double base = 0.0;
  Interpretation scratch;

  Enumerator(const Structure& s_, const FactSet& facts_, const LossExpression& loss)
      : s(s_), facts(facts_), scratch(Interpretation::zeros(facts_)) {
    std::size_t states = 1;
    for (std::size_t i = 0; i < facts.size(); ++i) {
      states *= static_cast<std::size_t>(facts.range_size(static_cast<FactId>(i)));
      if (states > kMaxStates)
        throw CapacityError("state space exceeds 2^20 interpretations");
    }
    base = loss.constant;

    for (const auto& ft : loss.formula_terms) {
      std::vector<FactId> deps;
      formula_deps(s, facts, *ft.formula, ft.binding, deps);
      std::sort(deps.begin(), deps.end());
      deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
      Component c;
      c.deps = std::move(deps);
      if (c.deps.empty()) {
        bool v = logic::eval_formula(s, scratch, ft.binding, *ft.formula);
        base += ft.weight * (ft.complement ? (v ? 0.0 : 1.0) : (v ? 1.0 : 0.0));
        continue;
      }
      std::size_t joint = 1;
      bool fits = true;
      for (FactId d : c.deps) {
        joint *= static_cast<std::size_t>(facts.range_size(d));
        if (joint > kMaxComponentTable) {
          fits = false;
          break;
        }
      }
      if (fits) {
        c.table.resize(joint);
        for (std::size_t ix = 0; ix < joint; ++ix) {
          std::size_t rest = ix;
          for (std::size_t i = c.deps.size(); i-- > 0;) {
            int range = facts.range_size(c.deps[i]);
            scratch.set(c.deps[i], static_cast<int>(rest % static_cast<std::size_t>(range)));
            rest /= static_cast<std::size_t>(range);
          }
          bool v = logic::eval_formula(s, scratch, ft.binding, *ft.formula);
          c.table[ix] = ft.weight * (ft.complement ? (v ? 0.0 : 1.0) : (v ? 1.0 : 0.0));
        }
      } else {
        c.direct = &ft;
      }
      c.deepest = c.deps.back();
      comps.push_back(std::move(c));
    }

    for (const auto& mt : loss.monomials) {
      Component c;
      for (auto [f, n] : mt.factors) c.deps.push_back(f);
      std::sort(c.deps.begin(), c.deps.end());
      c.deps.erase(std::unique(c.deps.begin(), c.deps.end()), c.deps.end());
      if (c.deps.empty()) {
        base += mt.weight;
        continue;
      }
      std::size_t joint = 1;
      for (FactId d : c.deps) joint *= static_cast<std::size_t>(facts.range_size(d));
      c.table.resize(joint);
      for (std::size_t ix = 0; ix < joint; ++ix) {
        std::size_t rest = ix;
        for (std::size_t i = c.deps.size(); i-- > 0;) {
          int range = facts.range_size(c.deps[i]);
          scratch.set(c.deps[i], static_cast<int>(rest % static_cast<std::size_t>(range)));
          rest /= static_cast<std::size_t>(range);
        }
        double prod = mt.weight;
        for (auto [f, n] : mt.factors) {
          double x = static_cast<double>(
              s.elem_numeric(facts.range_sort(f), static_cast<Elem>(scratch.value(f))));
          for (int k = 0; k < n; ++k) prod *= x;
        }
        c.table[ix] = prod;
      }
      c.deepest = c.deps.back();
      comps.push_back(std::move(c));
    }

    by_depth.resize(facts.size());
    for (const auto& c : comps) by_depth[static_cast<std::size_t>(c.deepest)].push_back(&c);
  }

  double component_value(const Component& c) {
    if (c.direct) {
      bool v = logic::eval_formula(s, scratch, c.direct->binding, *c.direct->formula);
      return c.direct->weight * (c.direct->complement ? (v ? 0.0 : 1.0) : (v ? 1.0 : 0.0));
    }
    std::size_t ix = 0;
    for (FactId d : c.deps)
      ix = ix * static_cast<std::size_t>(facts.range_size(d)) +
           static_cast<std::size_t>(scratch.value(d));
    return c.table[ix];
  }

  void enumerate(const std::function<void(double)>& record) {
    std::size_t nfacts = facts.size();
    std::function<void(std::size_t, double)> dfs = [&](std::size_t fact, double partial) {
      if (fact == nfacts) {
        record(partial);
        return;
      }
      int range = facts.range_size(static_cast<FactId>(fact));
      for (int v = 0; v < range; ++v) {
        scratch.set(static_cast<FactId>(fact), v);
        double p = partial;
        for (const Component* c : by_depth[fact]) p += component_value(*c);
        dfs(fact + 1, p);
      }
    };
    if (nfacts == 0) {
      record(base);
      return;
    }
    dfs(0, base);
  }
};

}  // namespace

std::vector<double> enumerate_losses(const Structure& s, const FactSet& facts,
                                     const LossExpression& loss) {
  Enumerator en(s, facts, loss);
  std::vector<double> losses;
  en.enumerate([&](double l) { losses.push_back(l); });
  return losses;
}

ExactPosterior exact_posterior(const Structure& s, const FactSet& facts,
                               const LossExpression& loss, double beta) {
  ExactPosterior post;
  post.beta = beta;
  post.facts_ = &facts;
  for (std::size_t i = 0; i < facts.size(); ++i)
    post.ranges_.push_back(facts.range_size(static_cast<FactId>(i)));
  post.losses = enumerate_losses(s, facts, loss);
  post.min_loss = *std::min_element(post.losses.begin(), post.losses.end());
  post.probabilities.resize(post.losses.size());
  double z = 0;
  for (std::size_t i = 0; i < post.losses.size(); ++i) {
    post.probabilities[i] = std::exp(-beta * (post.losses[i] - post.min_loss));
    z += post.probabilities[i];
  }
  post.shifted_partition = z;
  for (auto& p : post.probabilities) p /= z;
  return post;
}

std::size_t ExactPosterior::index_of(const Interpretation& interp) const {
  std::size_t ix = 0;
  for (std::size_t i = 0; i < ranges_.size(); ++i)
    ix = ix * static_cast<std::size_t>(ranges_[i]) +
         static_cast<std::size_t>(interp.value(static_cast<FactId>(i)));
  return ix;
}

Interpretation ExactPosterior::interpretation_at(std::size_t index, const FactSet& facts) const {
  Interpretation interp = Interpretation::zeros(facts);
  std::size_t rest = index;
  for (std::size_t i = ranges_.size(); i-- > 0;) {
    interp.set(static_cast<FactId>(i), static_cast<int>(rest % static_cast<std::size_t>(ranges_[i])));
    rest /= static_cast<std::size_t>(ranges_[i]);
  }
  return interp;
}

double ExactPosterior::probability(const Interpretation& interp) const {
  return probabilities.at(index_of(interp));
}

std::pair<double, Interpretation> exact_min_loss(const Structure& s, const FactSet& facts,
                                                 const LossExpression& loss) {
  Enumerator en(s, facts, loss);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_ix = 0, ix = 0;
  en.enumerate([&](double l) {
    if (l < best) {
      best = l;
      best_ix = ix;
    }
    ++ix;
  });
  Interpretation interp = Interpretation::zeros(facts);
  std::size_t rest = best_ix;
  for (std::size_t i = facts.size(); i-- > 0;) {
    int range = facts.range_size(static_cast<FactId>(i));
    interp.set(static_cast<FactId>(i), static_cast<int>(rest % static_cast<std::size_t>(range)));
    rest /= static_cast<std::size_t>(range);
  }
  return {best, std::move(interp)};
}

EntropyReport entropy_check(const ExactPosterior& posterior, double beta) {
  EntropyReport report;
  std::map<double, std::pair<double, double>> by_loss;  // loss -> (min p, max p)
  for (std::size_t i = 0; i < posterior.losses.size(); ++i) {
    double l = posterior.losses[i], p = posterior.probabilities[i];
    auto [it, fresh] = by_loss.emplace(l, std::make_pair(p, p));
    if (!fresh) {
      it->second.first = std::min(it->second.first, p);
      it->second.second = std::max(it->second.second, p);
    }
  }
  if (beta > 0) {
    const std::pair<const double, std::pair<double, double>>* prev = nullptr;
    for (const auto& entry : by_loss) {
      if (prev && !(prev->second.first > entry.second.second)) {
        report.ordering_holds = false;
        report.violation = "loss " + std::to_string(prev->first) +
                           " not strictly more probable than loss " +
                           std::to_string(entry.first);
        break;
      }
      prev = &entry;
    }
  }
  double h = 0;
  for (double p : posterior.probabilities)
    if (p > 0) h -= p * std::log(p);
  report.entropy = h;
  return report;
}

}  // namespace polymine::oracle
