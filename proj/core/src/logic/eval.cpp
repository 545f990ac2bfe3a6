#include "polymine/logic/eval.hpp"

namespace polymine::logic {

Elem eval_term(const Structure& s, const Interpretation& interp, const Binding& b, const Term& t) {
  switch (t.kind) {
    case TermKind::Var:
      if (static_cast<std::size_t>(t.var) >= b.size() || b[t.var] < 0)
        throw BindingError("unbound variable " +
                           (t.var_name.empty() ? "?" + std::to_string(t.var) : t.var_name));
      return b[t.var];
    case TermKind::Lit:
      return t.lit;
    case TermKind::App: {
      std::vector<Elem> args(t.args.size());
      for (std::size_t i = 0; i < t.args.size(); ++i)
        args[i] = eval_term(s, interp, b, *t.args[i]);
      const Symbol& sym = s.symbol(t.symbol);
      if (sym.rigid) return s.rigid_value(t.symbol, args);
      if (!interp.facts) throw IncompleteInterpretationError("no interpretation given");
      FactId id = interp.facts->find(t.symbol, args);
      if (id < 0)
        throw IncompleteInterpretationError("interpretation does not cover " + sym.name);
      return static_cast<Elem>(interp.value(id));
    }
    case TermKind::Sum:
      throw SignatureError("sum terms have no carrier value; use numeric evaluation");
  }
  throw Error("unreachable term kind");
}

namespace {

long long eval_term_numeric(const Structure& s, const Interpretation& interp, const Binding& b,
                            const Term& t) {
  if (t.kind == TermKind::Sum) {
    long long total = 0;
    for (const auto& a : t.args) total += eval_term_numeric(s, interp, b, *a);
    return total;
  }
  return s.elem_numeric(t.sort, eval_term(s, interp, b, t));
}

}  // namespace

bool eval_formula(const Structure& s, const Interpretation& interp, const Binding& b,
                  const Formula& f, const EvalOptions& opts) {
  switch (f.kind) {
    case FormulaKind::True:
      return true;
    case FormulaKind::False:
      return false;
    case FormulaKind::Rel: {
      std::vector<Elem> args(f.args.size());
      for (std::size_t i = 0; i < f.args.size(); ++i)
        args[i] = eval_term(s, interp, b, *f.args[i]);
      const Symbol& sym = s.symbol(f.symbol);
      if (sym.rigid) return s.rigid_holds(f.symbol, args);
      if (!interp.facts) throw IncompleteInterpretationError("no interpretation given");
      FactId id = interp.facts->find(f.symbol, args);
      if (id < 0)
        throw IncompleteInterpretationError("interpretation does not cover " + sym.name);
      return interp.value(id) != 0;
    }
    case FormulaKind::Cmp: {
      if (f.op == CmpOp::Eq && f.lhs->sort == f.rhs->sort && f.lhs->sort != kNumericSort)
        return eval_term(s, interp, b, *f.lhs) == eval_term(s, interp, b, *f.rhs);
      long long x = eval_term_numeric(s, interp, b, *f.lhs);
      long long y = eval_term_numeric(s, interp, b, *f.rhs);
      return f.op == CmpOp::Eq ? x == y : f.op == CmpOp::Le ? x <= y : x < y;
    }
    case FormulaKind::Not:
      return !eval_formula(s, interp, b, *f.children.front(), opts);
    case FormulaKind::And:
      for (const auto& c : f.children)
        if (!eval_formula(s, interp, b, *c, opts)) return false;
      return true;
    case FormulaKind::Or:
      for (const auto& c : f.children)
        if (eval_formula(s, interp, b, *c, opts)) return true;
      return false;
    case FormulaKind::Implies:
      return !eval_formula(s, interp, b, *f.children[0], opts) ||
             eval_formula(s, interp, b, *f.children[1], opts);
    case FormulaKind::Oplus: {
      int hits = 0;
      for (const auto& c : f.children) {
        if (eval_formula(s, interp, b, *c, opts)) {
          ++hits;
          if (!opts.check_exclusive) return true;
          if (hits > 1)
            throw DecompositionError("mutual-exclusivity obligation violated: " +
                                     to_string(s, f));
        }
      }
      return hits > 0;
    }
  }
  throw Error("unreachable formula kind");
}

}  // namespace polymine::logic
