#include "polymine/expect/ground.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <unordered_map>

#include "polymine/logic/analysis.hpp"

namespace polymine::expect {

using logic::CmpOp;
using logic::FormulaKind;
using logic::SymbolKind;
using logic::Term;
using logic::TermKind;

struct GroundBuilder::PinCtx {
  std::vector<Pin> pins;  // sorted by fact

  const int* find(FactId f) const {
    auto it = std::lower_bound(pins.begin(), pins.end(), f,
                               [](const Pin& p, FactId x) { return p.fact < x; });
    if (it != pins.end() && it->fact == f) return &it->value;
    return nullptr;
  }
  PinCtx with(FactId f, int v) const {
    PinCtx out = *this;
    Pin p{f, v};
    out.pins.insert(std::upper_bound(out.pins.begin(), out.pins.end(), p), p);
    return out;
  }
};

GroundBuilder::GroundBuilder(const Structure& s, const FactSet& facts, GroundOptions opts)
    : s_(s), facts_(facts), opts_(opts) {}

void GroundBuilder::term_facts(const Term& t, const Binding& b, std::vector<FactId>& out) {
  if (t.kind == TermKind::Sum) {
    for (const auto& a : t.args) term_facts(*a, b, out);
    return;
  }
  if (t.kind != TermKind::App) return;
  if (s_.symbol(t.symbol).rigid) {
    for (const auto& a : t.args) term_facts(*a, b, out);
    return;
  }
  std::vector<FactId> inner;
  for (const auto& a : t.args) term_facts(*a, b, inner);
  if (!inner.empty())
    throw DecompositionError("flexible symbol " + s_.symbol(t.symbol).name +
                             " applied to flexible arguments");
  std::vector<Elem> args(t.args.size());
  for (std::size_t i = 0; i < t.args.size(); ++i)
    args[i] = eval_rigid_term(*t.args[i], b, {});
  out.push_back(facts_.id_of(t.symbol, args));
}

Elem GroundBuilder::eval_rigid_term(const Term& t, const Binding& b,
                                    const std::vector<std::pair<FactId, int>>& assign) const {
  switch (t.kind) {
    case TermKind::Var:
      if (static_cast<std::size_t>(t.var) >= b.size() || b[t.var] < 0)
        throw BindingError("unbound variable in grounding");
      return b[t.var];
    case TermKind::Lit:
      return t.lit;
    case TermKind::App: {
      std::vector<Elem> args(t.args.size());
      for (std::size_t i = 0; i < t.args.size(); ++i)
        args[i] = eval_rigid_term(*t.args[i], b, assign);
      if (s_.symbol(t.symbol).rigid) return s_.rigid_value(t.symbol, args);
      FactId id = facts_.id_of(t.symbol, args);
      for (const auto& [f, v] : assign)
        if (f == id) return static_cast<Elem>(v);
      throw IncompleteInterpretationError("fact value missing during grounding");
    }
    case TermKind::Sum:
      throw SignatureError("sum terms have no carrier value");
  }
  throw Error("unreachable term kind");
}

const std::vector<FactId>& GroundBuilder::formula_facts(const Formula& f, const Binding& b) {
  auto it = fact_memo_.find(&f);
  if (it != fact_memo_.end()) return it->second;
  std::vector<FactId> out;
  switch (f.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      break;
    case FormulaKind::Rel: {
      if (!s_.symbol(f.symbol).rigid) {
        std::vector<FactId> inner;
        for (const auto& a : f.args) term_facts(*a, b, inner);
        if (!inner.empty())
          throw DecompositionError("flexible relation " + s_.symbol(f.symbol).name +
                                   " applied to flexible arguments");
        std::vector<Elem> args(f.args.size());
        for (std::size_t i = 0; i < f.args.size(); ++i)
          args[i] = eval_rigid_term(*f.args[i], b, {});
        out.push_back(facts_.id_of(f.symbol, args));
      } else {
        for (const auto& a : f.args) term_facts(*a, b, out);
      }
      break;
    }
    case FormulaKind::Cmp:
      term_facts(*f.lhs, b, out);
      term_facts(*f.rhs, b, out);
      break;
    default:
      for (const auto& c : f.children) {
        const auto& sub = formula_facts(*c, b);
        out.insert(out.end(), sub.begin(), sub.end());
      }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return fact_memo_.emplace(&f, std::move(out)).first->second;
}

long long GroundBuilder::eval_term_numeric(
    const Term& t, const Binding& b, const std::vector<std::pair<FactId, int>>& assign) const {
  if (t.kind == TermKind::Sum) {
    long long total = 0;
    for (const auto& a : t.args) total += eval_term_numeric(*a, b, assign);
    return total;
  }
  return s_.elem_numeric(t.sort, eval_rigid_term(t, b, assign));
}

// Truth of an atomic formula once every fact it mentions has a value.
bool GroundBuilder::atom_truth(const Formula& f, const Binding& b,
                               const std::vector<std::pair<FactId, int>>& assign) const {
  if (f.kind == FormulaKind::Rel) {
    std::vector<Elem> args(f.args.size());
    for (std::size_t i = 0; i < f.args.size(); ++i)
      args[i] = eval_rigid_term(*f.args[i], b, assign);
    if (s_.symbol(f.symbol).rigid) return s_.rigid_holds(f.symbol, args);
    FactId id = facts_.id_of(f.symbol, args);
    for (const auto& [g, v] : assign)
      if (g == id) return v != 0;
    throw IncompleteInterpretationError("fact value missing during grounding");
  }
  if (f.op == CmpOp::Eq && f.lhs->sort == f.rhs->sort && f.lhs->sort != logic::kNumericSort)
    return eval_rigid_term(*f.lhs, b, assign) == eval_rigid_term(*f.rhs, b, assign);
  long long x = eval_term_numeric(*f.lhs, b, assign);
  long long y = eval_term_numeric(*f.rhs, b, assign);
  return f.op == CmpOp::Eq ? x == y : f.op == CmpOp::Le ? x <= y : x < y;
}

std::int32_t GroundBuilder::const_node(Ground& g, double v) {
  std::int32_t* slot = v == 0.0 ? &const_zero_ : v == 1.0 ? &const_one_ : nullptr;
  if (slot && *slot >= 0) return *slot;
  Ground::Node n;
  n.kind = Ground::Kind::Const;
  n.cval = v;
  g.nodes.push_back(n);
  std::int32_t id = static_cast<std::int32_t>(g.nodes.size() - 1);
  if (slot) *slot = id;
  return id;
}

std::int32_t GroundBuilder::not_of(Ground& g, std::int32_t kid) {
  const auto& k = g.nodes[static_cast<std::size_t>(kid)];
  if (k.kind == Ground::Kind::Const) return const_node(g, 1.0 - k.cval);
  if (k.kind == Ground::Kind::Not) return g.kid_pool[k.kids_off];
  if (auto it = not_memo_.find(kid); it != not_memo_.end()) return it->second;
  Ground::Node n;
  n.kind = Ground::Kind::Not;
  n.kids_off = static_cast<std::int32_t>(g.kid_pool.size());
  n.kids_len = 1;
  g.kid_pool.push_back(kid);
  g.nodes.push_back(n);
  std::int32_t id = static_cast<std::int32_t>(g.nodes.size() - 1);
  not_memo_.emplace(kid, id);
  return id;
}

std::int32_t GroundBuilder::or_of(Ground& g, std::vector<std::int32_t> kids) {
  std::vector<std::int32_t> live;
  for (auto k : kids) {
    const auto& n = g.nodes[static_cast<std::size_t>(k)];
    if (n.kind == Ground::Kind::Const) {
      if (n.cval >= 0.5) return const_node(g, 1.0);
      continue;
    }
    live.push_back(k);
  }
  if (live.empty()) return const_node(g, 0.0);
  if (live.size() == 1) return live.front();
  std::vector<std::int32_t> negs;
  negs.reserve(live.size());
  for (auto k : live) negs.push_back(not_of(g, k));
  Ground::Node n;
  n.kind = Ground::Kind::And;
  n.kids_off = static_cast<std::int32_t>(g.kid_pool.size());
  n.kids_len = static_cast<std::int32_t>(negs.size());
  g.kid_pool.insert(g.kid_pool.end(), negs.begin(), negs.end());
  g.nodes.push_back(n);
  return not_of(g, static_cast<std::int32_t>(g.nodes.size() - 1));
}

std::int32_t GroundBuilder::ground_atom(Ground& g, const Formula& f, const Binding& b,
                                        const PinCtx& pins) {
  const auto& all = formula_facts(f, b);
  std::vector<FactId> free;
  std::vector<std::pair<FactId, int>> assign;
  for (FactId d : all) {
    if (const int* v = pins.find(d))
      assign.emplace_back(d, *v);
    else
      free.push_back(d);
  }
  std::size_t fixed = assign.size();

  if (free.empty()) return const_node(g, atom_truth(f, b, assign) ? 1.0 : 0.0);

  long long joint = 1;
  for (FactId d : free) {
    joint *= facts_.range_size(d);
    if (joint > opts_.max_atom_joint)
      throw DecompositionError("atom joint too large: " + logic::to_string(s_, f));
  }

  Ground::Node n;
  n.kind = Ground::Kind::Atom;
  n.facts_off = static_cast<std::int32_t>(g.fact_pool.size());
  n.facts_len = static_cast<std::int32_t>(free.size());
  g.fact_pool.insert(g.fact_pool.end(), free.begin(), free.end());
  n.table_off = static_cast<std::int32_t>(g.table_pool.size());
  n.table_len = static_cast<std::int32_t>(joint);

  assign.resize(fixed + free.size());
  for (long long ix = 0; ix < joint; ++ix) {
    long long rest = ix;
    for (std::size_t i = free.size(); i-- > 0;) {
      int range = facts_.range_size(free[i]);
      assign[fixed + i] = {free[i], static_cast<int>(rest % range)};
      rest /= range;
    }
    g.table_pool.push_back(atom_truth(f, b, assign) ? 1 : 0);
  }
  g.nodes.push_back(n);
  return static_cast<std::int32_t>(g.nodes.size() - 1);
}

std::int32_t GroundBuilder::mix(Ground& g, const Formula& f, const Binding& b, const PinCtx& pins,
                                int depth, FactId shared) {
  if (depth >= opts_.max_mix_depth) {
    std::string text = logic::to_string(s_, f);
    if (text.size() > 160) text = text.substr(0, 160) + "...";
    throw DecompositionError("related conjuncts with no registered rewrite in: " + text);
  }
  int range = facts_.range_size(shared);
  std::vector<std::int32_t> kids(static_cast<std::size_t>(range));
  for (int v = 0; v < range; ++v)
    kids[static_cast<std::size_t>(v)] = ground(g, f, b, pins.with(shared, v), depth + 1);

  Ground::Node n;
  n.kind = Ground::Kind::Mix;
  n.facts_off = static_cast<std::int32_t>(g.fact_pool.size());
  n.facts_len = 1;
  g.fact_pool.push_back(shared);
  n.kids_off = static_cast<std::int32_t>(g.kid_pool.size());
  n.kids_len = range;
  g.kid_pool.insert(g.kid_pool.end(), kids.begin(), kids.end());
  g.nodes.push_back(n);
  return static_cast<std::int32_t>(g.nodes.size() - 1);
}

std::int32_t GroundBuilder::ground(Ground& g, const Formula& f, const Binding& b,
                                   const PinCtx& pins, int depth) {
  // Memo key uses only pins that can affect this subformula.
  const auto& my_facts = formula_facts(f, b);
  std::size_t n_relevant = 0;
  for (const Pin& p : pins.pins)
    n_relevant += std::binary_search(my_facts.begin(), my_facts.end(), p.fact) ? 1 : 0;

  std::pair<const Formula*, std::vector<Pin>> key{&f, {}};
  if (n_relevant == 0) {
    if (auto it = node_memo0_.find(&f); it != node_memo0_.end()) return it->second;
  } else {
    key.second.reserve(n_relevant);
    for (const Pin& p : pins.pins)
      if (std::binary_search(my_facts.begin(), my_facts.end(), p.fact))
        key.second.push_back(p);
    if (auto it = node_memo_.find(key); it != node_memo_.end()) return it->second;
  }

  auto remember = [&](std::int32_t id) {
    if (n_relevant == 0)
      node_memo0_.emplace(&f, id);
    else
      node_memo_.emplace(std::move(key), id);
    return id;
  };

  switch (f.kind) {
    case FormulaKind::True:
      return remember(const_node(g, 1.0));
    case FormulaKind::False:
      return remember(const_node(g, 0.0));
    case FormulaKind::Rel:
    case FormulaKind::Cmp:
      return remember(ground_atom(g, f, b, pins));
    case FormulaKind::Not:
      return remember(not_of(g, ground(g, *f.children.front(), b, pins, depth)));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies: {
      // Effective (unpinned) facts per child decide between the product rule
      // and conditioning on a shared fact.
      std::vector<const Formula*> parts;
      if (f.kind == FormulaKind::Implies) {
        parts = {f.children[0].get(), f.children[1].get()};
      } else {
        for (const auto& c : f.children) parts.push_back(c.get());
      }
      std::unordered_map<FactId, int> share;
      for (const Formula* c : parts)
        for (FactId d : formula_facts(*c, b))
          if (!pins.find(d)) ++share[d];
      FactId shared = -1;
      int best = 1;
      for (auto [d, cnt] : share)
        if (cnt > best || (cnt == best && cnt > 1 && d < shared)) {
          best = cnt;
          shared = d;
        }
      if (shared >= 0) return remember(mix(g, f, b, pins, depth, shared));

      std::vector<std::int32_t> kids;
      kids.reserve(parts.size());
      for (const Formula* c : parts) kids.push_back(ground(g, *c, b, pins, depth));
      if (f.kind == FormulaKind::Or) return remember(or_of(g, std::move(kids)));
      if (f.kind == FormulaKind::Implies)
        return remember(or_of(g, {not_of(g, kids[0]), kids[1]}));

      std::vector<std::int32_t> live;
      for (auto k : kids) {
        const auto& n = g.nodes[static_cast<std::size_t>(k)];
        if (n.kind == Ground::Kind::Const) {
          if (n.cval < 0.5) return remember(const_node(g, 0.0));
          continue;
        }
        live.push_back(k);
      }
      if (live.empty()) return remember(const_node(g, 1.0));
      if (live.size() == 1) return remember(live.front());
      Ground::Node n;
      n.kind = Ground::Kind::And;
      n.kids_off = static_cast<std::int32_t>(g.kid_pool.size());
      n.kids_len = static_cast<std::int32_t>(live.size());
      g.kid_pool.insert(g.kid_pool.end(), live.begin(), live.end());
      g.nodes.push_back(n);
      return remember(static_cast<std::int32_t>(g.nodes.size() - 1));
    }
    case FormulaKind::Oplus: {
      std::vector<std::int32_t> live;
      for (const auto& c : f.children) {
        std::int32_t k = ground(g, *c, b, pins, depth);
        const auto& n = g.nodes[static_cast<std::size_t>(k)];
        if (n.kind == Ground::Kind::Const && n.cval < 0.5) continue;
        live.push_back(k);
      }
      if (live.empty()) return remember(const_node(g, 0.0));
      if (live.size() == 1) return remember(live.front());
      Ground::Node n;
      n.kind = Ground::Kind::Oplus;
      n.kids_off = static_cast<std::int32_t>(g.kid_pool.size());
      n.kids_len = static_cast<std::int32_t>(live.size());
      g.kid_pool.insert(g.kid_pool.end(), live.begin(), live.end());
      g.nodes.push_back(n);
      return remember(static_cast<std::int32_t>(g.nodes.size() - 1));
    }
  }
  throw Error("unreachable formula kind");
}

Ground GroundBuilder::build(const Formula& f, const Binding& binding) {
  fact_memo_.clear();
  node_memo_.clear();
  not_memo_.clear();
  const_zero_ = const_one_ = -1;
  Ground g;
  g.root = ground(g, f, binding, PinCtx{}, 0);
  return g;
}

std::vector<FactId> Ground::all_facts() const {
  std::vector<FactId> out;
  for (const Node& n : nodes) {
    auto fs = facts_of(n);
    out.insert(out.end(), fs.begin(), fs.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::int32_t> Ground::anchors(FactId f) const {
  std::vector<std::int32_t> out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    auto fs = facts_of(nodes[i]);
    if (std::find(fs.begin(), fs.end(), f) != fs.end())
      out.push_back(static_cast<std::int32_t>(i));
  }
  return out;
}

double Ground::node_value(const Node& n, const FactorDistribution& q, std::optional<Pin> pin,
                          std::span<const double> child_values) const {
  switch (n.kind) {
    case Kind::Const:
      return n.cval;
    case Kind::Atom: {
      auto deps = facts_of(n);
      const std::uint8_t* table = table_pool.data() + n.table_off;
      if (deps.size() == 1) {
        FactId d = deps[0];
        if (pin && pin->fact == d) return table[pin->value];
        auto p = q.pmf(d);
        double tot = 0;
        for (std::size_t v = 0; v < p.size(); ++v) tot += p[v] * table[v];
        return tot;
      }
      double tot = 0;
      for (std::int32_t ix = 0; ix < n.table_len; ++ix) {
        if (!table[ix]) continue;
        double prob = 1;
        std::int32_t rest = ix;
        for (std::size_t i = deps.size(); i-- > 0;) {
          int range = q.facts().range_size(deps[i]);
          int digit = rest % range;
          rest /= range;
          if (pin && pin->fact == deps[i]) {
            if (digit != pin->value) {
              prob = 0;
              break;
            }
          } else {
            prob *= q.pmf(deps[i])[static_cast<std::size_t>(digit)];
          }
        }
        tot += prob;
      }
      return tot;
    }
    case Kind::Not:
      return 1.0 - child_values[0];
    case Kind::And: {
      double prod = 1;
      for (double v : child_values) prod *= v;
      return prod;
    }
    case Kind::Oplus: {
      double sum = 0;
      for (double v : child_values) sum += v;
      return sum;
    }
    case Kind::Mix: {
      FactId d = fact_pool[n.facts_off];
      if (pin && pin->fact == d) return child_values[pin->value];
      auto p = q.pmf(d);
      double tot = 0;
      for (std::size_t v = 0; v < p.size(); ++v) tot += p[v] * child_values[v];
      return tot;
    }
  }
  throw Error("unreachable ground node kind");
}

double Ground::expect(const FactorDistribution& q, std::optional<Pin> pin) const {
  std::vector<double> vals(nodes.size());
  std::vector<double> kid_vals;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    kid_vals.clear();
    for (auto k : kids_of(n)) kid_vals.push_back(vals[static_cast<std::size_t>(k)]);
    vals[i] = node_value(n, q, pin, kid_vals);
  }
  return vals[static_cast<std::size_t>(root)];
}

bool Ground::evaluate(const Interpretation& interp, bool check_exclusive) const {
  std::vector<std::uint8_t> vals(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    switch (n.kind) {
      case Kind::Const:
        vals[i] = n.cval >= 0.5;
        break;
      case Kind::Atom: {
        auto deps = facts_of(n);
        std::int32_t ix = 0;
        for (FactId d : deps) ix = ix * interp.facts->range_size(d) + interp.value(d);
        vals[i] = table_pool[static_cast<std::size_t>(n.table_off + ix)];
        break;
      }
      case Kind::Not:
        vals[i] = !vals[static_cast<std::size_t>(kid_pool[n.kids_off])];
        break;
      case Kind::And: {
        bool all = true;
        for (auto k : kids_of(n)) all = all && vals[static_cast<std::size_t>(k)];
        vals[i] = all;
        break;
      }
      case Kind::Oplus: {
        int hits = 0;
        for (auto k : kids_of(n)) hits += vals[static_cast<std::size_t>(k)];
        if (check_exclusive && hits > 1)
          throw DecompositionError("mutual-exclusivity obligation violated in ground formula");
        vals[i] = hits > 0;
        break;
      }
      case Kind::Mix: {
        int v = interp.value(fact_pool[n.facts_off]);
        vals[i] = vals[static_cast<std::size_t>(kid_pool[n.kids_off + v])];
        break;
      }
    }
  }
  return vals[static_cast<std::size_t>(root)] != 0;
}

double expect_formula(const Structure& s, const FactSet& facts, const FactorDistribution& q,
                      const Formula& f, const Binding& binding, std::optional<Pin> pin) {
  GroundBuilder builder(s, facts);
  Ground g = builder.build(f, binding);
  return g.expect(q, pin);
}

}  // namespace polymine::expect
