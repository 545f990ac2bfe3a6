#include "polymine/logic/facts.hpp"

#include <algorithm>
#include <set>

namespace polymine::logic {

std::uint64_t FactSet::key_hash(SymbolId sym, std::span<const Elem> args) {
  std::uint64_t h = 1469598103934665603ull ^ static_cast<std::uint64_t>(sym);
  for (Elem a : args) {
    h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) + 0x9e3779b97f4a7c15ull;
    h *= 1099511628211ull;
  }
  return h;
}

FactSet::FactSet(const Structure& s, std::vector<RandomFact> facts) : facts_(std::move(facts)) {
  ranges_.reserve(facts_.size());
  range_sorts_.reserve(facts_.size());
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    const Symbol& sym = s.symbol(facts_[i].symbol);
    SortId rs = sym.kind == SymbolKind::Relation ? s.bool_sort() : sym.result_sort;
    range_sorts_.push_back(rs);
    ranges_.push_back(static_cast<int>(s.sort(rs).size()));
    index_[key_hash(facts_[i].symbol, facts_[i].args)].push_back(static_cast<FactId>(i));
  }
}

FactId FactSet::find(SymbolId sym, std::span<const Elem> args) const {
  auto it = index_.find(key_hash(sym, args));
  if (it == index_.end()) return -1;
  for (FactId id : it->second) {
    const RandomFact& f = facts_[static_cast<std::size_t>(id)];
    if (f.symbol == sym && std::equal(f.args.begin(), f.args.end(), args.begin(), args.end()))
      return id;
  }
  return -1;
}

FactId FactSet::id_of(SymbolId sym, std::span<const Elem> args) const {
  FactId id = find(sym, args);
  if (id < 0) throw IncompleteInterpretationError("random fact not in fact set");
  return id;
}

std::string FactSet::describe(const Structure& s, FactId id) const {
  const RandomFact& f = fact(id);
  const Symbol& sym = s.symbol(f.symbol);
  std::string out = sym.name + "(";
  for (std::size_t i = 0; i < f.args.size(); ++i) {
    if (i) out += ",";
    out += s.elem_name(sym.arg_sorts[i], f.args[i]);
  }
  out += ")";
  return out;
}

namespace {

void collect_flexible(const Term& t, const Structure& s, std::set<SymbolId>& out) {
  if (t.kind == TermKind::App && !s.symbol(t.symbol).rigid) out.insert(t.symbol);
  for (const auto& a : t.args) collect_flexible(*a, s, out);
}

void collect_flexible(const Formula& f, const Structure& s, std::set<SymbolId>& out,
                      std::set<const Formula*>& seen) {
  if (!seen.insert(&f).second) return;
  if (f.kind == FormulaKind::Rel) {
    if (!s.symbol(f.symbol).rigid) out.insert(f.symbol);
  }
  for (const auto& a : f.args) collect_flexible(*a, s, out);
  if (f.lhs) collect_flexible(*f.lhs, s, out);
  if (f.rhs) collect_flexible(*f.rhs, s, out);
  for (const auto& c : f.children) collect_flexible(*c, s, out, seen);
}

}  // namespace

FactSet enumerate_random_facts(const Formula& f, const Structure& s) {
  std::set<SymbolId> flex;
  std::set<const Formula*> seen;
  collect_flexible(f, s, flex, seen);

  std::vector<SymbolId> order(flex.begin(), flex.end());
  std::sort(order.begin(), order.end(), [&](SymbolId a, SymbolId b) {
    return s.symbol(a).name < s.symbol(b).name;
  });

  std::vector<RandomFact> facts;
  for (SymbolId symid : order) {
    const Symbol& sym = s.symbol(symid);
    std::size_t total = 1;
    for (SortId a : sym.arg_sorts) {
      if (s.sort(a).size() == 0)
        throw SignatureError("sort " + s.sort(a).name + " has empty carrier");
      total *= s.sort(a).size();
    }
    std::vector<Elem> args(sym.arg_sorts.size(), 0);
    for (std::size_t ix = 0; ix < total; ++ix) {
      std::size_t rest = ix;
      for (std::size_t i = sym.arg_sorts.size(); i-- > 0;) {
        std::size_t n = s.sort(sym.arg_sorts[i]).size();
        args[i] = static_cast<Elem>(rest % n);
        rest /= n;
      }
      facts.push_back(RandomFact{symid, args});
    }
  }
  return FactSet(s, std::move(facts));
}

Interpretation Interpretation::zeros(const FactSet& fs) {
  Interpretation interp;
  interp.facts = &fs;
  interp.values.assign(fs.size(), 0);
  return interp;
}

}  // namespace polymine::logic
