#include "polymine/logic/analysis.hpp"

#include <functional>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace polymine::logic {

namespace {

// Rigid applications over variable-free arguments fold to their value, so
// that e.g. a rigid role constant and its carrier element form one atom key.
bool term_key(const Structure& s, const Term& t, std::ostream& os) {
  switch (t.kind) {
    case TermKind::Var:
      os << "?" << t.var;
      return false;
    case TermKind::Lit:
      os << "#" << s.sort(t.sort).name << ":" << t.lit;
      return true;
    case TermKind::App: {
      std::ostringstream inner;
      bool ground = true;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) inner << ",";
        ground &= term_key(s, *t.args[i], inner);
      }
      const Symbol& sym = s.symbol(t.symbol);
      if (sym.rigid && ground && s.has_rigid_table(t.symbol)) {
        std::vector<Elem> args(t.args.size());
        for (std::size_t i = 0; i < t.args.size(); ++i) {
          // re-evaluate; args are variable-free
          std::function<Elem(const Term&)> ev = [&](const Term& u) -> Elem {
            if (u.kind == TermKind::Lit) return u.lit;
            std::vector<Elem> as(u.args.size());
            for (std::size_t j = 0; j < u.args.size(); ++j) as[j] = ev(*u.args[j]);
            return s.rigid_value(u.symbol, as);
          };
          args[i] = ev(*t.args[i]);
        }
        os << "#" << s.sort(sym.result_sort).name << ":" << s.rigid_value(t.symbol, args);
        return true;
      }
      os << sym.name << "(" << inner.str() << ")";
      return false;
    }
    case TermKind::Sum: {
      os << "sum(";
      bool ground = true;
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ",";
        ground &= term_key(s, *t.args[i], os);
      }
      os << ")";
      return ground;
    }
  }
  return false;
}

bool term_has_flexible(const Structure& s, const Term& t) {
  if (t.kind == TermKind::App && !s.symbol(t.symbol).rigid) return true;
  for (const auto& a : t.args)
    if (term_has_flexible(s, *a)) return true;
  return false;
}

// Atoms over rigid symbols only denote constants; they carry no random fact
// and are skipped by both checks.
bool atom_is_flexible(const Structure& s, const Formula& f) {
  if (f.kind == FormulaKind::Rel) {
    if (!s.symbol(f.symbol).rigid) return true;
    for (const auto& a : f.args)
      if (term_has_flexible(s, *a)) return true;
    return false;
  }
  return term_has_flexible(s, *f.lhs) || term_has_flexible(s, *f.rhs);
}

void walk_atoms(const Structure& s, const Formula& f,
                const std::function<void(const Formula&)>& visit) {
  switch (f.kind) {
    case FormulaKind::True:
    case FormulaKind::False:
      return;
    case FormulaKind::Rel:
    case FormulaKind::Cmp:
      if (atom_is_flexible(s, f)) visit(f);
      return;
    default:
      for (const auto& c : f.children) walk_atoms(s, *c, visit);
  }
}

}  // namespace

std::string atom_key(const Structure& s, const Formula& atom) {
  std::ostringstream os;
  if (atom.kind == FormulaKind::Rel) {
    os << s.symbol(atom.symbol).name << "(";
    for (std::size_t i = 0; i < atom.args.size(); ++i) {
      if (i) os << ",";
      term_key(s, *atom.args[i], os);
    }
    os << ")";
  } else if (atom.kind == FormulaKind::Cmp) {
    os << (atom.op == CmpOp::Eq ? "=" : atom.op == CmpOp::Le ? "<=" : "<") << "[";
    term_key(s, *atom.lhs, os);
    os << ";";
    term_key(s, *atom.rhs, os);
    os << "]";
  } else {
    throw Error("atom_key on non-atomic formula");
  }
  return os.str();
}

DiversityResult check_diverse(const Structure& s, const Formula& f) {
  std::unordered_map<std::string, int> counts;
  DiversityResult res;
  walk_atoms(s, f, [&](const Formula& atom) {
    std::string key = atom_key(s, atom);
    if (++counts[key] == 2 && res.diverse) {
      res.diverse = false;
      res.offending_atom = to_string(s, atom);
    }
  });
  return res;
}

UnrelatedResult check_unrelated(const Structure& s, const std::vector<FormulaPtr>& formulas) {
  std::unordered_map<std::string, std::size_t> owner;
  UnrelatedResult res;
  for (std::size_t i = 0; i < formulas.size() && res.unrelated; ++i) {
    std::unordered_set<std::string> mine;
    walk_atoms(s, *formulas[i], [&](const Formula& atom) {
      if (!res.unrelated) return;
      std::string key = atom_key(s, atom);
      if (!mine.insert(key).second) return;  // repeats within one formula are fine here
      auto [it, fresh] = owner.emplace(key, i);
      if (!fresh && it->second != i) {
        res.unrelated = false;
        res.shared_atom = to_string(s, atom);
      }
    });
  }
  return res;
}

}  // namespace polymine::logic
