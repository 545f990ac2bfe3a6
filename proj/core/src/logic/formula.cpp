#include "polymine/logic/formula.hpp"

#include <algorithm>
#include <sstream>

namespace polymine::logic {

TermPtr FormulaFactory::var(int id, SortId sort, std::string name) const {
  if (id < 0) throw SignatureError("variable id must be non-negative");
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->sort = sort;
  t->var = id;
  t->var_name = std::move(name);
  return t;
}

TermPtr FormulaFactory::lit(SortId sort, Elem e) const {
  if (e < 0 || static_cast<std::size_t>(e) >= s_.sort(sort).size())
    throw SignatureError("element literal out of carrier range for sort " + s_.sort(sort).name);
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Lit;
  t->sort = sort;
  t->lit = e;
  return t;
}

TermPtr FormulaFactory::lit(SortId sort, const std::string& elem_name) const {
  return lit(sort, s_.elem(sort, elem_name));
}

TermPtr FormulaFactory::app(SymbolId symbol, std::vector<TermPtr> args) const {
  const Symbol& sym = s_.symbol(symbol);
  if (sym.kind != SymbolKind::Function)
    throw SignatureError(sym.name + " is a relation, not a function");
  if (args.size() != sym.arg_sorts.size())
    throw SignatureError("arity mismatch applying " + sym.name);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i]->sort != sym.arg_sorts[i])
      throw SignatureError("ill-typed argument " + std::to_string(i) + " of " + sym.name);
  auto t = std::make_shared<Term>();
  t->kind = TermKind::App;
  t->sort = sym.result_sort;
  t->symbol = symbol;
  t->args = std::move(args);
  return t;
}

TermPtr FormulaFactory::app(const std::string& symbol, std::vector<TermPtr> args) const {
  return app(s_.symbol_id(symbol), std::move(args));
}

TermPtr FormulaFactory::sum(std::vector<TermPtr> args) const {
  if (args.empty()) throw SignatureError("sum needs at least one argument");
  for (const auto& a : args)
    if (a->sort != kNumericSort && !s_.sort(a->sort).is_numeric)
      throw SignatureError("sum over non-numeric term");
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Sum;
  t->sort = kNumericSort;
  t->args = std::move(args);
  return t;
}

FormulaPtr FormulaFactory::top() const {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::True;
  return f;
}

FormulaPtr FormulaFactory::bottom() const {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::False;
  return f;
}

FormulaPtr FormulaFactory::rel(SymbolId symbol, std::vector<TermPtr> args) const {
  const Symbol& sym = s_.symbol(symbol);
  if (sym.kind != SymbolKind::Relation)
    throw SignatureError(sym.name + " is a function, not a relation");
  if (args.size() != sym.arg_sorts.size())
    throw SignatureError("arity mismatch applying " + sym.name);
  for (std::size_t i = 0; i < args.size(); ++i)
    if (args[i]->sort != sym.arg_sorts[i])
      throw SignatureError("ill-typed argument " + std::to_string(i) + " of " + sym.name);
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Rel;
  f->symbol = symbol;
  f->args = std::move(args);
  return f;
}

FormulaPtr FormulaFactory::rel(const std::string& symbol, std::vector<TermPtr> args) const {
  return rel(s_.symbol_id(symbol), std::move(args));
}

FormulaPtr FormulaFactory::cmp(CmpOp op, TermPtr a, TermPtr b) const {
  auto numeric = [&](const TermPtr& t) {
    return t->sort == kNumericSort || s_.sort(t->sort).is_numeric;
  };
  if (op == CmpOp::Eq) {
    if (a->sort != b->sort && !(numeric(a) && numeric(b)))
      throw SignatureError("equality between different sorts");
  } else if (!numeric(a) || !numeric(b)) {
    throw SignatureError("ordering comparison on non-numeric terms");
  }
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Cmp;
  f->op = op;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr FormulaFactory::eq(TermPtr a, TermPtr b) const { return cmp(CmpOp::Eq, a, b); }
FormulaPtr FormulaFactory::le(TermPtr a, TermPtr b) const { return cmp(CmpOp::Le, a, b); }
FormulaPtr FormulaFactory::lt(TermPtr a, TermPtr b) const { return cmp(CmpOp::Lt, a, b); }

FormulaPtr FormulaFactory::negate(FormulaPtr f) const {
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::Not;
  g->children = {std::move(f)};
  return g;
}

FormulaPtr FormulaFactory::conj(std::vector<FormulaPtr> fs) const {
  if (fs.empty()) return top();
  if (fs.size() == 1) return fs.front();
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::And;
  g->children = std::move(fs);
  return g;
}

FormulaPtr FormulaFactory::disj(std::vector<FormulaPtr> fs) const {
  if (fs.empty()) return bottom();
  if (fs.size() == 1) return fs.front();
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::Or;
  g->children = std::move(fs);
  return g;
}

FormulaPtr FormulaFactory::implies(FormulaPtr a, FormulaPtr b) const {
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::Implies;
  g->children = {std::move(a), std::move(b)};
  return g;
}

FormulaPtr FormulaFactory::oplus(std::vector<FormulaPtr> fs) const {
  if (fs.empty()) return bottom();
  if (fs.size() == 1) return fs.front();
  auto g = std::make_shared<Formula>();
  g->kind = FormulaKind::Oplus;
  g->children = std::move(fs);
  return g;
}

namespace {

void print_term(const Structure& s, const Term& t, std::ostream& os) {
  switch (t.kind) {
    case TermKind::Var:
      os << (t.var_name.empty() ? "?" + std::to_string(t.var) : t.var_name);
      break;
    case TermKind::Lit:
      os << s.elem_name(t.sort, t.lit);
      break;
    case TermKind::App:
      os << s.symbol(t.symbol).name;
      if (!t.args.empty()) {
        os << "(";
        for (std::size_t i = 0; i < t.args.size(); ++i) {
          if (i) os << ",";
          print_term(s, *t.args[i], os);
        }
        os << ")";
      }
      break;
    case TermKind::Sum:
      os << "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << " + ";
        print_term(s, *t.args[i], os);
      }
      os << ")";
      break;
  }
}

void print_formula(const Structure& s, const Formula& f, std::ostream& os) {
  auto joined = [&](const char* op) {
    os << "(";
    for (std::size_t i = 0; i < f.children.size(); ++i) {
      if (i) os << " " << op << " ";
      print_formula(s, *f.children[i], os);
    }
    os << ")";
  };
  switch (f.kind) {
    case FormulaKind::True: os << "true"; break;
    case FormulaKind::False: os << "false"; break;
    case FormulaKind::Rel:
      os << s.symbol(f.symbol).name << "(";
      for (std::size_t i = 0; i < f.args.size(); ++i) {
        if (i) os << ",";
        print_term(s, *f.args[i], os);
      }
      os << ")";
      break;
    case FormulaKind::Cmp:
      print_term(s, *f.lhs, os);
      os << (f.op == CmpOp::Eq ? " = " : f.op == CmpOp::Le ? " <= " : " < ");
      print_term(s, *f.rhs, os);
      break;
    case FormulaKind::Not:
      os << "!";
      print_formula(s, *f.children.front(), os);
      break;
    case FormulaKind::And: joined("&"); break;
    case FormulaKind::Or: joined("|"); break;
    case FormulaKind::Implies: joined("->"); break;
    case FormulaKind::Oplus: joined("(+)"); break;
  }
}

void collect_var_sorts(const Term& t, std::vector<SortId>& out) {
  if (t.kind == TermKind::Var) {
    if (static_cast<std::size_t>(t.var) >= out.size()) out.resize(t.var + 1, -1);
    out[t.var] = t.sort;
  } else {
    for (const auto& a : t.args) collect_var_sorts(*a, out);
  }
}

void collect_var_sorts(const Formula& f, std::vector<SortId>& out) {
  for (const auto& a : f.args) collect_var_sorts(*a, out);
  if (f.lhs) collect_var_sorts(*f.lhs, out);
  if (f.rhs) collect_var_sorts(*f.rhs, out);
  for (const auto& c : f.children) collect_var_sorts(*c, out);
}

}  // namespace

std::string to_string(const Structure& s, const Term& t) {
  std::ostringstream os;
  print_term(s, t, os);
  return os.str();
}

std::string to_string(const Structure& s, const Formula& f) {
  std::ostringstream os;
  print_formula(s, f, os);
  return os.str();
}

std::vector<SortId> free_variable_sorts(const Formula& f) {
  std::vector<SortId> out;
  collect_var_sorts(f, out);
  return out;
}

}  // namespace polymine::logic
