#pragma once

#include <memory>
#include <string>
#include <vector>

#include "polymine/logic/signature.hpp"

namespace polymine::logic {

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class TermKind { Var, Lit, App, Sum };

// Quantifier-free many-sorted terms. Constants are 0-ary App nodes; Lit nodes
// denote a carrier element directly (the grounded form of a rigid constant).
// Sum adds the numeric values of its arguments; it may appear only inside
// ordering comparisons, never as a symbol argument.
struct Term {
  TermKind kind = TermKind::Var;
  SortId sort = -1;  // -2 for Sum (no carrier)

  // Var
  int var = -1;
  std::string var_name;

  // Lit
  Elem lit = -1;

  // App / Sum
  SymbolId symbol = -1;
  std::vector<TermPtr> args;
};

inline constexpr SortId kNumericSort = -2;

enum class FormulaKind { True, False, Rel, Cmp, Not, And, Or, Implies, Oplus };
enum class CmpOp { Eq, Le, Lt };

// Formula AST. Oplus is an n-ary disjunction whose branches are asserted to
// be pairwise mutually exclusive; the obligation is checked at evaluation
// time when requested, not proven statically.
struct Formula {
  FormulaKind kind = FormulaKind::True;

  // Rel
  SymbolId symbol = -1;
  std::vector<TermPtr> args;

  // Cmp
  CmpOp op = CmpOp::Eq;
  TermPtr lhs, rhs;

  // Not (1), Implies (2), And/Or/Oplus (n)
  std::vector<FormulaPtr> children;
};

// Type-checking builders bound to a structure's signature.
class FormulaFactory {
 public:
  explicit FormulaFactory(const Structure& s) : s_(s) {}

  TermPtr var(int id, SortId sort, std::string name) const;
  TermPtr lit(SortId sort, Elem e) const;
  TermPtr lit(SortId sort, const std::string& elem_name) const;
  TermPtr app(SymbolId symbol, std::vector<TermPtr> args) const;
  TermPtr app(const std::string& symbol, std::vector<TermPtr> args) const;
  TermPtr constant(const std::string& symbol) const { return app(symbol, {}); }
  TermPtr sum(std::vector<TermPtr> args) const;  // numeric addition

  FormulaPtr top() const;
  FormulaPtr bottom() const;
  FormulaPtr rel(SymbolId symbol, std::vector<TermPtr> args) const;
  FormulaPtr rel(const std::string& symbol, std::vector<TermPtr> args) const;
  FormulaPtr eq(TermPtr a, TermPtr b) const;
  FormulaPtr le(TermPtr a, TermPtr b) const;
  FormulaPtr lt(TermPtr a, TermPtr b) const;
  FormulaPtr negate(FormulaPtr f) const;
  FormulaPtr conj(std::vector<FormulaPtr> fs) const;   // n-ary and, [] = true
  FormulaPtr disj(std::vector<FormulaPtr> fs) const;   // n-ary or, [] = false
  FormulaPtr implies(FormulaPtr a, FormulaPtr b) const;
  FormulaPtr oplus(std::vector<FormulaPtr> fs) const;  // mutually exclusive or

 private:
  FormulaPtr cmp(CmpOp op, TermPtr a, TermPtr b) const;
  const Structure& s_;
};

// Human-readable rendering, used in error messages and diagnostics.
std::string to_string(const Structure& s, const Term& t);
std::string to_string(const Structure& s, const Formula& f);

// Number of free variables (max var id + 1) and per-variable sorts.
std::vector<SortId> free_variable_sorts(const Formula& f);

}  // namespace polymine::logic
