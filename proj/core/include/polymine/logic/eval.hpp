#pragma once

#include "polymine/logic/facts.hpp"

namespace polymine::logic {

// Assignment of carrier elements to variable ids; index = variable id.
using Binding = std::vector<Elem>;

struct EvalOptions {
  // Assert that at most one branch of each mutually-exclusive disjunction
  // holds at the evaluated point; fires as a DecompositionError.
  bool check_exclusive = false;
};

// Value of a term under rigid interpretation + interp, at the binding.
Elem eval_term(const Structure& s, const Interpretation& interp, const Binding& b, const Term& t);

// Truth value of a formula; true maps to 1, false to 0.
bool eval_formula(const Structure& s, const Interpretation& interp, const Binding& b,
                  const Formula& f, const EvalOptions& opts = {});

}  // namespace polymine::logic
