#pragma once

#include <optional>
#include <string>
#include <vector>

#include "polymine/logic/formula.hpp"

namespace polymine::logic {

// Atomic formulas are compared syntactically: symbol name plus argument term
// structure, with rigid constants folded to the carrier element they denote.
struct DiversityResult {
  bool diverse = true;
  std::string offending_atom;  // set when !diverse
};

struct UnrelatedResult {
  bool unrelated = true;
  std::string shared_atom;  // set when !unrelated
};

// True iff every atomic formula occurring in f occurs exactly once.
DiversityResult check_diverse(const Structure& s, const Formula& f);

// True iff no atomic formula occurs in two distinct members.
UnrelatedResult check_unrelated(const Structure& s,
                                const std::vector<FormulaPtr>& formulas);

// Canonical key of an atom; exposed for tests.
std::string atom_key(const Structure& s, const Formula& atom);

}  // namespace polymine::logic
