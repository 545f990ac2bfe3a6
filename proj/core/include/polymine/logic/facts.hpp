#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "polymine/logic/formula.hpp"

namespace polymine::logic {

using FactId = std::int32_t;

// A flexible symbol grounded at a concrete argument tuple. Relation facts
// range over {0,1}; function facts range over the result sort's carrier.
struct RandomFact {
  SymbolId symbol = -1;
  std::vector<Elem> args;

  bool operator==(const RandomFact& o) const { return symbol == o.symbol && args == o.args; }
};

// The ordered set of random facts of a formula: every grounding of every
// flexible symbol occurring in it, ordered by symbol name then argument
// tuple in carrier order.
class FactSet {
 public:
  FactSet() = default;
  FactSet(const Structure& s, std::vector<RandomFact> facts);

  std::size_t size() const { return facts_.size(); }
  const RandomFact& fact(FactId id) const { return facts_.at(static_cast<std::size_t>(id)); }
  FactId find(SymbolId sym, std::span<const Elem> args) const;  // -1 if absent
  FactId id_of(SymbolId sym, std::span<const Elem> args) const;  // throws if absent

  // Number of values the fact can take (2 for relations).
  int range_size(FactId id) const { return ranges_[static_cast<std::size_t>(id)]; }
  // The sort whose carrier is the fact's range; BOOL for relation facts.
  SortId range_sort(FactId id) const { return range_sorts_[static_cast<std::size_t>(id)]; }

  std::string describe(const Structure& s, FactId id) const;

  auto begin() const { return facts_.begin(); }
  auto end() const { return facts_.end(); }

 private:
  static std::uint64_t key_hash(SymbolId sym, std::span<const Elem> args);

  std::vector<RandomFact> facts_;
  std::vector<int> ranges_;
  std::vector<SortId> range_sorts_;
  std::unordered_map<std::uint64_t, std::vector<FactId>> index_;
};

// Enumerates the random facts of a formula over the structure's carriers.
// Deterministic: symbols sorted by name, argument tuples in carrier order.
FactSet enumerate_random_facts(const Formula& f, const Structure& s);

// Total assignment of values to a fact set's facts. Relation facts take 0/1,
// function facts take an element index of the range sort.
struct Interpretation {
  const FactSet* facts = nullptr;
  std::vector<int> values;

  static Interpretation zeros(const FactSet& fs);
  int value(FactId id) const { return values[static_cast<std::size_t>(id)]; }
  void set(FactId id, int v) { values.at(static_cast<std::size_t>(id)) = v; }
};

}  // namespace polymine::logic
