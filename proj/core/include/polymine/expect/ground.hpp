#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "polymine/expect/factor.hpp"

namespace polymine::expect {

using logic::Binding;
using logic::Elem;
using logic::Formula;
using logic::FormulaPtr;

struct Pin {
  FactId fact = -1;
  int value = 0;
};

// A formula instance at a fixed binding, compiled to a DAG whose expectation
// decomposes exactly under the factorized distribution:
//   Atom  - joint over the (few) facts it mentions, rigid parts folded away
//   Not   - 1 - E
//   And   - product; children have pairwise disjoint fact sets
//   Oplus - sum; branches carry a mutual-exclusivity obligation
//   Mix   - total expectation over one shared fact; child per value
// Or and -> are rewritten through Not/And. Nodes are in topological order
// (children precede parents).
class Ground {
 public:
  enum class Kind : std::uint8_t { Const, Atom, Not, And, Oplus, Mix };

  struct Node {
    Kind kind = Kind::Const;
    double cval = 0.0;
    std::int32_t facts_off = 0, facts_len = 0;  // Atom deps (sorted) / Mix fact
    std::int32_t table_off = 0, table_len = 0;  // Atom truth table over joint
    std::int32_t kids_off = 0, kids_len = 0;
  };

  std::int32_t root = -1;
  std::vector<Node> nodes;
  std::vector<FactId> fact_pool;
  std::vector<std::uint8_t> table_pool;
  std::vector<std::int32_t> kid_pool;

  std::span<const FactId> facts_of(const Node& n) const {
    return {fact_pool.data() + n.facts_off, static_cast<std::size_t>(n.facts_len)};
  }
  std::span<const std::int32_t> kids_of(const Node& n) const {
    return {kid_pool.data() + n.kids_off, static_cast<std::size_t>(n.kids_len)};
  }

  // Distinct facts occurring anywhere in the DAG, sorted.
  std::vector<FactId> all_facts() const;

  // Direct anchors of a fact: atom nodes listing it and Mix nodes over it.
  std::vector<std::int32_t> anchors(FactId f) const;

  // Expectation of one node given the values of its children.
  double node_value(const Node& n, const FactorDistribution& q, std::optional<Pin> pin,
                    std::span<const double> child_values) const;

  double expect(const FactorDistribution& q, std::optional<Pin> pin = std::nullopt) const;
  bool evaluate(const Interpretation& interp, bool check_exclusive = false) const;
};

struct GroundOptions {
  int max_mix_depth = 2;       // nested conditioning levels before giving up
  int max_atom_joint = 4096;   // cap on an atom's joint assignment count
};

// Compiles formula instances at bindings against one structure + fact set.
// Shared subformulas compile once per (node, relevant pins) pair.
class GroundBuilder {
 public:
  GroundBuilder(const Structure& s, const FactSet& facts, GroundOptions opts = {});

  Ground build(const Formula& f, const Binding& binding);

 private:
  struct PinCtx;  // sorted build-time conditioning pins
  std::int32_t ground(Ground& g, const Formula& f, const Binding& b, const PinCtx& pins,
                      int depth);
  std::int32_t ground_atom(Ground& g, const Formula& f, const Binding& b, const PinCtx& pins);
  std::int32_t mix(Ground& g, const Formula& f, const Binding& b, const PinCtx& pins, int depth,
                   FactId shared);
  std::int32_t or_of(Ground& g, std::vector<std::int32_t> kids);
  std::int32_t not_of(Ground& g, std::int32_t kid);
  std::int32_t const_node(Ground& g, double v);

  // Facts a subformula can mention at the current binding, ignoring pins.
  const std::vector<FactId>& formula_facts(const Formula& f, const Binding& b);
  void term_facts(const logic::Term& t, const Binding& b, std::vector<FactId>& out);
  Elem eval_rigid_term(const logic::Term& t, const Binding& b,
                       const std::vector<std::pair<FactId, int>>& assign) const;
  long long eval_term_numeric(const logic::Term& t, const Binding& b,
                              const std::vector<std::pair<FactId, int>>& assign) const;
  bool atom_truth(const Formula& f, const Binding& b,
                  const std::vector<std::pair<FactId, int>>& assign) const;

  const Structure& s_;
  const FactSet& facts_;
  GroundOptions opts_;
  struct MemoKeyHash {
    std::size_t operator()(const std::pair<const Formula*, std::vector<Pin>>& k) const {
      std::size_t h = std::hash<const void*>()(k.first);
      for (const Pin& p : k.second) {
        h ^= (static_cast<std::size_t>(p.fact) * 1000003u) + static_cast<std::size_t>(p.value) +
             0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return h;
    }
  };
  struct MemoKeyEq {
    bool operator()(const std::pair<const Formula*, std::vector<Pin>>& a,
                    const std::pair<const Formula*, std::vector<Pin>>& b) const {
      if (a.first != b.first || a.second.size() != b.second.size()) return false;
      for (std::size_t i = 0; i < a.second.size(); ++i)
        if (a.second[i].fact != b.second[i].fact || a.second[i].value != b.second[i].value)
          return false;
      return true;
    }
  };
  std::unordered_map<const Formula*, std::vector<FactId>> fact_memo_;
  std::unordered_map<const Formula*, std::int32_t> node_memo0_;  // no relevant pins
  std::unordered_map<std::pair<const Formula*, std::vector<Pin>>, std::int32_t, MemoKeyHash,
                     MemoKeyEq>
      node_memo_;
  std::int32_t const_zero_ = -1, const_one_ = -1;     // per-build dedup
  std::unordered_map<std::int32_t, std::int32_t> not_memo_;
};

inline bool operator<(const Pin& a, const Pin& b) {
  return a.fact != b.fact ? a.fact < b.fact : a.value < b.value;
}

// Expectation of a formula instance; grounds afresh on every call. This is
// the plain reference path; hot loops use CompiledLoss instead.
double expect_formula(const Structure& s, const FactSet& facts, const FactorDistribution& q,
                      const Formula& f, const Binding& binding,
                      std::optional<Pin> pin = std::nullopt);

}  // namespace polymine::expect
