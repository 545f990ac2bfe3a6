#pragma once

#include <span>
#include <vector>

#include "polymine/logic/eval.hpp"

namespace polymine::expect {

using logic::FactId;
using logic::FactSet;
using logic::Interpretation;
using logic::Structure;

// The factorized mean-field distribution: one pmf per random fact, with the
// table's domain equal to the fact set exactly.
class FactorDistribution {
 public:
  FactorDistribution() = default;
  FactorDistribution(const Structure& s, const FactSet& facts);

  static FactorDistribution uniform(const Structure& s, const FactSet& facts);
  static FactorDistribution point_mass(const Structure& s, const FactSet& facts,
                                       const Interpretation& interp);

  const FactSet& facts() const { return *facts_; }
  const Structure& structure() const { return *structure_; }

  std::span<const double> pmf(FactId f) const { return pmf_[static_cast<std::size_t>(f)]; }
  void set_pmf(FactId f, std::span<const double> p);

  // Mean of the fact under its pmf, using the numeric value of range
  // elements; for relation facts this is the Bernoulli success probability.
  double mean(FactId f) const;

  // Checks non-negativity and unit mass within 1e-9.
  void validate() const;

 private:
  const Structure* structure_ = nullptr;
  const FactSet* facts_ = nullptr;
  std::vector<std::vector<double>> pmf_;
};

}  // namespace polymine::expect
