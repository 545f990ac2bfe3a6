#pragma once

#include <utility>

#include "polymine/expect/loss.hpp"

namespace polymine::oracle {

using expect::LossExpression;
using logic::FactSet;
using logic::Interpretation;
using logic::Structure;

// Full table of the posterior exp(-beta * L) / Z over every interpretation,
// indexed by a mixed-radix counter over the facts in canonical order (last
// fact varies fastest). State spaces are capped at 2^20.
struct ExactPosterior {
  double beta = 0.0;
  double min_loss = 0.0;
  double shifted_partition = 0.0;  // sum of exp(-beta*(L - min_loss))
  std::vector<double> losses;
  std::vector<double> probabilities;

  std::size_t index_of(const Interpretation& interp) const;
  Interpretation interpretation_at(std::size_t index, const FactSet& facts) const;
  double probability(const Interpretation& interp) const;

 private:
  friend ExactPosterior exact_posterior(const Structure&, const FactSet&, const LossExpression&,
                                        double);
  std::vector<int> ranges_;
  const FactSet* facts_ = nullptr;
};

ExactPosterior exact_posterior(const Structure& s, const FactSet& facts,
                               const LossExpression& loss, double beta);

// Exhaustive minimum of the objective; ties resolved to the first
// interpretation in enumeration order.
std::pair<double, Interpretation> exact_min_loss(const Structure& s, const FactSet& facts,
                                                 const LossExpression& loss);

// All interpretation losses in enumeration order (the loss table the two
// calls above are built from).
std::vector<double> enumerate_losses(const Structure& s, const FactSet& facts,
                                     const LossExpression& loss);

struct EntropyReport {
  bool ordering_holds = true;   // lower loss implies strictly higher probability
  std::string violation;        // description of the first violation
  double entropy = 0.0;         // nats
};

EntropyReport entropy_check(const ExactPosterior& posterior, double beta);

}  // namespace polymine::oracle
