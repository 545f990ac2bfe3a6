#include "polymine/expect/factor.hpp"

#include <cmath>

#include "polymine/errors.hpp"

namespace polymine::expect {

FactorDistribution::FactorDistribution(const Structure& s, const FactSet& facts)
    : structure_(&s), facts_(&facts) {
  pmf_.resize(facts.size());
  for (std::size_t i = 0; i < facts.size(); ++i) {
    int k = facts.range_size(static_cast<FactId>(i));
    pmf_[i].assign(static_cast<std::size_t>(k), 1.0 / k);
  }
}

FactorDistribution FactorDistribution::uniform(const Structure& s, const FactSet& facts) {
  return FactorDistribution(s, facts);
}

FactorDistribution FactorDistribution::point_mass(const Structure& s, const FactSet& facts,
                                                  const Interpretation& interp) {
  FactorDistribution q(s, facts);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    auto& p = q.pmf_[i];
    std::fill(p.begin(), p.end(), 0.0);
    p.at(static_cast<std::size_t>(interp.value(static_cast<FactId>(i)))) = 1.0;
  }
  return q;
}

void FactorDistribution::set_pmf(FactId f, std::span<const double> p) {
  auto& dst = pmf_.at(static_cast<std::size_t>(f));
  if (p.size() != dst.size()) throw Error("pmf size does not match fact range");
  double sum = 0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw NumericError("pmf mass must be finite and >= 0");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw NumericError("pmf must sum to 1");
  std::copy(p.begin(), p.end(), dst.begin());
}

double FactorDistribution::mean(FactId f) const {
  const auto& p = pmf_.at(static_cast<std::size_t>(f));
  logic::SortId rs = facts_->range_sort(f);
  double m = 0;
  for (std::size_t b = 0; b < p.size(); ++b)
    m += p[b] * static_cast<double>(structure_->elem_numeric(rs, static_cast<logic::Elem>(b)));
  return m;
}

void FactorDistribution::validate() const {
  for (std::size_t i = 0; i < pmf_.size(); ++i) {
    double sum = 0;
    for (double v : pmf_[i]) {
      if (!(v >= 0.0) || !std::isfinite(v))
        throw NumericError("pmf mass must be finite and >= 0");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw NumericError("pmf must sum to 1");
  }
}

}  // namespace polymine::expect
