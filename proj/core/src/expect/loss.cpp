#include "polymine/expect/loss.hpp"

#include <algorithm>
#include <cmath>

namespace polymine::expect {

namespace {

double ipow(double x, int n) {
  double r = 1;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

double fact_numeric(const Structure& s, const FactSet& facts, FactId f, int value) {
  return static_cast<double>(
      s.elem_numeric(facts.range_sort(f), static_cast<logic::Elem>(value)));
}

}  // namespace

double loss_at(const Structure& s, const LossExpression& loss, const Interpretation& interp,
               bool check_exclusive) {
  double total = loss.constant;
  logic::EvalOptions opts;
  opts.check_exclusive = check_exclusive;
  for (const auto& t : loss.formula_terms) {
    bool v = logic::eval_formula(s, interp, t.binding, *t.formula, opts);
    total += t.weight * (t.complement ? (v ? 0.0 : 1.0) : (v ? 1.0 : 0.0));
  }
  for (const auto& m : loss.monomials) {
    double prod = m.weight;
    for (auto [f, n] : m.factors)
      prod *= ipow(fact_numeric(s, *interp.facts, f, interp.value(f)), n);
    total += prod;
  }
  return total;
}

double expect_loss(const Structure& s, const FactSet& facts, const FactorDistribution& q,
                   const LossExpression& loss, std::optional<Pin> pin) {
  double total = loss.constant;
  GroundBuilder builder(s, facts);
  for (const auto& t : loss.formula_terms) {
    Ground g = builder.build(*t.formula, t.binding);
    double v = g.expect(q, pin);
    total += t.weight * (t.complement ? 1.0 - v : v);
  }
  for (const auto& m : loss.monomials) {
    double prod = m.weight;
    for (auto [f, n] : m.factors) {
      double mean = (pin && pin->fact == f) ? fact_numeric(s, facts, f, pin->value) : q.mean(f);
      prod *= ipow(mean, n);
    }
    total += prod;
  }
  return total;
}

CompiledLoss::CompiledLoss(const Structure& s, const FactSet& facts, const LossExpression& loss,
                           FactorDistribution q, GroundOptions opts)
    : s_(&s), facts_(&facts), q_(std::move(q)) {
  q_.validate();
  auto shape = std::make_shared<Shape>();
  shape->constant = loss.constant;
  GroundBuilder builder(s, facts, opts);
  std::int32_t nfacts = static_cast<std::int32_t>(facts.size());

  std::vector<std::vector<std::int32_t>> fact_terms(static_cast<std::size_t>(nfacts));
  std::vector<std::int32_t> stamp;
  std::vector<std::int32_t> closure;
  for (const auto& ft : loss.formula_terms) {
    TermShape t;
    t.weight = ft.weight;
    t.complement = ft.complement;
    t.g = builder.build(*ft.formula, ft.binding);
    std::size_t n = t.g.nodes.size();
    shape->max_nodes = std::max(shape->max_nodes, n);

    // Parents, local to this construction.
    std::vector<std::int32_t> pdeg(n + 1, 0);
    for (const auto& node : t.g.nodes)
      for (auto k : t.g.kids_of(node)) ++pdeg[static_cast<std::size_t>(k) + 1];
    for (std::size_t i = 0; i < n; ++i) pdeg[i + 1] += pdeg[i];
    std::vector<std::int32_t> ppool(static_cast<std::size_t>(pdeg[n]));
    {
      std::vector<std::int32_t> cursor(pdeg.begin(), pdeg.end() - 1);
      for (std::size_t i = 0; i < n; ++i)
        for (auto k : t.g.kids_of(t.g.nodes[i]))
          ppool[static_cast<std::size_t>(cursor[static_cast<std::size_t>(k)]++)] =
              static_cast<std::int32_t>(i);
    }

    // Anchors per fact, then the upward closure per fact, in id order.
    std::vector<std::pair<FactId, std::int32_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
      for (FactId f : t.g.facts_of(t.g.nodes[i]))
        pairs.emplace_back(f, static_cast<std::int32_t>(i));
    std::sort(pairs.begin(), pairs.end());

    stamp.assign(n, -1);
    std::int32_t term_epoch = 0;
    t.affected.off.assign(static_cast<std::size_t>(nfacts) + 1, 0);
    std::int32_t tid = static_cast<std::int32_t>(shape->terms.size());
    std::size_t p = 0;
    for (std::int32_t f = 0; f < nfacts; ++f) {
      std::size_t begin = p;
      closure.clear();
      ++term_epoch;
      while (p < pairs.size() && pairs[p].first == f) {
        std::int32_t id = pairs[p].second;
        if (stamp[static_cast<std::size_t>(id)] != term_epoch) {
          stamp[static_cast<std::size_t>(id)] = term_epoch;
          closure.push_back(id);
        }
        ++p;
      }
      for (std::size_t head = 0; head < closure.size(); ++head) {
        std::int32_t id = closure[head];
        for (std::int32_t x = pdeg[static_cast<std::size_t>(id)];
             x < pdeg[static_cast<std::size_t>(id) + 1]; ++x) {
          std::int32_t parent = ppool[static_cast<std::size_t>(x)];
          if (stamp[static_cast<std::size_t>(parent)] != term_epoch) {
            stamp[static_cast<std::size_t>(parent)] = term_epoch;
            closure.push_back(parent);
          }
        }
      }
      std::sort(closure.begin(), closure.end());
      t.affected.pool.insert(t.affected.pool.end(), closure.begin(), closure.end());
      t.affected.off[static_cast<std::size_t>(f) + 1] =
          static_cast<std::int32_t>(t.affected.pool.size());
      if (p > begin) fact_terms[static_cast<std::size_t>(f)].push_back(tid);
    }
    shape->terms.push_back(std::move(t));
  }

  shape->fact_terms.off.assign(static_cast<std::size_t>(nfacts) + 1, 0);
  for (std::int32_t f = 0; f < nfacts; ++f)
    shape->fact_terms.off[static_cast<std::size_t>(f) + 1] =
        shape->fact_terms.off[static_cast<std::size_t>(f)] +
        static_cast<std::int32_t>(fact_terms[static_cast<std::size_t>(f)].size());
  for (std::int32_t f = 0; f < nfacts; ++f)
    for (auto t : fact_terms[static_cast<std::size_t>(f)]) shape->fact_terms.pool.push_back(t);

  std::vector<std::vector<std::int32_t>> fact_monos(static_cast<std::size_t>(nfacts));
  for (const auto& mt : loss.monomials) {
    Monomial m;
    m.weight = mt.weight;
    m.factors = mt.factors;
    std::int32_t mid = static_cast<std::int32_t>(shape->monos.size());
    for (auto [f, n] : m.factors) {
      auto& row = fact_monos[static_cast<std::size_t>(f)];
      if (row.empty() || row.back() != mid) row.push_back(mid);
    }
    shape->monos.push_back(std::move(m));
  }
  shape->fact_monos.off.assign(static_cast<std::size_t>(nfacts) + 1, 0);
  for (std::int32_t f = 0; f < nfacts; ++f)
    shape->fact_monos.off[static_cast<std::size_t>(f) + 1] =
        shape->fact_monos.off[static_cast<std::size_t>(f)] +
        static_cast<std::int32_t>(fact_monos[static_cast<std::size_t>(f)].size());
  for (std::int32_t f = 0; f < nfacts; ++f)
    for (auto m : fact_monos[static_cast<std::size_t>(f)]) shape->fact_monos.pool.push_back(m);

  shared_ = std::move(shape);
  scratch_.resize(shared_->max_nodes);
  stamp_.assign(shared_->max_nodes, -1);
  cache_.resize(shared_->terms.size());
  mono_cache_.resize(shared_->monos.size());
  refresh_all();
}

CompiledLoss::CompiledLoss(const CompiledLoss& proto, FactorDistribution q)
    : s_(proto.s_), facts_(proto.facts_), shared_(proto.shared_), q_(std::move(q)) {
  q_.validate();
  scratch_.resize(shared_->max_nodes);
  stamp_.assign(shared_->max_nodes, -1);
  cache_.resize(shared_->terms.size());
  mono_cache_.resize(shared_->monos.size());
  refresh_all();
}

void CompiledLoss::refresh_term(std::size_t t) {
  const TermShape& shape = shared_->terms[t];
  std::size_t n = shape.g.nodes.size();
  auto& cache = cache_[t];
  cache.resize(n);
  std::vector<double> kid_vals;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& node = shape.g.nodes[i];
    kid_vals.clear();
    for (auto k : shape.g.kids_of(node)) kid_vals.push_back(cache[static_cast<std::size_t>(k)]);
    cache[i] = shape.g.node_value(node, q_, std::nullopt, kid_vals);
  }
}

double CompiledLoss::recompute_total() {
  double total = shared_->constant;
  for (std::size_t t = 0; t < shared_->terms.size(); ++t) total += term_contribution(t);
  for (double m : mono_cache_) total += m;
  total_ = total;
  return total_;
}

void CompiledLoss::refresh_all() {
  for (std::size_t t = 0; t < shared_->terms.size(); ++t) refresh_term(t);
  for (std::size_t m = 0; m < shared_->monos.size(); ++m)
    mono_cache_[m] = monomial_value(shared_->monos[m], nullptr);
  recompute_total();
}

double CompiledLoss::monomial_value(const Monomial& m, const Pin* pin) const {
  double prod = m.weight;
  for (auto [f, n] : m.factors) {
    double mean =
        (pin && pin->fact == f) ? fact_numeric(*s_, *facts_, f, pin->value) : q_.mean(f);
    prod *= ipow(mean, n);
  }
  return prod;
}

double CompiledLoss::node_value(const TermShape& shape, std::int32_t id, const Pin* pin,
                                const std::vector<double>& cache) const {
  const Ground& g = shape.g;
  const Ground::Node& n = g.nodes[static_cast<std::size_t>(id)];
  auto value_of = [&](std::int32_t k) {
    return stamp_[static_cast<std::size_t>(k)] == epoch_ ? scratch_[static_cast<std::size_t>(k)]
                                                         : cache[static_cast<std::size_t>(k)];
  };
  switch (n.kind) {
    case Ground::Kind::Const:
      return n.cval;
    case Ground::Kind::Atom: {
      auto deps = g.facts_of(n);
      const std::uint8_t* table = g.table_pool.data() + n.table_off;
      if (deps.size() == 1) {
        FactId d = deps[0];
        if (pin && pin->fact == d) return static_cast<double>(table[pin->value]);
        auto p = q_.pmf(d);
        double tot = 0;
        for (std::size_t v = 0; v < p.size(); ++v) tot += p[v] * table[v];
        return tot;
      }
      double tot = 0;
      for (std::int32_t ix = 0; ix < n.table_len; ++ix) {
        if (!table[ix]) continue;
        double prob = 1;
        std::int32_t rest = ix;
        for (std::size_t i = deps.size(); i-- > 0;) {
          int range = facts_->range_size(deps[i]);
          int digit = rest % range;
          rest /= range;
          if (pin && pin->fact == deps[i]) {
            if (digit != pin->value) {
              prob = 0;
              break;
            }
          } else {
            prob *= q_.pmf(deps[i])[static_cast<std::size_t>(digit)];
          }
        }
        tot += prob;
      }
      return tot;
    }
    case Ground::Kind::Not:
      return 1.0 - value_of(g.kid_pool[n.kids_off]);
    case Ground::Kind::And: {
      double prod = 1;
      for (auto k : g.kids_of(n)) prod *= value_of(k);
      return prod;
    }
    case Ground::Kind::Oplus: {
      double sum = 0;
      for (auto k : g.kids_of(n)) sum += value_of(k);
      return sum;
    }
    case Ground::Kind::Mix: {
      FactId d = g.fact_pool[n.facts_off];
      if (pin && pin->fact == d) return value_of(g.kid_pool[n.kids_off + pin->value]);
      auto p = q_.pmf(d);
      double tot = 0;
      for (std::size_t v = 0; v < p.size(); ++v)
        tot += p[v] * value_of(g.kid_pool[n.kids_off + static_cast<std::int32_t>(v)]);
      return tot;
    }
  }
  return 0;
}

double CompiledLoss::with_pin(FactId f, int value) {
  Pin pin{f, value};
  double adj = 0;
  for (auto tid : shared_->fact_terms.row(f)) {
    const TermShape& shape = shared_->terms[static_cast<std::size_t>(tid)];
    const auto& cache = cache_[static_cast<std::size_t>(tid)];
    auto affected = shape.affected.row(f);
    ++epoch_;
    for (auto id : affected) stamp_[static_cast<std::size_t>(id)] = epoch_;
    for (auto id : affected)
      scratch_[static_cast<std::size_t>(id)] = node_value(shape, id, &pin, cache);
    double now = cache[static_cast<std::size_t>(shape.g.root)];
    double pinned = stamp_[static_cast<std::size_t>(shape.g.root)] == epoch_
                        ? scratch_[static_cast<std::size_t>(shape.g.root)]
                        : now;
    double d = pinned - now;
    adj += shape.weight * (shape.complement ? -d : d);
  }
  for (auto mid : shared_->fact_monos.row(f)) {
    adj += monomial_value(shared_->monos[static_cast<std::size_t>(mid)], &pin) -
           mono_cache_[static_cast<std::size_t>(mid)];
  }
  return total_ + adj;
}

void CompiledLoss::with_all_pins(FactId f, std::vector<double>& out) {
  int range = facts_->range_size(f);
  out.assign(static_cast<std::size_t>(range), total_);
  for (auto tid : shared_->fact_terms.row(f)) {
    const TermShape& shape = shared_->terms[static_cast<std::size_t>(tid)];
    const auto& cache = cache_[static_cast<std::size_t>(tid)];
    auto affected = shape.affected.row(f);
    double now = cache[static_cast<std::size_t>(shape.g.root)];
    double sign = shape.complement ? -shape.weight : shape.weight;
    ++epoch_;
    for (auto id : affected) stamp_[static_cast<std::size_t>(id)] = epoch_;
    bool hits_root =
        !affected.empty() && affected.back() == shape.g.root;
    for (int b = 0; b < range; ++b) {
      Pin pin{f, b};
      for (auto id : affected)
        scratch_[static_cast<std::size_t>(id)] = node_value(shape, id, &pin, cache);
      double pinned = hits_root ? scratch_[static_cast<std::size_t>(shape.g.root)] : now;
      out[static_cast<std::size_t>(b)] += sign * (pinned - now);
    }
  }
  for (auto mid : shared_->fact_monos.row(f)) {
    const Monomial& m = shared_->monos[static_cast<std::size_t>(mid)];
    for (int b = 0; b < range; ++b) {
      Pin pin{f, b};
      out[static_cast<std::size_t>(b)] +=
          monomial_value(m, &pin) - mono_cache_[static_cast<std::size_t>(mid)];
    }
  }
}

std::vector<double> CompiledLoss::with_all_pins(FactId f) {
  std::vector<double> out;
  with_all_pins(f, out);
  return out;
}

void CompiledLoss::set_pmf(FactId f, std::span<const double> pmf) {
  q_.set_pmf(f, pmf);
  for (auto tid : shared_->fact_terms.row(f)) {
    const TermShape& shape = shared_->terms[static_cast<std::size_t>(tid)];
    auto& cache = cache_[static_cast<std::size_t>(tid)];
    auto affected = shape.affected.row(f);
    double before = term_contribution(static_cast<std::size_t>(tid));
    ++epoch_;
    for (auto id : affected) stamp_[static_cast<std::size_t>(id)] = epoch_;
    for (auto id : affected)
      scratch_[static_cast<std::size_t>(id)] = node_value(shape, id, nullptr, cache);
    for (auto id : affected)
      cache[static_cast<std::size_t>(id)] = scratch_[static_cast<std::size_t>(id)];
    total_ += term_contribution(static_cast<std::size_t>(tid)) - before;
  }
  for (auto mid : shared_->fact_monos.row(f)) {
    double before = mono_cache_[static_cast<std::size_t>(mid)];
    mono_cache_[static_cast<std::size_t>(mid)] =
        monomial_value(shared_->monos[static_cast<std::size_t>(mid)], nullptr);
    total_ += mono_cache_[static_cast<std::size_t>(mid)] - before;
  }
}

std::span<const std::int32_t> CompiledLoss::terms_containing(FactId f) const {
  return shared_->fact_terms.row(f);
}

double CompiledLoss::term_value(std::size_t t) const {
  const TermShape& shape = shared_->terms[t];
  return cache_[t][static_cast<std::size_t>(shape.g.root)];
}

}  // namespace polymine::expect
