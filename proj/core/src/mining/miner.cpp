#include "polymine/mining/miner.hpp"

#include <algorithm>
#include <cmath>

namespace polymine::mining {

void AnnealSchedule::validate() const {
  if (!(beta0 > 0)) throw ConfigError("beta0 must be positive");
  if (!(alpha > 1)) throw ConfigError("alpha must exceed 1");
  if (iterations < 0) throw ConfigError("iterations must be non-negative");
}

FactorDistribution initialize_q(const Structure& s, const FactSet& facts, Rng& rng) {
  if (facts.size() == 0) throw ConfigError("cannot initialize factors over an empty fact set");
  FactorDistribution q(s, facts);
  std::vector<double> pmf;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    int k = facts.range_size(static_cast<logic::FactId>(i));
    pmf.resize(static_cast<std::size_t>(k));
    double sum = 0;
    for (auto& m : pmf) {
      m = (0.5 + rng.uniform()) / k;
      sum += m;
    }
    for (auto& m : pmf) m /= sum;
    q.set_pmf(static_cast<logic::FactId>(i), pmf);
  }
  return q;
}

std::vector<double> anneal_pmf(std::span<const double> expected_losses, double beta) {
  double lo = *std::min_element(expected_losses.begin(), expected_losses.end());
  std::vector<double> pmf(expected_losses.size());
  double z = 0;
  for (std::size_t b = 0; b < pmf.size(); ++b) {
    pmf[b] = std::exp(-beta * (expected_losses[b] - lo));
    z += pmf[b];
  }
  for (auto& m : pmf) m /= z;
  return pmf;
}

Interpretation argmax(const FactorDistribution& q, const FactSet& facts) {
  Interpretation interp = Interpretation::zeros(facts);
  for (std::size_t i = 0; i < facts.size(); ++i) {
    auto pmf = q.pmf(static_cast<logic::FactId>(i));
    int best = 0;
    for (std::size_t b = 1; b < pmf.size(); ++b)
      if (pmf[b] > pmf[static_cast<std::size_t>(best)]) best = static_cast<int>(b);
    interp.set(static_cast<logic::FactId>(i), best);
  }
  return interp;
}

Miner::Miner(const Structure& s, const FactSet& facts, const LossExpression& loss,
             expect::GroundOptions gopts)
    : s_(s),
      facts_(facts),
      loss_(loss),
      proto_(s, facts, loss, FactorDistribution(s, facts), gopts) {}

MineResult Miner::run(const AnnealSchedule& schedule, std::uint64_t seed) const {
  schedule.validate();
  Rng rng(seed);
  FactorDistribution q0 = initialize_q(s_, facts_, rng);
  return run_with(schedule, std::move(q0), std::move(rng), 0, schedule.beta0);
}

MineResult Miner::run_from(const AnnealSchedule& schedule, const RunState& state) const {
  schedule.validate();
  FactorDistribution q0(s_, facts_);
  for (std::size_t i = 0; i < state.pmfs.size(); ++i)
    q0.set_pmf(static_cast<logic::FactId>(i), state.pmfs[i]);
  Rng rng(0);
  rng.restore(state.rng_state);
  return run_with(schedule, std::move(q0), std::move(rng), state.next_iteration, state.beta,
                  state.trace);
}

RunState Miner::snapshot(const FactorDistribution& q, const Rng& rng, int next_iteration,
                         double beta, const std::vector<TraceRow>& trace) const {
  RunState st;
  st.next_iteration = next_iteration;
  st.beta = beta;
  st.rng_state = rng.save();
  st.pmfs.reserve(facts_.size());
  for (std::size_t i = 0; i < facts_.size(); ++i) {
    auto p = q.pmf(static_cast<logic::FactId>(i));
    st.pmfs.emplace_back(p.begin(), p.end());
  }
  st.trace = trace;
  return st;
}

MineResult Miner::run_with(const AnnealSchedule& schedule, FactorDistribution q0, Rng rng,
                           int start_iteration, double beta, std::vector<TraceRow> trace,
                           int checkpoint_every,
                           const std::function<void(const RunState&)>& on_checkpoint) const {
  CompiledLoss cache(proto_, std::move(q0));

  std::vector<logic::FactId> order(facts_.size());
  std::vector<double> e;
  for (int it = start_iteration; it < schedule.iterations; ++it) {
    // Start every sweep from caches freshly derived from q and a fresh
    // identity ordering; the sweep is then a pure function of
    // (q, beta, rng), which resume relies on.
    cache.refresh_all();
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<logic::FactId>(i);
    rng.shuffle(order);
    for (logic::FactId f : order) {
      cache.with_all_pins(f, e);
      for (double v : e)
        if (!std::isfinite(v))
          throw MinerAbort("non-finite expected loss while updating " +
                               facts_.describe(s_, f),
                           trace);
      cache.set_pmf(f, anneal_pmf(e, beta));
    }
    TraceRow row;
    row.iteration = it + 1;
    row.beta = beta;
    row.expected_loss = cache.recompute_total();
    Interpretation current = argmax(cache.q(), facts_);
    row.true_loss = expect::loss_at(s_, loss_, current);
    if (!std::isfinite(row.expected_loss))
      throw MinerAbort("non-finite expected loss after sweep", trace);
    trace.push_back(row);
    beta *= schedule.alpha;
    if (checkpoint_every > 0 && on_checkpoint && (it + 1) % checkpoint_every == 0 &&
        it + 1 < schedule.iterations)
      on_checkpoint(snapshot(cache.q(), rng, it + 1, beta, trace));
  }

  MineResult res;
  res.q = cache.q();
  res.interp = argmax(res.q, facts_);
  res.trace = std::move(trace);
  res.final_true_loss = expect::loss_at(s_, loss_, res.interp);
  return res;
}

MonotonicityReport expected_loss_monotonicity_probe(const std::vector<TraceRow>& trace) {
  MonotonicityReport report;
  if (trace.empty()) return report;
  int total = trace.back().iteration;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    double delta = trace[i].expected_loss - trace[i - 1].expected_loss;
    if (delta > 1e-6) {
      MonotonicityReport::Increase inc;
      inc.iteration = trace[i].iteration;
      inc.delta = delta;
      inc.flagged_late = trace[i].iteration > total / 2;
      report.increases.push_back(inc);
    }
  }
  std::size_t window = std::min<std::size_t>(10, trace.size());
  double lo = trace[trace.size() - window].expected_loss;
  double hi = lo;
  for (std::size_t i = trace.size() - window; i < trace.size(); ++i) {
    lo = std::min(lo, trace[i].expected_loss);
    hi = std::max(hi, trace[i].expected_loss);
  }
  report.final_window_variation = hi - lo;
  return report;
}

}  // namespace polymine::mining
