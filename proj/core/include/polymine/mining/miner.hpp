#pragma once

#include <functional>
#include <optional>

#include "polymine/expect/loss.hpp"
#include "polymine/mining/rng.hpp"

namespace polymine::mining {

using expect::CompiledLoss;
using expect::FactorDistribution;
using expect::LossExpression;
using logic::FactSet;
using logic::Interpretation;
using logic::Structure;

struct AnnealSchedule {
  double beta0 = 0.05;
  double alpha = 1.1;
  int iterations = 200;

  void validate() const;
};

struct TraceRow {
  int iteration = 0;  // 1-based; row recorded after the sweep
  double beta = 0.0;
  double expected_loss = 0.0;
  double true_loss = 0.0;  // objective at the current argmax interpretation
};

// Snapshot sufficient to resume a run bit-identically.
struct RunState {
  int next_iteration = 0;  // sweeps already performed
  double beta = 0.0;
  std::string rng_state;
  std::vector<std::vector<double>> pmfs;
  std::vector<TraceRow> trace;
};

struct MineResult {
  Interpretation interp;
  FactorDistribution q;
  std::vector<TraceRow> trace;
  double final_true_loss = 0.0;
};

// Aborted run; carries the trace collected so far.
struct MinerAbort : NumericError {
  MinerAbort(const std::string& what, std::vector<TraceRow> t)
      : NumericError(what), trace(std::move(t)) {}
  std::vector<TraceRow> trace;
};

// Each pmf is uniform plus a bounded perturbation (mass in [0.5/k, 1.5/k))
// and renormalized; deterministic in the rng state.
FactorDistribution initialize_q(const Structure& s, const FactSet& facts, Rng& rng);

// Shifted softmax of -beta * e; the shift by min(e) leaves the value of the
// unshifted form intact while avoiding overflow at large beta.
std::vector<double> anneal_pmf(std::span<const double> expected_losses, double beta);

// Argmax of each factor, ties broken toward the smallest value in range order.
Interpretation argmax(const FactorDistribution& q, const FactSet& facts);

class Miner {
 public:
  Miner(const Structure& s, const FactSet& facts, const LossExpression& loss,
        expect::GroundOptions gopts = {});

  // Randomized sweeps over all facts (fresh permutation per iteration),
  // in-place factor updates, beta *= alpha per iteration.
  MineResult run(const AnnealSchedule& schedule, std::uint64_t seed) const;

  // Resume from a snapshot; produces the identical remainder of the run.
  MineResult run_from(const AnnealSchedule& schedule, const RunState& state) const;

  // Run with a caller-supplied initial distribution (used by tests and by
  // resume); when on_checkpoint is set it fires every `checkpoint_every`
  // completed iterations.
  MineResult run_with(const AnnealSchedule& schedule, FactorDistribution q0, Rng rng,
                      int start_iteration, double beta,
                      std::vector<TraceRow> trace = {},
                      int checkpoint_every = 0,
                      const std::function<void(const RunState&)>& on_checkpoint = nullptr) const;

  RunState snapshot(const FactorDistribution& q, const Rng& rng, int next_iteration, double beta,
                    const std::vector<TraceRow>& trace) const;

  const FactSet& facts() const { return facts_; }
  const LossExpression& loss() const { return loss_; }

 private:
  const Structure& s_;
  const FactSet& facts_;
  const LossExpression& loss_;
  CompiledLoss proto_;  // grounded once; runs share the shape
};

struct MonotonicityReport {
  struct Increase {
    int iteration = 0;
    double delta = 0.0;
    bool flagged_late = false;  // raises past the midpoint of the schedule
  };
  std::vector<Increase> increases;
  double final_window_variation = 0.0;  // max-min expected loss, last 10 rows
};

MonotonicityReport expected_loss_monotonicity_probe(const std::vector<TraceRow>& trace);

}  // namespace polymine::mining
