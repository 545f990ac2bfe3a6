#pragma once

#include <memory>

#include "polymine/eval/evaluation.hpp"
#include "polymine/io/config.hpp"
#include "polymine/io/policy_io.hpp"
#include "polymine/mining/miner.hpp"

namespace polymine::io {

// Request universe: matrix datasets expose all user-permission pairs
// (user-major), log datasets their entries.
int request_count(const Dataset& d);
bool request_truth(const Dataset& d, int ix);

// Language instance over one training subset: the structure/template pair,
// the training objective, and extraction.
class LanguageInstance {
 public:
  virtual ~LanguageInstance() = default;

  virtual const logic::Structure& structure() const = 0;
  virtual const logic::FormulaPtr& formula() const = 0;
  virtual const logic::FactSet& facts() const = 0;
  virtual expect::LossExpression training_loss() const = 0;
  virtual MinedPolicy extract(const logic::Interpretation& interp) const = 0;
  virtual double complexity(const logic::Interpretation& interp) const = 0;

  static std::unique_ptr<LanguageInstance> build(const Dataset& d, const RunConfig& c,
                                                 const std::vector<int>& train);
};

// Decision of an extracted policy on one dataset request.
bool policy_grants(const MinedPolicy& p, const Dataset& d, int request_ix);

struct MineJob {
  MinedPolicy policy;
  double final_loss = 0.0;
  double complexity = 0.0;
  int best_restart = 0;
  std::vector<mining::TraceRow> trace;  // winning restart
};

struct MineHooks {
  int checkpoint_every = 0;
  std::function<void(const std::string&)> write_checkpoint;  // serialized document
  std::string resume_document;                               // empty: fresh run
};

// Multi-restart best-of-k over the training subset; restart seeds derive
// from `seed`, the run with the lowest final objective wins (ties to the
// earliest restart).
MineJob mine_subset(const Dataset& d, const RunConfig& c, const std::vector<int>& train,
                    std::uint64_t seed, const MineHooks& hooks = {});

evaluation::CrossvalResult run_crossval(const Dataset& d, const RunConfig& c, std::uint64_t seed,
                                        int workers);

evaluation::GridOutcome run_gridsearch(const Dataset& d, const RunConfig& c, int workers);

// Predictions of a policy over the full dataset, plus confusion metrics.
evaluation::Metrics evaluate_policy(const MinedPolicy& p, const Dataset& d);

int resolve_workers(int configured);

// Runs fn(0..n-1) on `workers` threads; exceptions resurface on the caller.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

std::string trace_to_csv(const std::vector<mining::TraceRow>& trace);

}  // namespace polymine::io
