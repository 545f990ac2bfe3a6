#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "polymine/errors.hpp"

namespace polymine::evaluation {

struct Metrics {
  std::optional<double> tpr, fpr, precision;  // absent when the denominator is 0
  double complexity = 0.0;
};

// tpr = |A_hat & A| / |A|, fpr = |A_hat & D| / |D|,
// precision = |A_hat & A| / |A_hat & (A u D)|.
Metrics confusion_metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth);

struct FoldPlan {
  std::vector<std::vector<int>> folds;  // disjoint, union = 0..count-1, sizes differ by <= 1
};

FoldPlan kfold(int count, int k, std::uint64_t seed);

struct CrossvalResult {
  Metrics averaged;
  std::vector<Metrics> per_fold;
  std::vector<std::string> warnings;  // folds dropped from an average
};

struct FoldOutcome {
  std::vector<bool> predicted;  // aligned with the fold's test indices
  double complexity = 0.0;
};

using FoldMiner =
    std::function<FoldOutcome(const std::vector<int>& train, const std::vector<int>& test)>;

// K-fold evaluation of a miner over a request universe with known truth.
// Metrics are computed only on requests outside the miner's training input.
CrossvalResult crossval(int request_count, const std::vector<bool>& truth, int k,
                        std::uint64_t seed, const FoldMiner& miner);

Metrics average_metrics(const std::vector<Metrics>& folds, std::vector<std::string>& warnings);

struct GridCandidates {
  // Ordered dimensions; cells enumerate the Cartesian product with the last
  // dimension varying fastest.
  std::vector<std::pair<std::string, std::vector<double>>> dims;
};

struct GridCell {
  std::map<std::string, double> values;
  CrossvalResult result;
};

struct GridOutcome {
  std::vector<GridCell> table;      // evaluated cells in canonical order
  int best_cell = -1;               // argmax TPR subject to fpr <= cap
  bool cap_met = false;             // false: best_cell is the lowest-FPR fallback
};

using CellEvaluator = std::function<CrossvalResult(const std::map<std::string, double>&)>;

// Cartesian sweep, subsampled down to `budget` cells with the given seed
// when the product is larger.
GridOutcome grid_search(const GridCandidates& candidates, int budget, double fpr_cap,
                        std::uint64_t seed, const CellEvaluator& evaluate);

}  // namespace polymine::evaluation
