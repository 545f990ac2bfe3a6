#include "polymine/eval/evaluation.hpp"

#include <algorithm>

#include "polymine/mining/rng.hpp"

namespace polymine::evaluation {

Metrics confusion_metrics(const std::vector<bool>& predicted, const std::vector<bool>& truth) {
  if (predicted.size() != truth.size())
    throw ConfigError("prediction and truth vectors differ in length");
  long long tp = 0, fp = 0, pos = 0, neg = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i]) {
      ++pos;
      tp += predicted[i] ? 1 : 0;
    } else {
      ++neg;
      fp += predicted[i] ? 1 : 0;
    }
  }
  Metrics m;
  if (pos > 0) m.tpr = static_cast<double>(tp) / static_cast<double>(pos);
  if (neg > 0) m.fpr = static_cast<double>(fp) / static_cast<double>(neg);
  if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  return m;
}

FoldPlan kfold(int count, int k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (count < k) throw ConfigError("fewer requests than folds");
  std::vector<int> order(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) order[static_cast<std::size_t>(i)] = i;
  mining::Rng rng(seed);
  rng.shuffle(order);
  FoldPlan plan;
  plan.folds.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < count; ++i)
    plan.folds[static_cast<std::size_t>(i % k)].push_back(order[static_cast<std::size_t>(i)]);
  for (auto& f : plan.folds) std::sort(f.begin(), f.end());
  return plan;
}

Metrics average_metrics(const std::vector<Metrics>& folds, std::vector<std::string>& warnings) {
  Metrics out;
  auto average = [&](auto pick, const char* name) -> std::optional<double> {
    double sum = 0;
    int n = 0;
    for (std::size_t i = 0; i < folds.size(); ++i) {
      auto v = pick(folds[i]);
      if (v) {
        sum += *v;
        ++n;
      } else {
        warnings.push_back("fold " + std::to_string(i + 1) + ": " + name +
                           " undefined, excluded from the average");
      }
    }
    if (n == 0) return std::nullopt;
    return sum / n;
  };
  out.tpr = average([](const Metrics& m) { return m.tpr; }, "tpr");
  out.fpr = average([](const Metrics& m) { return m.fpr; }, "fpr");
  out.precision = average([](const Metrics& m) { return m.precision; }, "precision");
  double csum = 0;
  for (const auto& f : folds) csum += f.complexity;
  out.complexity = folds.empty() ? 0 : csum / static_cast<double>(folds.size());
  return out;
}

CrossvalResult crossval(int request_count, const std::vector<bool>& truth, int k,
                        std::uint64_t seed, const FoldMiner& miner) {
  if (static_cast<int>(truth.size()) != request_count)
    throw ConfigError("truth vector does not match the request count");
  FoldPlan plan = kfold(request_count, k, seed);
  CrossvalResult result;
  for (const auto& test : plan.folds) {
    std::vector<char> in_test(static_cast<std::size_t>(request_count), 0);
    for (int i : test) in_test[static_cast<std::size_t>(i)] = 1;
    std::vector<int> train;
    train.reserve(static_cast<std::size_t>(request_count) - test.size());
    for (int i = 0; i < request_count; ++i)
      if (!in_test[static_cast<std::size_t>(i)]) train.push_back(i);

    FoldOutcome outcome = miner(train, test);
    if (outcome.predicted.size() != test.size())
      throw ConfigError("fold prediction size mismatch");
    std::vector<bool> fold_truth;
    fold_truth.reserve(test.size());
    for (int i : test) fold_truth.push_back(truth[static_cast<std::size_t>(i)]);
    Metrics m = confusion_metrics(outcome.predicted, fold_truth);
    m.complexity = outcome.complexity;
    result.per_fold.push_back(m);
  }
  result.averaged = average_metrics(result.per_fold, result.warnings);
  return result;
}

GridOutcome grid_search(const GridCandidates& candidates, int budget, double fpr_cap,
                        std::uint64_t seed, const CellEvaluator& evaluate) {
  std::size_t total = 1;
  for (const auto& [name, values] : candidates.dims) {
    if (values.empty()) throw ConfigError("empty candidate set for '" + name + "'");
    total *= values.size();
  }
  std::vector<std::size_t> cells(total);
  for (std::size_t i = 0; i < total; ++i) cells[i] = i;
  if (budget > 0 && total > static_cast<std::size_t>(budget)) {
    mining::Rng rng(seed);
    rng.shuffle(cells);
    cells.resize(static_cast<std::size_t>(budget));
    std::sort(cells.begin(), cells.end());
  }

  GridOutcome outcome;
  for (std::size_t cell : cells) {
    GridCell entry;
    std::size_t rest = cell;
    for (std::size_t d = candidates.dims.size(); d-- > 0;) {
      const auto& [name, values] = candidates.dims[d];
      entry.values[name] = values[rest % values.size()];
      rest /= values.size();
    }
    entry.result = evaluate(entry.values);
    outcome.table.push_back(std::move(entry));
  }

  // Highest TPR subject to the FPR cap; ties keep the earliest cell.
  for (std::size_t i = 0; i < outcome.table.size(); ++i) {
    const auto& m = outcome.table[i].result.averaged;
    if (!m.tpr || !m.fpr || *m.fpr > fpr_cap) continue;
    if (outcome.best_cell < 0 ||
        *m.tpr > *outcome.table[static_cast<std::size_t>(outcome.best_cell)].result.averaged.tpr) {
      outcome.best_cell = static_cast<int>(i);
      outcome.cap_met = true;
    }
  }
  if (outcome.best_cell < 0) {
    // No cell meets the cap; fall back to the lowest FPR.
    for (std::size_t i = 0; i < outcome.table.size(); ++i) {
      const auto& m = outcome.table[i].result.averaged;
      if (!m.fpr) continue;
      if (outcome.best_cell < 0 ||
          *m.fpr <
              *outcome.table[static_cast<std::size_t>(outcome.best_cell)].result.averaged.fpr)
        outcome.best_cell = static_cast<int>(i);
    }
  }
  return outcome;
}

}  // namespace polymine::evaluation
