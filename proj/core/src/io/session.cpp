#include "polymine/io/session.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "polymine/objectives/objectives.hpp"

namespace polymine::io {

using nlohmann::json;
using expect::LossExpression;
using logic::Binding;
using logic::Elem;
using logic::Interpretation;

int request_count(const Dataset& d) {
  if (d.kind == Dataset::Kind::Matrix)
    return static_cast<int>(d.users.size() * d.perms.size());
  return static_cast<int>(d.log.size());
}

bool request_truth(const Dataset& d, int ix) {
  if (d.kind == Dataset::Kind::Matrix) {
    int np = static_cast<int>(d.perms.size());
    return d.authorized(d.users[static_cast<std::size_t>(ix / np)],
                        d.perms[static_cast<std::size_t>(ix % np)]);
  }
  return d.log[static_cast<std::size_t>(ix)].allowed;
}

namespace {

std::pair<std::string, std::string> matrix_pair(const Dataset& d, int ix) {
  int np = static_cast<int>(d.perms.size());
  return {d.users[static_cast<std::size_t>(ix / np)], d.perms[static_cast<std::size_t>(ix % np)]};
}

std::pair<std::string, std::string> request_pair(const Dataset& d, int ix) {
  if (d.kind == Dataset::Kind::Matrix) return matrix_pair(d, ix);
  const auto& e = d.log[static_cast<std::size_t>(ix)];
  return {e.user, e.perm};
}

// Attribute set of a request, with sides kept apart.
std::set<std::string> request_attrs(const Dataset& d, int ix) {
  auto [u, p] = request_pair(d, ix);
  std::set<std::string> attrs;
  if (auto it = d.user_attrs.find(u); it != d.user_attrs.end())
    for (const auto& a : it->second) attrs.insert("u:" + a);
  if (auto it = d.perm_attrs.find(p); it != d.perm_attrs.end())
    for (const auto& a : it->second) attrs.insert("p:" + a);
  return attrs;
}

std::vector<std::string> prefixed_attvals(const Dataset& d) {
  std::set<std::string> vals;
  for (const auto& [e, as] : d.user_attrs)
    for (const auto& a : as) vals.insert("u:" + a);
  for (const auto& [e, as] : d.perm_attrs)
    for (const auto& a : as) vals.insert("p:" + a);
  return {vals.begin(), vals.end()};
}

lang::StarbacRequest starbac_request(const Dataset& d, int ix) {
  const auto& e = d.log[static_cast<std::size_t>(ix)];
  lang::StarbacRequest r;
  r.month = e.month;
  r.day = e.day;
  r.hour = e.hour;
  r.ux = e.ux;
  r.uy = e.uy;
  r.px = e.px;
  r.py = e.py;
  return r;
}

class RbacInstance : public LanguageInstance {
 public:
  RbacInstance(const Dataset& d, const RunConfig& c, const std::vector<int>& train)
      : dataset_(d), config_(c), train_(train) {
    if (c.language == "bm-rbac") {
      std::vector<std::pair<std::string, std::string>> rows;
      for (const auto& u : d.users) {
        std::string combo;
        if (auto it = d.user_attrs.find(u); it != d.user_attrs.end())
          for (const auto& a : it->second) combo += (combo.empty() ? "" : "|") + a;
        rows.emplace_back(u, combo);
      }
      bm_ = lang::build_bm_rbac(d.users, d.perms, rows, c.roles);
      t_ = &bm_->rbac;
    } else {
      plain_ = lang::build_rbac(d.users, d.perms, c.roles);
      t_ = &*plain_;
    }
  }

  const logic::Structure& structure() const override { return t_->structure; }
  const logic::FormulaPtr& formula() const override { return t_->formula; }
  const logic::FactSet& facts() const override { return t_->facts; }

  LossExpression training_loss() const override {
    std::vector<Binding> requests;
    std::vector<bool> granted;
    const logic::Structure& s = t_->structure;
    for (int ix : train_) {
      auto [u, p] = matrix_pair(dataset_, ix);
      requests.push_back({s.elem(s.users_sort(), u), s.elem(s.perms_sort(), p)});
      granted.push_back(dataset_.authorized(u, p));
    }
    LossExpression loss = objectives::symmetric_difference_loss(t_->formula, requests, granted);
    if (config_.language == "rbac-reg")
      objectives::add_rbac_complexity(loss, *t_, config_.lambda);
    if (config_.language == "bm-rbac")
      objectives::add_bm_rbac_complexity(loss, *bm_, config_.lambda);
    return loss;
  }

  MinedPolicy extract(const Interpretation& interp) const override {
    MinedPolicy p;
    p.language = config_.language;
    p.body = lang::extract_rbac(*t_, interp);
    return p;
  }

  double complexity(const Interpretation& interp) const override {
    LossExpression reg;
    if (bm_)
      objectives::add_bm_rbac_complexity(reg, *bm_, 1.0);
    else
      objectives::add_rbac_complexity(reg, *t_, 1.0);
    return expect::loss_at(t_->structure, reg, interp);
  }

 private:
  const Dataset& dataset_;
  const RunConfig& config_;
  std::vector<int> train_;
  std::optional<lang::RbacTemplate> plain_;
  std::optional<lang::BmRbacTemplate> bm_;
  const lang::RbacTemplate* t_ = nullptr;
};

class AbacInstance : public LanguageInstance {
 public:
  AbacInstance(const Dataset& d, const RunConfig& c, const std::vector<int>& train)
      : dataset_(d), config_(c), train_(train) {
    std::map<std::string, std::set<std::string>> uatt, patt;
    for (const auto& [e, as] : d.user_attrs)
      for (const auto& a : as) uatt[e].insert("u:" + a);
    for (const auto& [e, as] : d.perm_attrs)
      for (const auto& a : as) patt[e].insert("p:" + a);
    t_ = lang::build_abac(d.users, d.perms, prefixed_attvals(d), uatt, patt, c.rules);
  }

  const logic::Structure& structure() const override { return t_->structure; }
  const logic::FormulaPtr& formula() const override { return t_->formula; }
  const logic::FactSet& facts() const override { return t_->facts; }

  LossExpression training_loss() const override {
    const logic::Structure& s = t_->structure;
    auto bind = [&](int ix) -> Binding {
      auto [u, p] = request_pair(dataset_, ix);
      return {s.elem(s.users_sort(), u), s.elem(s.perms_sort(), p)};
    };
    LossExpression loss;
    if (dataset_.kind == Dataset::Kind::Matrix) {
      std::vector<Binding> requests;
      std::vector<bool> granted;
      for (int ix : train_) {
        requests.push_back(bind(ix));
        auto [u, p] = matrix_pair(dataset_, ix);
        granted.push_back(dataset_.authorized(u, p));
      }
      loss = objectives::symmetric_difference_loss(t_->formula, requests, granted);
      objectives::add_abac_complexity(loss, *t_, config_.lambda);
      return loss;
    }
    std::vector<Binding> allowed, denied;
    std::set<std::pair<std::string, std::string>> in_log;
    for (int ix : train_) {
      (dataset_.log[static_cast<std::size_t>(ix)].allowed ? allowed : denied).push_back(bind(ix));
      in_log.insert(request_pair(dataset_, ix));
    }
    objectives::add_log_loss(loss, t_->formula, allowed, denied, config_.lambda11,
                             config_.lambda12);
    if (config_.lambda2 > 0) {
      std::vector<Binding> undecided;
      for (const auto& u : dataset_.users)
        for (const auto& p : dataset_.perms)
          if (!in_log.count({u, p}))
            undecided.push_back({s.elem(s.users_sort(), u), s.elem(s.perms_sort(), p)});
      objectives::add_overgrant_loss(loss, t_->formula, undecided, config_.lambda2);
    }
    objectives::add_abac_complexity(loss, *t_, config_.lambda);
    return loss;
  }

  MinedPolicy extract(const Interpretation& interp) const override {
    MinedPolicy p;
    p.language = config_.language;
    p.body = lang::extract_abac(*t_, interp);
    return p;
  }

  double complexity(const Interpretation& interp) const override {
    LossExpression reg;
    objectives::add_abac_complexity(reg, *t_, 1.0);
    return expect::loss_at(t_->structure, reg, interp);
  }

 private:
  const Dataset& dataset_;
  const RunConfig& config_;
  std::vector<int> train_;
  std::optional<lang::AbacTemplate> t_;
};

class XacmlInstance : public LanguageInstance {
 public:
  XacmlInstance(const Dataset& d, const RunConfig& c, const std::vector<int>& train)
      : dataset_(d), config_(c), train_(train) {
    std::vector<std::pair<std::string, std::set<std::string>>> requests;
    for (std::size_t i = 0; i < train.size(); ++i)
      requests.emplace_back("q" + std::to_string(i), request_attrs(d, train[i]));
    t_ = lang::build_xacml(prefixed_attvals(d), c.xacml_depth, c.xacml_breadth, requests);
  }

  const logic::Structure& structure() const override { return t_->structure; }
  const logic::FormulaPtr& formula() const override { return t_->formula; }
  const logic::FactSet& facts() const override { return t_->facts; }

  LossExpression training_loss() const override {
    LossExpression loss;
    std::vector<Binding> allowed, denied;
    for (std::size_t i = 0; i < train_.size(); ++i) {
      Binding b{static_cast<Elem>(i)};
      if (request_truth(dataset_, train_[i]))
        allowed.push_back(b);
      else
        denied.push_back(b);
    }
    objectives::add_log_loss(loss, t_->formula, allowed, denied, config_.lambda11,
                             config_.lambda12);
    objectives::add_xacml_complexity(loss, *t_, config_.lambda);
    return loss;
  }

  MinedPolicy extract(const Interpretation& interp) const override {
    MinedPolicy p;
    p.language = config_.language;
    p.body = lang::extract_xacml(*t_, interp);
    return p;
  }

  double complexity(const Interpretation& interp) const override {
    LossExpression reg;
    objectives::add_xacml_complexity(reg, *t_, 1.0);
    return expect::loss_at(t_->structure, reg, interp);
  }

 private:
  const Dataset& dataset_;
  const RunConfig& config_;
  std::vector<int> train_;
  std::optional<lang::XacmlTemplate> t_;
};

class StarbacInstance : public LanguageInstance {
 public:
  StarbacInstance(const Dataset& d, const RunConfig& c, const std::vector<int>& train)
      : dataset_(d), config_(c), train_(train) {
    std::vector<lang::StarbacRequest> requests;
    for (int ix : train) requests.push_back(starbac_request(d, ix));
    const auto& buildings = d.buildings.empty() ? lang::fixture_buildings() : d.buildings;
    t_ = lang::build_starbac(requests, buildings, c.starbac);
  }

  const logic::Structure& structure() const override { return t_->structure; }
  const logic::FormulaPtr& formula() const override { return t_->formula; }
  const logic::FactSet& facts() const override { return t_->facts; }

  LossExpression training_loss() const override {
    LossExpression loss;
    std::vector<Binding> allowed, denied;
    for (int ix : train_) {
      Binding b = t_->binding_for(starbac_request(dataset_, ix));
      if (request_truth(dataset_, ix))
        allowed.push_back(std::move(b));
      else
        denied.push_back(std::move(b));
    }
    objectives::add_log_loss(loss, t_->formula, allowed, denied, config_.lambda11,
                             config_.lambda12);
    objectives::add_starbac_complexity(loss, *t_, config_.lambda);
    return loss;
  }

  MinedPolicy extract(const Interpretation& interp) const override {
    MinedPolicy p;
    p.language = "starbac";
    p.body = lang::extract_starbac(*t_, interp);
    p.buildings = t_->buildings;
    return p;
  }

  double complexity(const Interpretation& interp) const override {
    LossExpression reg;
    objectives::add_starbac_complexity(reg, *t_, 1.0);
    return expect::loss_at(t_->structure, reg, interp);
  }

 private:
  const Dataset& dataset_;
  const RunConfig& config_;
  std::vector<int> train_;
  std::optional<lang::StarbacTemplate> t_;
};

}  // namespace

std::unique_ptr<LanguageInstance> LanguageInstance::build(const Dataset& d, const RunConfig& c,
                                                          const std::vector<int>& train) {
  c.validate_against(d);
  if (c.language == "rbac" || c.language == "rbac-reg" || c.language == "bm-rbac")
    return std::make_unique<RbacInstance>(d, c, train);
  if (c.language == "abac" || c.language == "abac-log")
    return std::make_unique<AbacInstance>(d, c, train);
  if (c.language == "xacml") return std::make_unique<XacmlInstance>(d, c, train);
  if (c.language == "starbac") return std::make_unique<StarbacInstance>(d, c, train);
  throw ConfigError("unknown language '" + c.language + "'");
}

bool policy_grants(const MinedPolicy& p, const Dataset& d, int request_ix) {
  if (const auto* rbac = std::get_if<lang::RbacPolicy>(&p.body)) {
    auto [u, q] = request_pair(d, request_ix);
    return rbac->grants(u, q);
  }
  if (const auto* abac = std::get_if<lang::AbacPolicy>(&p.body)) {
    auto [u, q] = request_pair(d, request_ix);
    std::set<std::string> ua, pa;
    if (auto it = d.user_attrs.find(u); it != d.user_attrs.end())
      for (const auto& a : it->second) ua.insert("u:" + a);
    if (auto it = d.perm_attrs.find(q); it != d.perm_attrs.end())
      for (const auto& a : it->second) pa.insert("p:" + a);
    return abac->grants(ua, pa);
  }
  if (const auto* tree = std::get_if<lang::XacmlNode>(&p.body)) {
    return lang::xacml_decide(*tree, request_attrs(d, request_ix)) == lang::XacmlDecision::Allow;
  }
  if (const auto* st = std::get_if<lang::StarbacPolicy>(&p.body)) {
    lang::StarbacRequest r = starbac_request(d, request_ix);
    const auto& buildings = p.buildings.empty() ? lang::fixture_buildings() : p.buildings;
    return st->grants(buildings, r.month, r.day, r.hour, r.ux, r.uy, r.px, r.py);
  }
  throw ConfigError("policy has no body");
}

namespace {

json state_to_json(const mining::RunState& st) {
  json rows = json::array();
  for (const auto& r : st.trace)
    rows.push_back(json::array({r.iteration, r.beta, r.expected_loss, r.true_loss}));
  return json{{"next_iteration", st.next_iteration},
              {"beta", st.beta},
              {"rng", st.rng_state},
              {"pmfs", st.pmfs},
              {"trace", std::move(rows)}};
}

mining::RunState state_from_json(const json& j) {
  mining::RunState st;
  st.next_iteration = j.at("next_iteration").get<int>();
  st.beta = j.at("beta").get<double>();
  st.rng_state = j.at("rng").get<std::string>();
  st.pmfs = j.at("pmfs").get<std::vector<std::vector<double>>>();
  for (const auto& row : j.at("trace")) {
    mining::TraceRow r;
    r.iteration = row.at(0).get<int>();
    r.beta = row.at(1).get<double>();
    r.expected_loss = row.at(2).get<double>();
    r.true_loss = row.at(3).get<double>();
    st.trace.push_back(r);
  }
  return st;
}

}  // namespace

MineJob mine_subset(const Dataset& d, const RunConfig& c, const std::vector<int>& train,
                    std::uint64_t seed, const MineHooks& hooks) {
  auto instance = LanguageInstance::build(d, c, train);
  LossExpression loss = instance->training_loss();
  mining::Miner miner(instance->structure(), instance->facts(), loss);

  int first_restart = 0;
  std::optional<mining::RunState> resume_state;
  MineJob best;
  bool have_best = false;
  std::vector<int> best_values;

  if (!hooks.resume_document.empty()) {
    json doc = json::parse(hooks.resume_document);
    first_restart = doc.at("restart").get<int>();
    resume_state = state_from_json(doc.at("state"));
    if (doc.contains("best") && !doc.at("best").is_null()) {
      const auto& jb = doc.at("best");
      best_values = jb.at("values").get<std::vector<int>>();
      Interpretation interp = Interpretation::zeros(instance->facts());
      for (std::size_t i = 0; i < best_values.size(); ++i)
        interp.set(static_cast<logic::FactId>(i), best_values[i]);
      best.policy = instance->extract(interp);
      best.final_loss = jb.at("loss").get<double>();
      best.complexity = jb.at("complexity").get<double>();
      best.best_restart = jb.at("restart").get<int>();
      have_best = true;
    }
  }

  for (int r = first_restart; r < c.restarts; ++r) {
    std::uint64_t restart_seed =
        mining::derive_seed(seed, 0x524553u, static_cast<std::uint64_t>(r));
    auto on_checkpoint = [&](const mining::RunState& st) {
      if (!hooks.write_checkpoint) return;
      json doc;
      doc["restart"] = r;
      doc["state"] = state_to_json(st);
      if (have_best) {
        doc["best"] = json{{"loss", best.final_loss},
                           {"complexity", best.complexity},
                           {"restart", best.best_restart},
                           {"values", best_values}};
      } else {
        doc["best"] = nullptr;
      }
      hooks.write_checkpoint(doc.dump());
    };

    mining::MineResult res;
    if (r == first_restart && resume_state) {
      mining::Rng rng(0);
      rng.restore(resume_state->rng_state);
      expect::FactorDistribution q0(instance->structure(), instance->facts());
      for (std::size_t i = 0; i < resume_state->pmfs.size(); ++i)
        q0.set_pmf(static_cast<logic::FactId>(i), resume_state->pmfs[i]);
      res = miner.run_with(c.schedule, std::move(q0), std::move(rng),
                           resume_state->next_iteration, resume_state->beta,
                           resume_state->trace, hooks.checkpoint_every, on_checkpoint);
    } else {
      mining::Rng rng(restart_seed);
      expect::FactorDistribution q0 = mining::initialize_q(instance->structure(),
                                                           instance->facts(), rng);
      res = miner.run_with(c.schedule, std::move(q0), std::move(rng), 0, c.schedule.beta0, {},
                           hooks.checkpoint_every, on_checkpoint);
    }

    if (!have_best || res.final_true_loss < best.final_loss) {
      best.policy = instance->extract(res.interp);
      best.final_loss = res.final_true_loss;
      best.complexity = instance->complexity(res.interp);
      best.best_restart = r;
      best.trace = res.trace;
      best_values = res.interp.values;
      have_best = true;
    }
  }
  return best;
}

evaluation::CrossvalResult run_crossval(const Dataset& d, const RunConfig& c, std::uint64_t seed,
                                        int workers) {
  int n = request_count(d);
  std::vector<bool> truth(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) truth[static_cast<std::size_t>(i)] = request_truth(d, i);

  evaluation::FoldPlan plan = evaluation::kfold(n, c.folds, seed);
  int k = static_cast<int>(plan.folds.size());
  std::vector<evaluation::FoldOutcome> outcomes(static_cast<std::size_t>(k));

  parallel_for(k, workers, [&](int fi) {
    const auto& test = plan.folds[static_cast<std::size_t>(fi)];
    std::vector<char> in_test(static_cast<std::size_t>(n), 0);
    for (int i : test) in_test[static_cast<std::size_t>(i)] = 1;
    std::vector<int> train;
    for (int i = 0; i < n; ++i)
      if (!in_test[static_cast<std::size_t>(i)]) train.push_back(i);
    std::uint64_t fold_seed = mining::derive_seed(seed, 0x464f4c44u /* "FOLD" */,
                                                  static_cast<std::uint64_t>(fi));
    MineJob job = mine_subset(d, c, train, fold_seed);
    evaluation::FoldOutcome out;
    out.complexity = job.complexity;
    out.predicted.reserve(test.size());
    for (int i : test) out.predicted.push_back(policy_grants(job.policy, d, i));
    outcomes[static_cast<std::size_t>(fi)] = std::move(out);
  });

  evaluation::CrossvalResult result;
  for (int fi = 0; fi < k; ++fi) {
    const auto& test = plan.folds[static_cast<std::size_t>(fi)];
    std::vector<bool> fold_truth;
    for (int i : test) fold_truth.push_back(truth[static_cast<std::size_t>(i)]);
    evaluation::Metrics m =
        evaluation::confusion_metrics(outcomes[static_cast<std::size_t>(fi)].predicted, fold_truth);
    m.complexity = outcomes[static_cast<std::size_t>(fi)].complexity;
    result.per_fold.push_back(m);
  }
  result.averaged = evaluation::average_metrics(result.per_fold, result.warnings);
  return result;
}

evaluation::GridOutcome run_gridsearch(const Dataset& d, const RunConfig& c, int workers) {
  evaluation::GridCandidates candidates;
  candidates.dims = c.grid;
  if (candidates.dims.empty()) throw ConfigError("grid search needs candidate sets");
  return evaluation::grid_search(
      candidates, c.grid_budget, c.fpr_cap, c.seed,
      [&](const std::map<std::string, double>& point) {
        RunConfig cell = apply_grid_point(c, point);
        return run_crossval(d, cell, c.seed, workers);
      });
}

evaluation::Metrics evaluate_policy(const MinedPolicy& p, const Dataset& d) {
  int n = request_count(d);
  std::vector<bool> predicted, truth;
  predicted.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    predicted.push_back(policy_grants(p, d, i));
    truth.push_back(request_truth(d, i));
  }
  return evaluation::confusion_metrics(predicted, truth);
}

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("POLYMINE_WORKERS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::max(1, std::min(workers, n));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::string trace_to_csv(const std::vector<mining::TraceRow>& trace) {
  std::ostringstream os;
  os << "iteration,beta,expected_loss,true_loss\n";
  os.precision(17);
  for (const auto& r : trace)
    os << r.iteration << "," << r.beta << "," << r.expected_loss << "," << r.true_loss << "\n";
  return os.str();
}

}  // namespace polymine::io
