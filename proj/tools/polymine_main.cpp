#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "polymine/io/session.hpp"
#include "polymine/oracle/exact.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polymine;

namespace {

struct DataArgs {
  std::string path;
  std::string format = "matrix";  // matrix | log
  std::string user_attrs, perm_attrs, buildings;
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.path, "dataset CSV")->required();
  cmd->add_option("--format", args.format, "matrix | log")
      ->check(CLI::IsMember({"matrix", "log"}));
  cmd->add_option("--user-attrs", args.user_attrs, "user attribute CSV");
  cmd->add_option("--perm-attrs", args.perm_attrs, "permission attribute CSV");
  cmd->add_option("--buildings", args.buildings, "building geometry JSON");
}

io::Dataset load_data(const DataArgs& args) {
  io::Dataset d = args.format == "matrix" ? io::load_matrix_csv(args.path)
                                          : io::load_log_csv(args.path);
  if (!args.user_attrs.empty()) io::load_attributes_csv(d, args.user_attrs, "user");
  if (!args.perm_attrs.empty()) io::load_attributes_csv(d, args.perm_attrs, "perm");
  if (!args.buildings.empty()) io::load_buildings_json(d, args.buildings);
  for (const auto& w : d.warnings) std::cerr << "warning: " << w << "\n";
  return d;
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
}

json metrics_to_json(const evaluation::Metrics& m) {
  json j;
  j["tpr"] = m.tpr ? json(*m.tpr) : json(nullptr);
  j["fpr"] = m.fpr ? json(*m.fpr) : json(nullptr);
  j["precision"] = m.precision ? json(*m.precision) : json(nullptr);
  j["complexity"] = m.complexity;
  return j;
}

json crossval_to_json(const evaluation::CrossvalResult& r) {
  json j;
  j["averaged"] = metrics_to_json(r.averaged);
  j["per_fold"] = json::array();
  for (const auto& f : r.per_fold) j["per_fold"].push_back(metrics_to_json(f));
  j["warnings"] = r.warnings;
  return j;
}

std::string grid_to_csv(const evaluation::GridOutcome& g) {
  std::ostringstream os;
  os << "cell";
  if (!g.table.empty())
    for (const auto& [name, v] : g.table.front().values) os << "," << name;
  os << ",tpr,fpr,precision,complexity\n";
  auto opt = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string("");
  };
  for (std::size_t i = 0; i < g.table.size(); ++i) {
    os << i;
    for (const auto& [name, v] : g.table[i].values) os << "," << v;
    const auto& m = g.table[i].result.averaged;
    os << "," << opt(m.tpr) << "," << opt(m.fpr) << "," << opt(m.precision) << ","
       << m.complexity << "\n";
  }
  return os.str();
}

int cmd_mine(const DataArgs& data_args, const std::string& config_path,
             const std::string& out_dir, std::uint64_t seed_override, bool has_seed,
             int workers_flag, const std::string& resume_path) {
  io::Dataset d = load_data(data_args);
  io::RunConfig c = io::config_from_json_file(config_path);
  if (has_seed) c.seed = seed_override;
  c.validate_against(d);

  int n = io::request_count(d);
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

  fs::path out(out_dir);
  io::MineHooks hooks;
  hooks.checkpoint_every = c.checkpoint_every;
  hooks.write_checkpoint = [&](const std::string& doc) {
    write_file(out / "checkpoint.json", doc);
  };
  if (!resume_path.empty()) {
    std::ifstream in(resume_path);
    if (!in) throw ParseError("cannot open " + resume_path);
    hooks.resume_document.assign((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  }

  io::MineJob job = io::mine_subset(d, c, all, c.seed, hooks);
  evaluation::Metrics metrics = io::evaluate_policy(job.policy, d);
  metrics.complexity = job.complexity;

  write_file(out / "policy.json", io::policy_to_json(job.policy));
  write_file(out / "trace.csv", io::trace_to_csv(job.trace));
  json mj = metrics_to_json(metrics);
  mj["final_loss"] = job.final_loss;
  mj["best_restart"] = job.best_restart;
  write_file(out / "metrics.json", mj.dump(2));
  std::cout << "mined policy written to " << (out / "policy.json").string()
            << " (objective " << job.final_loss << ")\n";
  (void)workers_flag;
  return 0;
}

int cmd_eval(const DataArgs& data_args, const std::string& policy_path,
             const std::string& out_dir) {
  io::Dataset d = load_data(data_args);
  io::MinedPolicy p = io::policy_from_json_file(policy_path);
  evaluation::Metrics m = io::evaluate_policy(p, d);
  json j = metrics_to_json(m);
  if (!out_dir.empty()) write_file(fs::path(out_dir) / "metrics.json", j.dump(2));
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_crossval(const DataArgs& data_args, const std::string& config_path,
                 const std::string& out_dir, std::uint64_t seed_override, bool has_seed,
                 int workers_flag) {
  io::Dataset d = load_data(data_args);
  io::RunConfig c = io::config_from_json_file(config_path);
  if (has_seed) c.seed = seed_override;
  c.validate_against(d);
  int workers = io::resolve_workers(workers_flag > 0 ? workers_flag : c.workers);
  evaluation::CrossvalResult r = io::run_crossval(d, c, c.seed, workers);
  json j = crossval_to_json(r);
  if (!out_dir.empty()) write_file(fs::path(out_dir) / "crossval.json", j.dump(2));
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_gridsearch(const DataArgs& data_args, const std::string& config_path,
                   const std::string& out_dir, std::uint64_t seed_override, bool has_seed,
                   int workers_flag, double fpr_cap, bool has_cap) {
  io::Dataset d = load_data(data_args);
  io::RunConfig c = io::config_from_json_file(config_path);
  if (has_seed) c.seed = seed_override;
  if (has_cap) c.fpr_cap = fpr_cap;
  c.validate_against(d);
  int workers = io::resolve_workers(workers_flag > 0 ? workers_flag : c.workers);
  evaluation::GridOutcome g = io::run_gridsearch(d, c, workers);

  json best;
  if (g.best_cell >= 0) {
    const auto& cell = g.table[static_cast<std::size_t>(g.best_cell)];
    best["values"] = cell.values;
    best["metrics"] = metrics_to_json(cell.result.averaged);
    best["cap_met"] = g.cap_met;
    if (!g.cap_met)
      std::cerr << "warning: no grid point met the FPR cap; reporting the lowest-FPR point\n";
  } else {
    best = nullptr;
  }
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "grid.csv", grid_to_csv(g));
    write_file(fs::path(out_dir) / "grid_best.json", best.dump(2));
  }
  std::cout << best.dump(2) << "\n";
  return 0;
}

int cmd_synth(const std::string& what, int count, std::uint64_t seed, const std::string& out) {
  if (what != "starbac") throw ConfigError("unknown synthesizer '" + what + "'");
  auto log = lang::generate_starbac_fixture(seed, count);
  io::Dataset d;
  d.kind = io::Dataset::Kind::Log;
  for (std::size_t i = 0; i < log.size(); ++i) {
    io::LogEntry e;
    e.user = "u" + std::to_string(i);
    e.perm = "p" + std::to_string(i);
    e.allowed = log[i].allowed;
    e.has_time = true;
    e.month = log[i].request.month;
    e.day = log[i].request.day;
    e.hour = log[i].request.hour;
    e.has_positions = true;
    e.ux = log[i].request.ux;
    e.uy = log[i].request.uy;
    e.px = log[i].request.px;
    e.py = log[i].request.py;
    d.log.push_back(std::move(e));
  }
  io::save_log_csv(d, out);
  std::cout << "wrote " << log.size() << " labeled requests to " << out << "\n";
  return 0;
}

int cmd_oracle(const DataArgs& data_args, const std::string& config_path, double beta,
               const std::string& out_dir) {
  io::Dataset d = load_data(data_args);
  io::RunConfig c = io::config_from_json_file(config_path);
  c.validate_against(d);
  int n = io::request_count(d);
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  auto instance = io::LanguageInstance::build(d, c, all);
  expect::LossExpression loss = instance->training_loss();

  auto [min_loss, argmin] = oracle::exact_min_loss(instance->structure(), instance->facts(), loss);
  json j;
  j["min_loss"] = min_loss;
  j["states"] = [&] {
    double states = 1;
    for (std::size_t i = 0; i < instance->facts().size(); ++i)
      states *= instance->facts().range_size(static_cast<logic::FactId>(i));
    return states;
  }();
  j["argmin_policy"] = json::parse(io::policy_to_json(instance->extract(argmin)));
  if (beta > 0) {
    oracle::ExactPosterior post =
        oracle::exact_posterior(instance->structure(), instance->facts(), loss, beta);
    oracle::EntropyReport rep = oracle::entropy_check(post, beta);
    j["beta"] = beta;
    j["entropy"] = rep.entropy;
    j["ordering_holds"] = rep.ordering_holds;
  }
  if (!out_dir.empty()) write_file(fs::path(out_dir) / "oracle.json", j.dump(2));
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"policy mining via mean-field annealing over logic templates"};
  app.require_subcommand(1);

  DataArgs data_args;
  std::string config_path, out_dir = "out", policy_path, resume_path, synth_what = "starbac",
              synth_out = "starbac_log.csv";
  std::uint64_t seed = 0;
  bool has_seed = false;
  int workers = 0, synth_count = 1000;
  double fpr_cap = 0.05, beta = 0.0;
  bool has_cap = false;

  auto add_common = [&](CLI::App* cmd, bool with_config) {
    add_data_flags(cmd, data_args);
    if (with_config) cmd->add_option("--config", config_path, "run config JSON")->required();
    cmd->add_option("--out-dir", out_dir, "output directory");
    cmd->add_option("--seed", seed, "master seed override")->each([&](const std::string&) {
      has_seed = true;
    });
    cmd->add_option("--workers", workers, "parallel worker count");
  };

  CLI::App* mine = app.add_subcommand("mine", "mine a policy from a dataset");
  add_common(mine, true);
  mine->add_option("--resume", resume_path, "checkpoint to resume from");

  CLI::App* evalc = app.add_subcommand("eval", "evaluate a policy against a dataset");
  add_data_flags(evalc, data_args);
  evalc->add_option("--policy", policy_path, "policy JSON")->required();
  evalc->add_option("--out-dir", out_dir, "output directory");

  CLI::App* crossval = app.add_subcommand("crossval", "k-fold cross-validation");
  add_common(crossval, true);

  CLI::App* grid = app.add_subcommand("gridsearch", "hyper-parameter grid search");
  add_common(grid, true);
  grid->add_option("--fpr-cap", fpr_cap, "false-positive-rate cap")->each([&](const std::string&) {
    has_cap = true;
  });

  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic labeled log");
  synth->add_option("what", synth_what, "starbac");
  synth->add_option("--count", synth_count, "number of requests");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", synth_out, "output CSV path");

  CLI::App* oraclec = app.add_subcommand("oracle", "exhaustive oracle for small instances");
  add_data_flags(oraclec, data_args);
  oraclec->add_option("--config", config_path, "run config JSON")->required();
  oraclec->add_option("--beta", beta, "also compute the posterior at this beta");
  oraclec->add_option("--out-dir", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (mine->parsed())
      return cmd_mine(data_args, config_path, out_dir, seed, has_seed, workers, resume_path);
    if (evalc->parsed()) return cmd_eval(data_args, policy_path, out_dir);
    if (crossval->parsed())
      return cmd_crossval(data_args, config_path, out_dir, seed, has_seed, workers);
    if (grid->parsed())
      return cmd_gridsearch(data_args, config_path, out_dir, seed, has_seed, workers, fpr_cap,
                            has_cap);
    if (synth->parsed()) return cmd_synth(synth_what, synth_count, seed, synth_out);
    if (oraclec->parsed()) return cmd_oracle(data_args, config_path, beta, out_dir);
  } catch (const polymine::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
