#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "polymine/io/session.hpp"

using namespace polymine;
namespace fs = std::filesystem;

namespace {

struct TempFile {
  fs::path path;
  explicit TempFile(const std::string& name, const std::string& content)
      : path(fs::temp_directory_path() / name) {
    std::ofstream out(path);
    out << content;
  }
  ~TempFile() { std::error_code ec; fs::remove(path, ec); }
};

}  // namespace

TEST_SUITE_BEGIN("io");

TEST_CASE("matrix loading") {
  TempFile f("pm_matrix.csv",
             "alice,read\n"
             "bob,read\n"
             "alice,write\n");
  io::Dataset d = io::load_matrix_csv(f.path.string());
  CHECK(d.kind == io::Dataset::Kind::Matrix);
  CHECK(d.matrix.size() == 3);
  CHECK(d.users == std::vector<std::string>{"alice", "bob"});
  CHECK(d.authorized("alice", "write"));
  CHECK_FALSE(d.authorized("bob", "write"));

  SUBCASE("duplicates warn but load") {
    TempFile dup("pm_dup.csv", "a,x\na,x\n");
    io::Dataset d2 = io::load_matrix_csv(dup.path.string());
    CHECK(d2.matrix.size() == 1);
    REQUIRE(d2.warnings.size() == 1);
    CHECK(d2.warnings[0].find("line 2") != std::string::npos);
  }

  SUBCASE("malformed rows name the line") {
    TempFile bad("pm_bad.csv", "a,x\njunk-without-comma\n");
    try {
      io::load_matrix_csv(bad.path.string());
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
  }
}

TEST_CASE("log loading") {
  TempFile f("pm_log.csv",
             "alice,read,allow\n"
             "bob,read,deny\n");
  io::Dataset d = io::load_log_csv(f.path.string());
  CHECK(d.kind == io::Dataset::Kind::Log);
  CHECK(d.log.size() == 2);
  CHECK(d.log[0].allowed);
  CHECK_FALSE(d.log[1].allowed);

  SUBCASE("unknown decisions are rejected") {
    TempFile bad("pm_badlog.csv", "a,x,maybe\n");
    CHECK_THROWS_AS(io::load_log_csv(bad.path.string()), ParseError);
  }

  SUBCASE("conflicting decisions for one request are rejected") {
    TempFile bad("pm_conflict.csv", "a,x,allow\na,x,deny\n");
    CHECK_THROWS_AS(io::load_log_csv(bad.path.string()), DataError);
  }

  SUBCASE("timed and positioned rows parse and round-trip") {
    TempFile timed("pm_timed.csv", "u0,p0,allow,4,1,2,6.5,6.5,3,7\n");
    io::Dataset d2 = io::load_log_csv(timed.path.string());
    REQUIRE(d2.log.size() == 1);
    CHECK(d2.log[0].has_time);
    CHECK(d2.log[0].month == 4);
    CHECK(d2.log[0].has_positions);
    CHECK(d2.log[0].ux == 6.5);

    fs::path out = fs::temp_directory_path() / "pm_roundtrip.csv";
    io::save_log_csv(d2, out.string());
    io::Dataset d3 = io::load_log_csv(out.string());
    CHECK(d3.log[0].month == d2.log[0].month);
    CHECK(d3.log[0].ux == d2.log[0].ux);
    fs::remove(out);
  }

  SUBCASE("out-of-range instants are rejected") {
    TempFile bad("pm_badtime.csv", "a,x,allow,13,1,2,0,0,0,0\n");
    CHECK_THROWS_AS(io::load_log_csv(bad.path.string()), ParseError);
  }
}

TEST_CASE("attribute tables attach to known entities") {
  TempFile m("pm_m2.csv", "alice,read\n");
  TempFile attrs("pm_attrs.csv",
                 "alice,dept-a\n"
                 "ghost,dept-b\n");
  io::Dataset d = io::load_matrix_csv(m.path.string());
  io::load_attributes_csv(d, attrs.path.string(), "user");
  CHECK(d.user_attrs.at("alice").count("dept-a"));
  CHECK_FALSE(d.user_attrs.count("ghost"));
  CHECK(d.warnings.size() == 1);
}

TEST_CASE("run configurations") {
  io::RunConfig c = io::config_from_json(R"({
    "language": "rbac-reg",
    "roles": 3,
    "objective": {"lambda": 0.25},
    "schedule": {"beta0": 0.1, "alpha": 1.2, "iterations": 50},
    "seed": 11,
    "restarts": 4,
    "grid": {"lambda": [0.1, 0.2]}
  })");
  CHECK(c.language == "rbac-reg");
  CHECK(c.roles == 3);
  CHECK(c.lambda == 0.25);
  CHECK(c.schedule.iterations == 50);
  CHECK(c.restarts == 4);
  REQUIRE(c.grid.size() == 1);
  CHECK(c.grid[0].first == "lambda");

  io::RunConfig back = io::config_from_json(io::config_to_json(c));
  CHECK(back.language == c.language);
  CHECK(back.lambda == c.lambda);
  CHECK(back.schedule.alpha == c.schedule.alpha);

  SUBCASE("missing language is a configuration error") {
    CHECK_THROWS_AS(io::config_from_json("{}"), ConfigError);
  }

  SUBCASE("language and dataset kind must agree") {
    io::Dataset log;
    log.kind = io::Dataset::Kind::Log;
    io::RunConfig rbac;
    rbac.language = "rbac";
    CHECK_THROWS_AS(rbac.validate_against(log), ConfigError);
    io::Dataset matrix;
    matrix.kind = io::Dataset::Kind::Matrix;
    io::RunConfig st;
    st.language = "starbac";
    CHECK_THROWS_AS(st.validate_against(matrix), ConfigError);
  }
}

TEST_CASE("policy documents round-trip semantically") {
  SUBCASE("role policies") {
    lang::RbacPolicy pol;
    pol.roles = 2;
    pol.role_users = {{"alice", "bob"}, {"carol"}};
    pol.role_perms = {{"read"}, {"write"}};
    io::MinedPolicy p{"rbac", pol, {}};
    io::MinedPolicy back = io::policy_from_json(io::policy_to_json(p));
    const auto& b = std::get<lang::RbacPolicy>(back.body);
    for (const auto& u : {"alice", "bob", "carol"})
      for (const auto& q : {"read", "write"}) CHECK(b.grants(u, q) == pol.grants(u, q));
  }

  SUBCASE("attribute policies") {
    lang::AbacPolicy pol;
    pol.rules = {{{"u:a"}, {"p:b"}}, {{}, {"p:c"}}};
    io::MinedPolicy p{"abac", pol, {}};
    io::MinedPolicy back = io::policy_from_json(io::policy_to_json(p));
    const auto& b = std::get<lang::AbacPolicy>(back.body);
    CHECK(b.grants({"u:a"}, {"p:b"}) == pol.grants({"u:a"}, {"p:b"}));
    CHECK(b.grants({}, {"p:c"}) == pol.grants({}, {"p:c"}));
    CHECK(b.grants({}, {}) == pol.grants({}, {}));
  }

  SUBCASE("tree policies") {
    lang::XacmlNode tree = lang::XacmlNode::policy(
        "FirstApp", {lang::XacmlNode::rule(false, {"a"}), lang::XacmlNode::rule(true, {})});
    io::MinedPolicy p{"xacml", tree, {}};
    io::MinedPolicy back = io::policy_from_json(io::policy_to_json(p));
    CHECK(std::get<lang::XacmlNode>(back.body) == tree);
  }

  SUBCASE("spatio-temporal policies") {
    lang::StarbacPolicy pol;
    lang::StarbacRole role;
    role.user_side.spatial.push_back({false, 1, "ComputerRoom"});
    lang::PeriodicExpression pe;
    pe.months = {1, 2};
    pe.days = {3};
    pe.hours = {8, 9};
    role.user_side.temporal.push_back(pe);
    pol.roles.push_back(role);
    io::MinedPolicy p{"starbac", pol, lang::fixture_buildings()};
    io::MinedPolicy back = io::policy_from_json(io::policy_to_json(p));
    const auto& b = std::get<lang::StarbacPolicy>(back.body);
    for (int h : {7, 8, 10})
      CHECK(b.grants(back.buildings, 1, 3, h, 6.5, 6.5, 0, 0) ==
            pol.grants(lang::fixture_buildings(), 1, 3, h, 6.5, 6.5, 0, 0));
  }
}

TEST_CASE("mining sessions over datasets") {
  TempFile m("pm_ex2.csv",
             "Alice,c\nAlice,m\nBob,c\nBob,m\nCharlie,c\nCharlie,d\n");
  io::Dataset d = io::load_matrix_csv(m.path.string());
  io::RunConfig c;
  c.language = "rbac";
  c.roles = 2;
  c.restarts = 4;
  c.schedule.iterations = 150;

  int n = io::request_count(d);
  CHECK(n == 9);
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;

  io::MineJob job = io::mine_subset(d, c, all, 21);
  CHECK(job.final_loss == 0.0);

  evaluation::Metrics metrics = io::evaluate_policy(job.policy, d);
  CHECK(*metrics.tpr == 1.0);
  CHECK(*metrics.fpr == 0.0);

  SUBCASE("checkpointed runs resume to the same result") {
    io::MineHooks hooks;
    hooks.checkpoint_every = 40;
    std::vector<std::string> checkpoints;
    hooks.write_checkpoint = [&](const std::string& doc) { checkpoints.push_back(doc); };
    io::MineJob full = io::mine_subset(d, c, all, 33, hooks);
    REQUIRE(!checkpoints.empty());

    io::MineHooks resume;
    resume.resume_document = checkpoints.front();
    io::MineJob resumed = io::mine_subset(d, c, all, 33, resume);
    CHECK(resumed.final_loss == full.final_loss);
    CHECK(resumed.best_restart == full.best_restart);
    REQUIRE(resumed.trace.size() == full.trace.size());
    for (std::size_t i = 0; i < full.trace.size(); ++i)
      CHECK(resumed.trace[i].expected_loss == full.trace[i].expected_loss);
    CHECK(io::policy_to_json(resumed.policy) == io::policy_to_json(full.policy));
  }

  SUBCASE("cross-validation on the small matrix runs end to end") {
    io::RunConfig cv = c;
    cv.folds = 3;
    cv.restarts = 2;
    cv.schedule.iterations = 80;
    evaluation::CrossvalResult r = io::run_crossval(d, cv, 5, 2);
    CHECK(r.per_fold.size() == 3);
    // Deterministic under the same seed and worker count.
    evaluation::CrossvalResult r2 = io::run_crossval(d, cv, 5, 1);
    for (std::size_t i = 0; i < r.per_fold.size(); ++i) {
      CHECK(r.per_fold[i].complexity == r2.per_fold[i].complexity);
      CHECK(r.per_fold[i].tpr.has_value() == r2.per_fold[i].tpr.has_value());
      if (r.per_fold[i].tpr) CHECK(*r.per_fold[i].tpr == *r2.per_fold[i].tpr);
    }
  }
}

TEST_SUITE_END();
