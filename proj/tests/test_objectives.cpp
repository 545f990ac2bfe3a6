#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle_helpers.hpp"
#include "polymine/lang/xacml.hpp"

using namespace polymine;
using namespace polymine::logic;
using namespace polymine::expect;
using namespace polymine::objectives;

TEST_SUITE_BEGIN("objectives");

TEST_CASE("symmetric difference") {
  test::Example2 ex;
  const auto& s = ex.t.structure;

  SUBCASE("a policy matching its own induced assignment has zero loss") {
    std::vector<bool> induced;
    for (const auto& b : ex.requests)
      induced.push_back(eval_formula(s, ex.j1, b, *ex.t.formula));
    LossExpression self = symmetric_difference_loss(ex.t.formula, ex.requests, induced);
    CHECK(loss_at(s, self, ex.j1) == 0.0);
  }

  SUBCASE("reference interpretations differ by one and two entries") {
    CHECK(loss_at(s, ex.loss, ex.j1) == 1.0);
    CHECK(loss_at(s, ex.loss, ex.j2) == 2.0);
  }

  SUBCASE("a full grant against an empty assignment disagrees everywhere") {
    LossExpression empty = symmetric_difference_loss(ex.t.formula, ex.requests,
                                                     std::vector<bool>(9, false));
    Interpretation all = Interpretation::zeros(ex.t.facts);
    for (std::size_t i = 0; i < ex.t.facts.size(); ++i) all.set(static_cast<FactId>(i), 1);
    CHECK(loss_at(s, empty, all) == 9.0);
  }
}

TEST_CASE("role-assignment size regularizer") {
  test::Example2 ex;
  LossExpression reg;
  add_rbac_complexity(reg, ex.t, 1.0);

  Interpretation zero = Interpretation::zeros(ex.t.facts);
  CHECK(loss_at(ex.t.structure, reg, zero) == 0.0);
  CHECK(loss_at(ex.t.structure, reg, ex.j1) == 6.0);  // 3 user marks + 3 permission marks

  FactorDistribution uniform(ex.t.structure, ex.t.facts);
  CHECK(expect_loss(ex.t.structure, ex.t.facts, uniform, reg) ==
        doctest::Approx(6.0).epsilon(1e-12));  // 12 facts at 1/2
}

TEST_CASE("attribute-count regularizer") {
  auto abac = lang::build_abac({"u1"}, {"p1"}, {"a1", "a2", "a3"}, {{"u1", {"a1"}}},
                               {{"p1", {"a2"}}}, 2);
  LossExpression reg;
  add_abac_complexity(reg, abac, 1.0);

  Interpretation zero = Interpretation::zeros(abac.facts);
  CHECK(loss_at(abac.structure, reg, zero) == 0.0);

  Interpretation two = zero;
  two.set(abac.rua_fact(0, 0), 1);
  two.set(abac.rua_fact(0, 2), 1);
  CHECK(loss_at(abac.structure, reg, two) == 2.0);

  FactorDistribution uniform(abac.structure, abac.facts);
  // 2*N*M Bernoulli facts at 1/2 -> N*M.
  CHECK(expect_loss(abac.structure, abac.facts, uniform, reg) ==
        doctest::Approx(2.0 * 3.0).epsilon(1e-12));
}

TEST_CASE("log objective") {
  auto abac = lang::build_abac({"u1", "u2"}, {"p1", "p2"}, {"a1", "a2"},
                               {{"u1", {"a1"}}, {"u2", {"a2"}}},
                               {{"p1", {"a1"}}, {"p2", {"a2"}}}, 1);
  const auto& s = abac.structure;
  // Log: (u1,p1) allowed, (u1,p2) denied, (u2,*) undecided.
  std::vector<Binding> allowed{{0, 0}};
  std::vector<Binding> denied{{0, 1}};
  std::vector<Binding> undecided{{1, 0}, {1, 1}};

  SUBCASE("a policy reproducing the log exactly has zero loss") {
    // Rule requiring user attr a1 and perm attr a1: grants (u1,p1) only.
    Interpretation interp = Interpretation::zeros(abac.facts);
    interp.set(abac.rua_fact(0, 0), 1);
    interp.set(abac.rpa_fact(0, 0), 1);
    LossExpression loss;
    add_log_loss(loss, abac.formula, allowed, denied, 1.0, 1.0);
    CHECK(loss_at(s, loss, interp) == 0.0);
  }

  SUBCASE("granting a denied request costs its weight") {
    // The empty rule grants everything.
    Interpretation empty_rule = Interpretation::zeros(abac.facts);
    LossExpression loss;
    add_log_loss(loss, abac.formula, {}, denied, 0.0, 1.0);
    CHECK(loss_at(s, loss, empty_rule) == 1.0);
  }

  SUBCASE("the over-grant term is linear in the grant expectations") {
    LossExpression loss;
    double lambda2 = 0.25;
    add_overgrant_loss(loss, abac.formula, undecided, lambda2);
    FactorDistribution uniform(s, abac.facts);
    double direct = 0;
    for (const auto& b : undecided)
      direct += lambda2 * expect_formula(s, abac.facts, uniform, *abac.formula, b);
    CHECK(expect_loss(s, abac.facts, uniform, loss) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("role-disagreement regularizer") {
  std::vector<std::pair<std::string, std::string>> rows = {{"u1", "eng"}, {"u2", "eng"}};

  SUBCASE("conflicting combinations are rejected") {
    auto bad = rows;
    bad.push_back({"u1", "ops"});
    CHECK_THROWS_AS(lang::build_bm_rbac({"u1", "u2"}, {"p1"}, bad, 2), DataError);
    CHECK_THROWS_AS(lang::build_bm_rbac({"u1", "u2", "u3"}, {"p1"}, rows, 2), DataError);
  }

  SUBCASE("value matches the unexpanded disagreement over all role pairs") {
    for (int n_roles = 1; n_roles <= 4; ++n_roles) {
      auto bm = lang::build_bm_rbac({"u1", "u2"}, {"p1"}, rows, n_roles);
      LossExpression reg;
      add_bm_rbac_complexity(reg, bm, 1.0);

      for (int x = 0; x < (1 << n_roles); ++x) {
        for (int y = 0; y < (1 << n_roles); ++y) {
          Interpretation interp = Interpretation::zeros(bm.rbac.facts);
          for (int i = 0; i < n_roles; ++i) {
            interp.set(bm.rbac.ua_fact(0, i), (x >> i) & 1);
            interp.set(bm.rbac.ua_fact(1, i), (y >> i) & 1);
          }
          // Disagreement of one ordered pair: sum of a(1 - 2ab) over roles.
          auto delta = [&](int a_bits, int b_bits) {
            double d = 0;
            for (int i = 0; i < n_roles; ++i) {
              double a = (a_bits >> i) & 1, b = (b_bits >> i) & 1;
              d += a * (1 - 2 * a * b);
            }
            return d;
          };
          double expected =
              (delta(x, x) + delta(x, y) + delta(y, x) + delta(y, y)) / 2.0;  // |U| = 2
          CHECK(loss_at(bm.rbac.structure, reg, interp) ==
                doctest::Approx(expected).epsilon(1e-12));
        }
      }
    }
  }

  SUBCASE("users with different combinations contribute only diagonal terms") {
    auto bm = lang::build_bm_rbac({"u1", "u2"}, {"p1"}, {{"u1", "eng"}, {"u2", "ops"}}, 2);
    LossExpression reg;
    add_bm_rbac_complexity(reg, bm, 1.0);
    Interpretation interp = Interpretation::zeros(bm.rbac.facts);
    interp.set(bm.rbac.ua_fact(0, 0), 1);  // u1 in role 1
    interp.set(bm.rbac.ua_fact(1, 0), 1);  // u2 in role 1
    // Only (u1,u1) and (u2,u2) pairs count: each contributes -1/2, twice.
    CHECK(loss_at(bm.rbac.structure, reg, interp) == doctest::Approx(-1.0).epsilon(1e-12));
  }

  SUBCASE("an all-zero assignment has zero disagreement") {
    auto bm = lang::build_bm_rbac({"u1", "u2"}, {"p1"}, rows, 3);
    LossExpression reg;
    add_bm_rbac_complexity(reg, bm, 1.0);
    Interpretation zero = Interpretation::zeros(bm.rbac.facts);
    CHECK(loss_at(bm.rbac.structure, reg, zero) == 0.0);
  }
}

TEST_CASE("tree-size regularizer") {
  auto x = lang::build_xacml({"a1", "a2", "a3"}, 1, 2, {{"z", {"a1"}}});
  LossExpression reg;
  add_xacml_complexity(reg, x, 1.0);

  Interpretation zero = Interpretation::zeros(x.facts);
  CHECK(loss_at(x.structure, reg, zero) == 0.0);

  // A single active rule at the root requiring all three attribute values:
  // one active node plus three attributes.
  Interpretation rule = zero;
  rule.set(x.active_fact(0), 1);
  rule.set(x.isrule_fact(0), 1);
  for (int a = 0; a < 3; ++a) rule.set(x.req_fact(0, a), 1);
  CHECK(loss_at(x.structure, reg, rule) == 4.0);

  mining::Rng rng(2);
  FactorDistribution q = test::random_factors(x.structure, x.facts, rng);
  double direct = 0;
  for (int i = 0; i < 3; ++i) {
    direct += q.mean(x.active_fact(i));
    for (int a = 0; a < 3; ++a)
      direct += q.mean(x.active_fact(i)) * q.mean(x.isrule_fact(i)) *
                q.mean(x.req_fact(i, a));
  }
  CHECK(expect_loss(x.structure, x.facts, q, reg) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("constraint-count regularizer") {
  lang::StarbacConfig cfg;
  cfg.roles = 1;
  cfg.spatial_slots = 1;
  cfg.temporal_slots = 1;
  cfg.max_distance = 3;
  lang::StarbacRequest r;
  r.month = 4;
  r.day = 1;
  r.hour = 2;
  auto t = lang::build_starbac({r}, lang::fixture_buildings(), cfg);

  LossExpression reg;
  add_starbac_complexity(reg, t, 1.0);

  Interpretation zero = Interpretation::zeros(t.facts);
  CHECK(loss_at(t.structure, reg, zero) == 0.0);

  // One enabled spatial slot plus a periodic expression with two months,
  // one day and one hour.
  Interpretation interp = zero;
  interp.set(t.sp_en_fact(t.sslot(0, 0, 0)), 1);
  int slot = t.tslot(0, 0, 0);
  interp.set(t.pm_fact(slot, 2), 1);
  interp.set(t.pm_fact(slot, 4), 1);
  interp.set(t.pd_fact(slot, 1), 1);
  interp.set(t.ph_fact(slot, 1), 1);
  CHECK(loss_at(t.structure, reg, interp) == 5.0);

  mining::Rng rng(6);
  FactorDistribution q = test::random_factors(t.structure, t.facts, rng);
  FactorDistribution point = FactorDistribution::point_mass(t.structure, t.facts, interp);
  CHECK(expect_loss(t.structure, t.facts, point, reg) == doctest::Approx(5.0).epsilon(1e-9));
  CHECK(expect_loss(t.structure, t.facts, q, reg) >= 0.0);
}

TEST_CASE("point-mass expectations equal direct objective values") {
  test::Example2 ex;
  LossExpression combined = ex.loss;
  add_rbac_complexity(combined, ex.t, 0.3);

  mining::Rng rng(8);
  for (int round = 0; round < 20; ++round) {
    Interpretation interp = test::random_interp(ex.t.facts, rng);
    FactorDistribution point = FactorDistribution::point_mass(ex.t.structure, ex.t.facts, interp);
    double direct = loss_at(ex.t.structure, combined, interp);
    double expected = expect_loss(ex.t.structure, ex.t.facts, point, combined);
    CHECK(std::abs(direct - expected) <= 1e-9);
    CHECK(direct >= 0.0);
  }
}

TEST_SUITE_END();
