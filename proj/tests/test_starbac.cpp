#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "polymine/lang/starbac.hpp"

using namespace polymine;
using namespace polymine::logic;
using namespace polymine::lang;

namespace {

// Every calendar instant plus a handful of positions, enough for the
// equivalence sweeps.
std::vector<StarbacRequest> grid_requests(const std::vector<std::pair<double, double>>& points,
                                          int month_step = 1, int day_step = 1,
                                          int hour_step = 1) {
  std::vector<StarbacRequest> out;
  for (int m = 1; m <= 12; m += month_step)
    for (int d = 1; d <= 31; d += day_step)
      for (int h = 1; h <= 24; h += hour_step) {
        StarbacRequest r;
        r.month = m;
        r.day = d;
        r.hour = h;
        for (const auto& [x, y] : points) {
          r.ux = x;
          r.uy = y;
          for (const auto& [px, py] : points) {
            r.px = px;
            r.py = py;
            out.push_back(r);
          }
        }
      }
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("starbac");

TEST_CASE("rectangle distances") {
  const auto& b = fixture_buildings();
  const Building& computer = b[4];  // (6,6)..(7,7)
  CHECK(within_distance(computer, 6.5, 6.5, 0));  // inside
  CHECK(within_distance(computer, 5.5, 6.5, 1));
  CHECK_FALSE(within_distance(computer, 4.9, 6.5, 1));
  CHECK(rect_distance_sq(computer, 8.0, 8.0) == doctest::Approx(2.0));
}

TEST_CASE("periodic expressions") {
  // First eight hours of the first and fifth day of every even month.
  PeriodicExpression pe;
  pe.months = {2, 4, 6, 8, 10, 12};
  pe.days = {1, 5};
  pe.hours = {1};
  pe.window = 8;

  CHECK(pe.satisfied(4, 1, 2));
  CHECK_FALSE(pe.satisfied(5, 1, 2));
  CHECK_FALSE(pe.satisfied(4, 2, 2));
  CHECK_FALSE(pe.satisfied(4, 1, 9));  // window covers hours 1..8

  SUBCASE("normalization folds the window into the hour set") {
    PeriodicExpression norm = pe.normalized();
    CHECK(norm.window == 1);
    CHECK(norm.hours == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8});
    for (int m = 1; m <= 12; ++m)
      for (int d = 1; d <= 31; ++d)
        for (int h = 1; h <= 24; ++h) CHECK(pe.satisfied(m, d, h) == norm.satisfied(m, d, h));
  }

  SUBCASE("an empty hour set is never satisfied") {
    PeriodicExpression empty;
    empty.months = {1};
    empty.days = {1};
    for (int h = 1; h <= 24; ++h) CHECK_FALSE(empty.satisfied(1, 1, h));
  }
}

TEST_CASE("temporal block mirrors periodic-expression satisfaction") {
  StarbacConfig cfg;
  cfg.roles = 1;
  cfg.spatial_slots = 1;
  cfg.temporal_slots = 1;
  auto requests = grid_requests({{0, 0}});
  auto t = build_starbac(requests, fixture_buildings(), cfg);

  Interpretation interp = Interpretation::zeros(t.facts);
  int slot = t.tslot(0, 0, 0);
  interp.set(t.t_en_fact(slot), 1);
  for (int m : {2, 4, 6, 8, 10, 12}) interp.set(t.pm_fact(slot, m), 1);
  interp.set(t.pd_fact(slot, 1), 1);
  interp.set(t.pd_fact(slot, 5), 1);
  interp.set(t.ph_fact(slot, 1), 1);
  interp.set(t.t_win_fact(slot), 7);  // window carrier is 1-based: value 8

  StarbacPolicy pol = extract_starbac(t, interp);
  REQUIRE(pol.roles.size() == 1);
  REQUIRE(pol.roles[0].user_side.temporal.size() == 1);
  const PeriodicExpression& pe = pol.roles[0].user_side.temporal[0];
  CHECK(pe.months == std::set<int>{2, 4, 6, 8, 10, 12});
  CHECK(pe.days == std::set<int>{1, 5});
  CHECK(pe.hours == std::set<int>{1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(pe.window == 1);

  CHECK(pe.satisfied(4, 1, 2));
  CHECK_FALSE(pe.satisfied(5, 1, 2));
}

TEST_CASE("extraction semantics equal formula evaluation on the full calendar") {
  std::vector<std::pair<double, double>> points = {{1.5, 3.5}, {6.5, 6.5}, {0, 0}};
  auto requests = grid_requests(points, 3, 6, 4);  // sampled calendar for speed
  StarbacConfig cfg;
  cfg.roles = 2;
  cfg.spatial_slots = 1;
  cfg.temporal_slots = 1;
  cfg.max_distance = 3;
  auto t = build_starbac(requests, fixture_buildings(), cfg);
  EvalOptions strict;
  strict.check_exclusive = true;

  mining::Rng rng(71);
  for (int round = 0; round < 8; ++round) {
    Interpretation interp = test::random_interp(t.facts, rng);
    StarbacPolicy pol = extract_starbac(t, interp);
    for (const auto& r : requests) {
      bool via_formula = eval_formula(t.structure, interp, t.binding_for(r), *t.formula, strict);
      bool via_policy =
          pol.grants(t.buildings, r.month, r.day, r.hour, r.ux, r.uy, r.px, r.py);
      CHECK(via_formula == via_policy);
    }
  }

  SUBCASE("disabling every slot grants everything") {
    Interpretation zero = Interpretation::zeros(t.facts);
    StarbacPolicy pol = extract_starbac(t, zero);
    for (int i = 0; i < 40; ++i) {
      const auto& r = requests[static_cast<std::size_t>(rng.below(requests.size()))];
      CHECK(eval_formula(t.structure, zero, t.binding_for(r), *t.formula));
      CHECK(pol.grants(t.buildings, r.month, r.day, r.hour, r.ux, r.uy, r.px, r.py));
    }
  }
}

TEST_CASE("spatial-only template decomposes exactly") {
  StarbacConfig cfg;
  cfg.roles = 1;
  cfg.spatial_slots = 1;
  cfg.temporal_slots = 0;
  cfg.max_distance = 2;
  StarbacRequest r;
  r.ux = 6.5;
  r.uy = 6.5;
  r.px = 3.0;
  r.py = 7.0;
  auto t = build_starbac({r}, fixture_buildings(), cfg);
  CHECK(t.facts.size() == 8);

  mining::Rng rng(73);
  for (int round = 0; round < 10; ++round) {
    expect::FactorDistribution q = test::random_factors(t.structure, t.facts, rng);
    double engine = expect::expect_formula(t.structure, t.facts, q, *t.formula, t.binding_for(r));
    double oracle = test::exhaustive_expect(t.structure, t.facts, q, *t.formula, t.binding_for(r));
    CHECK(std::abs(engine - oracle) <= 1e-9);
  }
}

TEST_CASE("temporal expectations agree with sampled means") {
  StarbacConfig cfg;
  cfg.roles = 1;
  cfg.spatial_slots = 0;
  cfg.temporal_slots = 1;
  StarbacRequest r;
  r.month = 4;
  r.day = 17;
  r.hour = 11;
  auto t = build_starbac({r}, fixture_buildings(), cfg);

  mining::Rng rng(79);
  expect::FactorDistribution q = test::random_factors(t.structure, t.facts, rng);
  double expected = expect::expect_formula(t.structure, t.facts, q, *t.formula, t.binding_for(r));

  const int n = 100000;
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    Interpretation draw = test::sample_interp(t.facts, q, rng);
    hits += eval_formula(t.structure, draw, t.binding_for(r), *t.formula) ? 1 : 0;
  }
  double mean = static_cast<double>(hits) / n;
  double se = std::sqrt(std::max(expected * (1 - expected), 1e-12) / n);
  CHECK(std::abs(mean - expected) <= 3 * se + 1e-12);
}

TEST_CASE("synthetic policy fixture") {
  SUBCASE("reference decisions") {
    // Both parties near the main building.
    StarbacRequest r;
    r.month = 3;
    r.day = 2;
    r.hour = 20;
    r.ux = 2;
    r.uy = 4;
    r.px = 5;
    r.py = 3;  // within 3 of the main building
    CHECK(fixture_grants(r));

    // Near the computer room with the object in the lab, odd day, afternoon
    // (the afternoon hour keeps the other roles out of the picture).
    StarbacRequest c;
    c.month = 1;
    c.day = 3;
    c.hour = 14;
    c.ux = 6.5;
    c.uy = 6.5;
    c.px = 3;
    c.py = 7;
    CHECK(fixture_grants(c));
    c.day = 4;  // an even day fails the first role's calendar clause
    CHECK_FALSE(fixture_grants(c));

    // Far from everything.
    StarbacRequest far;
    far.month = 7;
    far.day = 20;
    far.hour = 23;
    far.ux = 0;
    far.uy = 10;
    far.px = 0;
    far.py = 10;
    CHECK_FALSE(fixture_grants(far));
  }

  SUBCASE("generation is deterministic per seed") {
    auto a = generate_starbac_fixture(7, 200);
    auto b = generate_starbac_fixture(7, 200);
    auto c = generate_starbac_fixture(8, 200);
    REQUIRE(a.size() == 200);
    bool same = true, diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      same &= a[i].request.month == b[i].request.month && a[i].request.ux == b[i].request.ux &&
              a[i].allowed == b[i].allowed;
      diff |= a[i].request.month != c[i].request.month || a[i].request.ux != c[i].request.ux;
    }
    CHECK(same);
    CHECK(diff);

    int grants = 0;
    for (const auto& e : a) grants += e.allowed ? 1 : 0;
    CHECK(grants > 20);  // the fixture grants a healthy share
    CHECK(grants < 180);
  }
}

TEST_SUITE_END();
