#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "oracle_helpers.hpp"
#include "polymine/oracle/exact.hpp"

using namespace polymine;
using namespace polymine::logic;
using namespace polymine::oracle;

TEST_SUITE_BEGIN("oracle");

TEST_CASE("posterior orders the reference interpretations") {
  test::Example2 ex;
  for (double beta : {0.3, 1.0, 4.0}) {
    ExactPosterior post = exact_posterior(ex.t.structure, ex.t.facts, ex.loss, beta);
    double p1 = post.probability(ex.j1);
    double p2 = post.probability(ex.j2);
    CHECK(p1 > p2);
    // exp(-beta)/Z against exp(-2 beta)/Z.
    CHECK(p1 / p2 == doctest::Approx(std::exp(beta)).epsilon(1e-9));
  }

  SUBCASE("zero inverse temperature is uniform") {
    ExactPosterior post = exact_posterior(ex.t.structure, ex.t.facts, ex.loss, 0.0);
    for (double p : post.probabilities)
      CHECK(p == doctest::Approx(1.0 / 4096).epsilon(1e-12));
  }

  SUBCASE("probabilities sum to one") {
    ExactPosterior post = exact_posterior(ex.t.structure, ex.t.facts, ex.loss, 0.7);
    double sum = 0;
    for (double p : post.probabilities) sum += p;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("single-fact posterior with losses 0 and 1 at beta = ln 2") {
  Structure s;
  s.set_carrier(s.users_sort(), {"u"});
  s.set_carrier(s.perms_sort(), {"p"});
  SymbolId rel = s.add_relation("Grant", {s.users_sort(), s.perms_sort()}, false);
  FormulaFactory mk(s);
  auto f = mk.rel(rel, {mk.var(0, s.users_sort(), "u"), mk.var(1, s.perms_sort(), "p")});
  FactSet facts = enumerate_random_facts(*f, s);
  // Auth contains the single pair: value 0 costs 1, value 1 costs 0.
  auto loss = objectives::symmetric_difference_loss(f, {{0, 0}}, {true});

  ExactPosterior post = exact_posterior(s, facts, loss, std::log(2.0));
  CHECK(post.probabilities[0] == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(post.probabilities[1] == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("exhaustive minimum") {
  test::Example2 ex;

  SUBCASE("the reference instance has a zero-loss policy") {
    auto [min_loss, argmin] = exact_min_loss(ex.t.structure, ex.t.facts, ex.loss);
    CHECK(min_loss == 0.0);
    CHECK(expect::loss_at(ex.t.structure, ex.loss, argmin) == 0.0);
  }

  SUBCASE("an empty assignment is minimized by the all-zero policy") {
    auto empty = objectives::symmetric_difference_loss(ex.t.formula, ex.requests,
                                                       std::vector<bool>(9, false));
    auto [min_loss, argmin] = exact_min_loss(ex.t.structure, ex.t.facts, empty);
    CHECK(min_loss == 0.0);
    for (int v : argmin.values) CHECK(v == 0);
  }

  SUBCASE("the regularized minimum trades fit against size monotonically") {
    double prev_fit = -1;
    for (double lambda : {0.0, 0.2, 0.6, 1.5, 4.0}) {
      expect::LossExpression reg = ex.loss;
      objectives::add_rbac_complexity(reg, ex.t, lambda);
      auto [min_loss, argmin] = exact_min_loss(ex.t.structure, ex.t.facts, reg);
      double fit = expect::loss_at(ex.t.structure, ex.loss, argmin);
      CHECK(fit >= prev_fit);  // heavier regularization never fits better
      prev_fit = fit;
    }
  }

  SUBCASE("ties resolve to the first interpretation in enumeration order") {
    // A constant objective makes every interpretation optimal.
    expect::LossExpression flat;
    flat.constant = 2.5;
    auto [min_loss, argmin] = exact_min_loss(ex.t.structure, ex.t.facts, flat);
    CHECK(min_loss == 2.5);
    for (int v : argmin.values) CHECK(v == 0);
  }
}

TEST_CASE("capacity guard") {
  auto big = lang::build_rbac({"u1", "u2", "u3", "u4", "u5", "u6", "u7", "u8", "u9", "u10",
                               "u11", "u12", "u13", "u14", "u15", "u16", "u17", "u18"},
                              {"p1", "p2", "p3"}, 1);
  // 18 + 3 = 21 Bernoulli facts exceed the 2^20 state cap.
  auto loss = objectives::symmetric_difference_loss(
      big.formula, {{0, 0}}, {true});
  CHECK_THROWS_AS(exact_min_loss(big.structure, big.facts, loss), CapacityError);
}

TEST_CASE("entropy and ordering report") {
  test::Example2 ex;

  SUBCASE("ordering holds on the reference instance") {
    ExactPosterior post = exact_posterior(ex.t.structure, ex.t.facts, ex.loss, 0.8);
    EntropyReport rep = entropy_check(post, 0.8);
    CHECK(rep.ordering_holds);
    CHECK(rep.entropy > 0);
  }

  SUBCASE("zero beta maximizes entropy") {
    ExactPosterior post = exact_posterior(ex.t.structure, ex.t.facts, ex.loss, 0.0);
    EntropyReport rep = entropy_check(post, 0.0);
    CHECK(rep.entropy == doctest::Approx(std::log(4096.0)).epsilon(1e-9));
  }

  SUBCASE("entropy strictly decreases in beta on a two-point loss spectrum") {
    Structure s;
    s.set_carrier(s.users_sort(), {"u"});
    s.set_carrier(s.perms_sort(), {"p"});
    SymbolId rel = s.add_relation("Grant", {s.users_sort(), s.perms_sort()}, false);
    FormulaFactory mk(s);
    auto f = mk.rel(rel, {mk.var(0, s.users_sort(), "u"), mk.var(1, s.perms_sort(), "p")});
    FactSet facts = enumerate_random_facts(*f, s);
    auto loss = objectives::symmetric_difference_loss(f, {{0, 0}}, {true});
    double prev = std::log(2.0) + 1e-12;
    for (double beta : {0.5, 1.0, 2.0, 4.0}) {
      EntropyReport rep = entropy_check(exact_posterior(s, facts, loss, beta), beta);
      // Closed form: H(p) with p = 1/(1+e^-beta).
      double p = 1.0 / (1.0 + std::exp(-beta));
      double expected = -p * std::log(p) - (1 - p) * std::log(1 - p);
      CHECK(rep.entropy == doctest::Approx(expected).epsilon(1e-9));
      CHECK(rep.entropy < prev);
      prev = rep.entropy;
    }
  }
}

TEST_CASE("the fact-vector index is a bijection onto interpretations") {
  test::Example2 ex;
  ExactPosterior post = exact_posterior(ex.t.structure, ex.t.facts, ex.loss, 0.5);
  mining::Rng rng(41);
  for (int round = 0; round < 50; ++round) {
    Interpretation interp = test::random_interp(ex.t.facts, rng);
    std::size_t ix = post.index_of(interp);
    Interpretation back = post.interpretation_at(ix, ex.t.facts);
    CHECK(back.values == interp.values);
    CHECK(post.losses[ix] ==
          doctest::Approx(expect::loss_at(ex.t.structure, ex.loss, interp)).epsilon(1e-12));
  }
}

TEST_SUITE_END();
