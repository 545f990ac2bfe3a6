#include <doctest.h>

#include "fixtures.hpp"
#include "oracle_helpers.hpp"
#include "polymine/logic/analysis.hpp"

using namespace polymine;
using namespace polymine::logic;

TEST_SUITE_BEGIN("rbac-abac");

TEST_CASE("role template construction") {
  test::Example2 ex;
  CHECK(ex.t.facts.size() == 12);  // N(|U|+|P|)
  CHECK(check_diverse(ex.t.structure, *ex.t.formula).diverse);

  auto one = lang::build_rbac({"a", "b", "c"}, {"x", "y"}, 1);
  CHECK(one.facts.size() == 5);

  CHECK_THROWS_AS(lang::build_rbac({"a"}, {"x"}, 0), ConfigError);
}

TEST_CASE("role extraction matches formula evaluation") {
  test::Example2 ex;
  const auto& s = ex.t.structure;

  SUBCASE("the reference interpretation induces the reference assignment") {
    lang::RbacPolicy pol = lang::extract_rbac(ex.t, ex.j1);
    CHECK(pol.grants("Alice", "c"));
    CHECK(pol.grants("Alice", "m"));
    CHECK_FALSE(pol.grants("Alice", "d"));
    CHECK(pol.grants("Bob", "c"));
    CHECK(pol.grants("Charlie", "d"));
    CHECK_FALSE(pol.grants("Charlie", "c"));
  }

  SUBCASE("the empty interpretation grants nothing") {
    Interpretation zero = Interpretation::zeros(ex.t.facts);
    lang::RbacPolicy pol = lang::extract_rbac(ex.t, zero);
    for (const auto& u : {"Alice", "Bob", "Charlie"})
      for (const auto& p : {"c", "m", "d"}) CHECK_FALSE(pol.grants(u, p));
  }

  SUBCASE("extraction semantics equal evaluation on random interpretations") {
    mining::Rng rng(31);
    for (int round = 0; round < 100; ++round) {
      Interpretation interp = test::random_interp(ex.t.facts, rng);
      lang::RbacPolicy pol = lang::extract_rbac(ex.t, interp);
      for (Elem u = 0; u < 3; ++u)
        for (Elem p = 0; p < 3; ++p) {
          bool via_formula = eval_formula(s, interp, {u, p}, *ex.t.formula);
          bool via_policy = pol.grants(s.elem_name(s.users_sort(), u),
                                       s.elem_name(s.perms_sort(), p));
          CHECK(via_formula == via_policy);
        }
    }
  }
}

TEST_CASE("attribute template construction") {
  auto abac = lang::build_abac({"u1"}, {"p1"}, {"a1", "a2"}, {{"u1", {"a1"}}},
                               {{"p1", {"a2"}}}, 1);
  CHECK(abac.facts.size() == 4);  // 2 * N * M
  CHECK(check_diverse(abac.structure, *abac.formula).diverse);

  SUBCASE("a rule requiring nothing grants every request") {
    Interpretation zero = Interpretation::zeros(abac.facts);
    lang::AbacPolicy pol = lang::extract_abac(abac, zero);
    CHECK(pol.grants({}, {}));
    CHECK(eval_formula(abac.structure, zero, {0, 0}, *abac.formula));
  }

  SUBCASE("an all-ones row requires every attribute value") {
    Interpretation interp = Interpretation::zeros(abac.facts);
    interp.set(abac.rua_fact(0, 0), 1);
    interp.set(abac.rua_fact(0, 1), 1);
    lang::AbacPolicy pol = lang::extract_abac(abac, interp);
    REQUIRE(pol.rules.size() == 1);
    CHECK(pol.rules[0].user_attrs == std::set<std::string>{"a1", "a2"});
    CHECK(pol.rules[0].perm_attrs.empty());
  }
}

TEST_CASE("attribute extraction matches formula evaluation exhaustively") {
  auto abac = lang::build_abac({"u1", "u2", "u3"}, {"p1", "p2"}, {"a1", "a2", "a3"},
                               {{"u1", {"a1", "a2"}}, {"u2", {"a2"}}, {"u3", {}}},
                               {{"p1", {"a3"}}, {"p2", {"a1", "a3"}}}, 2);
  const auto& s = abac.structure;
  auto attrs_of = [&](const std::map<std::string, std::set<std::string>>& table,
                      const std::string& name) {
    auto it = table.find(name);
    return it == table.end() ? std::set<std::string>{} : it->second;
  };
  std::map<std::string, std::set<std::string>> uatt{
      {"u1", {"a1", "a2"}}, {"u2", {"a2"}}, {"u3", {}}};
  std::map<std::string, std::set<std::string>> patt{{"p1", {"a3"}}, {"p2", {"a1", "a3"}}};

  mining::Rng rng(37);
  for (int round = 0; round < 100; ++round) {
    Interpretation interp = test::random_interp(abac.facts, rng);
    lang::AbacPolicy pol = lang::extract_abac(abac, interp);
    for (Elem u = 0; u < 3; ++u)
      for (Elem p = 0; p < 2; ++p) {
        bool via_formula = eval_formula(s, interp, {u, p}, *abac.formula);
        bool via_policy = pol.grants(attrs_of(uatt, s.elem_name(s.users_sort(), u)),
                                     attrs_of(patt, s.elem_name(s.perms_sort(), p)));
        CHECK(via_formula == via_policy);
      }
  }
}

TEST_SUITE_END();
