#include <doctest.h>

#include <cmath>

#include "oracle_helpers.hpp"
#include "polymine/lang/xacml.hpp"
#include "polymine/logic/analysis.hpp"

using namespace polymine;
using namespace polymine::logic;
using namespace polymine::lang;

namespace {

std::vector<std::pair<std::string, std::set<std::string>>> all_requests(
    const std::vector<std::string>& attvals) {
  std::vector<std::pair<std::string, std::set<std::string>>> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << attvals.size()); ++mask) {
    std::set<std::string> attrs;
    for (std::size_t a = 0; a < attvals.size(); ++a)
      if (mask & (std::size_t{1} << a)) attrs.insert(attvals[a]);
    out.emplace_back("z" + std::to_string(mask), std::move(attrs));
  }
  return out;
}

XacmlNode random_tree(mining::Rng& rng, const std::vector<std::string>& attvals, int depth,
                      int max_depth, int max_breadth) {
  bool rule = depth == max_depth || rng.below(3) == 0;
  if (rule) {
    std::set<std::string> attrs;
    for (const auto& a : attvals)
      if (rng.below(2)) attrs.insert(a);
    return XacmlNode::rule(rng.below(2) == 0, std::move(attrs));
  }
  const char* combs[3] = {"FirstApp", "AllowOv", "DenyOv"};
  int n = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_breadth)));
  std::vector<XacmlNode> children;
  for (int j = 0; j < n; ++j)
    children.push_back(random_tree(rng, attvals, depth + 1, max_depth, max_breadth));
  return XacmlNode::policy(combs[rng.below(3)], std::move(children));
}

}  // namespace

TEST_SUITE_BEGIN("xacml");

TEST_CASE("combinator semantics") {
  SUBCASE("a rule authorizes requests containing its attributes") {
    XacmlNode rule = XacmlNode::rule(true, {"a"});
    CHECK(xacml_decide(rule, {"a", "b"}) == XacmlDecision::Allow);
    CHECK(xacml_decide(rule, {"b"}) == XacmlDecision::NotApplicable);
  }

  SUBCASE("deny-overrides lets a deny win") {
    XacmlNode pol = XacmlNode::policy(
        "DenyOv", {XacmlNode::rule(true, {"a"}), XacmlNode::rule(false, {"a"})});
    CHECK(xacml_decide(pol, {"a"}) == XacmlDecision::Deny);
  }

  SUBCASE("first-applicable skips non-applicable children") {
    XacmlNode pol = XacmlNode::policy(
        "FirstApp", {XacmlNode::rule(false, {"b"}), XacmlNode::rule(true, {})});
    CHECK(xacml_decide(pol, {"a"}) == XacmlDecision::Allow);
  }

  SUBCASE("allow-overrides falls back to deny only without an allow") {
    XacmlNode pol = XacmlNode::policy(
        "AllowOv", {XacmlNode::rule(false, {}), XacmlNode::rule(true, {"a"})});
    CHECK(xacml_decide(pol, {"a"}) == XacmlDecision::Allow);
    CHECK(xacml_decide(pol, {}) == XacmlDecision::Deny);
  }

  SUBCASE("an empty policy matches nothing") {
    XacmlNode pol = XacmlNode::policy("AllowOv", {});
    CHECK(xacml_decide(pol, {"a"}) == XacmlDecision::NotApplicable);
  }
}

TEST_CASE("template fact inventory") {
  auto reqs = all_requests({"a1", "a2"});
  auto t = build_xacml({"a1", "a2"}, 1, 2, reqs);
  // Three node positions: three bits each for active/is-rule, a decision and
  // a combinator per node, and two required-attribute bits per node.
  CHECK(t.node_names.size() == 3);
  CHECK(t.facts.size() == 3 + 3 + 3 + 3 + 6);

  SUBCASE("an inactive root makes the formula false everywhere") {
    Interpretation zero = Interpretation::zeros(t.facts);
    for (std::size_t r = 0; r < reqs.size(); ++r)
      CHECK_FALSE(eval_formula(t.structure, zero, {static_cast<Elem>(r)}, *t.formula));
    XacmlNode extracted = extract_xacml(t, zero);
    CHECK_FALSE(extracted.is_rule);
    CHECK(extracted.children.empty());
  }
}

TEST_CASE("the recursion is built from unrelated pieces") {
  auto t = build_xacml({"a1", "a2"}, 2, 2, all_requests({"a1", "a2"}));
  const auto& s = t.structure;
  FormulaFactory mk(s);

  for (int node : {0, 1, 4}) {  // root and both children
    auto y = mk.lit(t.pols_sort, static_cast<Elem>(node));
    auto isrule = mk.rel(t.xisrule, {y});
    // The rule/policy split multiplexes on an atom unrelated to either side.
    CHECK(check_unrelated(
              s, {isrule, t.allows_rule[static_cast<std::size_t>(node)],
                  t.allows_pol[static_cast<std::size_t>(node)]})
              .unrelated);
    CHECK(check_unrelated(
              s, {isrule, t.allows_rule[static_cast<std::size_t>(node)],
                  t.denies_pol[static_cast<std::size_t>(node)]})
              .unrelated);
  }

  // Within a combinator branch, the combinator test shares nothing with the
  // child formulas it gates.
  auto oplus = t.allows_pol[0];
  REQUIRE(oplus->kind == FormulaKind::Oplus);
  for (const auto& branch : oplus->children) {
    REQUIRE(branch->kind == FormulaKind::And);
    CHECK(check_unrelated(s, {branch->children[0], branch->children[1]}).unrelated);
  }

  // First-applicable conjuncts range over distinct children.
  auto first_branch = oplus->children[1];
  auto inner = first_branch->children[1];
  REQUIRE(inner->kind == FormulaKind::Oplus);
  for (const auto& alt : inner->children)
    if (alt->kind == FormulaKind::And)
      CHECK(check_unrelated(s, alt->children).unrelated);
}

TEST_CASE("extraction semantics equal formula evaluation") {
  std::vector<std::string> attvals{"a1", "a2", "a3"};
  auto reqs = all_requests(attvals);
  auto t = build_xacml(attvals, 2, 2, reqs);
  mining::Rng rng(51);
  EvalOptions strict;
  strict.check_exclusive = true;

  for (int round = 0; round < 60; ++round) {
    Interpretation interp = test::random_interp(t.facts, rng);
    XacmlNode tree = extract_xacml(t, interp);
    for (std::size_t r = 0; r < reqs.size(); ++r) {
      bool via_formula =
          eval_formula(t.structure, interp, {static_cast<Elem>(r)}, *t.formula, strict);
      bool via_tree = xacml_decide(tree, reqs[r].second) == XacmlDecision::Allow;
      CHECK(via_formula == via_tree);
    }
  }
}

TEST_CASE("denial side mirrors the tree semantics as well") {
  std::vector<std::string> attvals{"a1", "a2"};
  auto reqs = all_requests(attvals);
  auto t = build_xacml(attvals, 2, 2, reqs);
  mining::Rng rng(53);
  EvalOptions strict;
  strict.check_exclusive = true;

  for (int round = 0; round < 60; ++round) {
    Interpretation interp = test::random_interp(t.facts, rng);
    XacmlNode tree = extract_xacml(t, interp);
    for (std::size_t r = 0; r < reqs.size(); ++r) {
      bool denies =
          eval_formula(t.structure, interp, {static_cast<Elem>(r)}, *t.denies[0], strict);
      bool na = eval_formula(t.structure, interp, {static_cast<Elem>(r)},
                             *t.not_applicable[0], strict);
      XacmlDecision d = xacml_decide(tree, reqs[r].second);
      CHECK(denies == (d == XacmlDecision::Deny));
      CHECK(na == (d == XacmlDecision::NotApplicable));
    }
  }
}

TEST_CASE("hand-built trees round-trip through the encoding") {
  std::vector<std::string> attvals{"a1", "a2", "a3"};
  auto reqs = all_requests(attvals);
  auto t = build_xacml(attvals, 3, 3, reqs);
  mining::Rng rng(57);

  for (int round = 0; round < 50; ++round) {
    XacmlNode tree = random_tree(rng, attvals, 0, 3, 3);
    Interpretation interp = encode_xacml(t, tree);
    XacmlNode back = extract_xacml(t, interp);
    CHECK(back == tree);
    for (std::size_t r = 0; r < reqs.size(); ++r)
      CHECK(xacml_decide(back, reqs[r].second) == xacml_decide(tree, reqs[r].second));
  }

  SUBCASE("trees beyond the grid are rejected") {
    auto deep = XacmlNode::policy(
        "FirstApp",
        {XacmlNode::policy(
            "FirstApp",
            {XacmlNode::policy("FirstApp",
                               {XacmlNode::policy("FirstApp", {XacmlNode::rule(true, {})})})})});
    CHECK_THROWS_AS(encode_xacml(t, deep), DataError);
  }
}

TEST_CASE("exclusivity obligations hold on random interpretations") {
  std::vector<std::string> attvals{"a1", "a2"};
  auto reqs = all_requests(attvals);
  auto t = build_xacml(attvals, 2, 2, reqs);
  mining::Rng rng(59);
  EvalOptions strict;
  strict.check_exclusive = true;
  for (int round = 0; round < 200; ++round) {
    Interpretation interp = test::random_interp(t.facts, rng);
    for (std::size_t r = 0; r < reqs.size(); ++r)
      CHECK_NOTHROW(
          eval_formula(t.structure, interp, {static_cast<Elem>(r)}, *t.formula, strict));
  }
}

TEST_CASE("grant expectations decompose exactly despite repeated atoms") {
  auto t = build_xacml({"a1"}, 1, 2, all_requests({"a1"}));
  CHECK_FALSE(check_diverse(t.structure, *t.formula).diverse);

  mining::Rng rng(61);
  for (int round = 0; round < 10; ++round) {
    expect::FactorDistribution q = test::random_factors(t.structure, t.facts, rng);
    for (Elem z = 0; z < 2; ++z) {
      double engine = expect::expect_formula(t.structure, t.facts, q, *t.formula, {z});
      double oracle = test::exhaustive_expect(t.structure, t.facts, q, *t.formula, {z});
      CHECK(std::abs(engine - oracle) <= 1e-9);
    }
  }
}

TEST_SUITE_END();
