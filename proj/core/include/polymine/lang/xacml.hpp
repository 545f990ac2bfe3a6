#pragma once

#include <set>
#include <string>

#include "polymine/logic/facts.hpp"

namespace polymine::lang {

using logic::Elem;
using logic::FactId;
using logic::FactSet;
using logic::FormulaPtr;
using logic::Interpretation;
using logic::Structure;

// Rule (decision, attribute set) or policy (combinator, children).
struct XacmlNode {
  bool is_rule = true;
  bool allow = true;                 // rule decision
  std::set<std::string> attrs;       // rule target
  std::string comb = "FirstApp";     // FirstApp | AllowOv | DenyOv
  std::vector<XacmlNode> children;

  static XacmlNode rule(bool allow, std::set<std::string> attrs);
  static XacmlNode policy(std::string comb, std::vector<XacmlNode> children);
  bool operator==(const XacmlNode& o) const;
};

enum class XacmlDecision { Allow, Deny, NotApplicable };

// Direct recursive evaluation of the three combination algorithms; shares
// nothing with the formula machinery.
XacmlDecision xacml_decide(const XacmlNode& node, const std::set<std::string>& request);

// Template over the full node grid: all breadth-ary sequences of length at
// most `depth`, in preorder. The request variable z has id 0.
struct XacmlTemplate {
  Structure structure;
  FormulaPtr formula;
  FactSet facts;
  int depth = 1, breadth = 1;
  std::vector<std::string> attvals;
  std::vector<std::string> node_names;
  std::vector<int> node_depth;
  std::vector<std::vector<int>> node_children;
  std::vector<std::pair<std::string, std::set<std::string>>> requests;
  logic::SymbolId xactive = -1, xisrule = -1, xreq = -1, xdec = -1, xcomb = -1, has_attval = -1;
  logic::SortId pols_sort = -1, avals_sort = -1, reqs_sort = -1, decs_sort = -1, combs_sort = -1;

  // Per-node pieces of the recursion, exposed for the decomposability checks.
  std::vector<FormulaPtr> allows, denies, not_applicable;
  std::vector<FormulaPtr> allows_rule, allows_pol, denies_pol;

  FactId active_fact(int node) const;
  FactId isrule_fact(int node) const;
  FactId req_fact(int node, int attval) const;
  FactId dec_fact(int node) const;
  FactId comb_fact(int node) const;
};

XacmlTemplate build_xacml(const std::vector<std::string>& attvals, int depth, int breadth,
                          const std::vector<std::pair<std::string, std::set<std::string>>>& requests);

// Argmax mapping to a policy tree: a node enters the tree while it is active
// and either a rule or a policy with some live descendant rule; a dead root
// yields the empty policy, which matches nothing.
XacmlNode extract_xacml(const XacmlTemplate& t, const Interpretation& interp);

// Interpretation whose extraction reproduces the tree; the surjectivity
// construction behind the round-trip property.
Interpretation encode_xacml(const XacmlTemplate& t, const XacmlNode& tree);

}  // namespace polymine::lang
