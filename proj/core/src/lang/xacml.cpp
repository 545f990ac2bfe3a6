#include "polymine/lang/xacml.hpp"

#include <algorithm>

#include "polymine/logic/formula.hpp"

namespace polymine::lang {

XacmlNode XacmlNode::rule(bool allow, std::set<std::string> attrs) {
  XacmlNode n;
  n.is_rule = true;
  n.allow = allow;
  n.attrs = std::move(attrs);
  return n;
}

XacmlNode XacmlNode::policy(std::string comb, std::vector<XacmlNode> children) {
  XacmlNode n;
  n.is_rule = false;
  n.comb = std::move(comb);
  n.children = std::move(children);
  return n;
}

bool XacmlNode::operator==(const XacmlNode& o) const {
  if (is_rule != o.is_rule) return false;
  if (is_rule) return allow == o.allow && attrs == o.attrs;
  return comb == o.comb && children == o.children;
}

XacmlDecision xacml_decide(const XacmlNode& node, const std::set<std::string>& request) {
  if (node.is_rule) {
    if (!std::includes(request.begin(), request.end(), node.attrs.begin(), node.attrs.end()))
      return XacmlDecision::NotApplicable;
    return node.allow ? XacmlDecision::Allow : XacmlDecision::Deny;
  }
  if (node.comb == "FirstApp") {
    for (const auto& c : node.children) {
      XacmlDecision d = xacml_decide(c, request);
      if (d != XacmlDecision::NotApplicable) return d;
    }
    return XacmlDecision::NotApplicable;
  }
  bool any_allow = false, any_deny = false;
  for (const auto& c : node.children) {
    XacmlDecision d = xacml_decide(c, request);
    any_allow |= d == XacmlDecision::Allow;
    any_deny |= d == XacmlDecision::Deny;
  }
  if (node.comb == "AllowOv") {
    if (any_allow) return XacmlDecision::Allow;
    if (any_deny) return XacmlDecision::Deny;
    return XacmlDecision::NotApplicable;
  }
  if (node.comb == "DenyOv") {
    if (any_deny) return XacmlDecision::Deny;
    if (any_allow) return XacmlDecision::Allow;
    return XacmlDecision::NotApplicable;
  }
  throw DataError("unknown combination algorithm '" + node.comb + "'");
}

FactId XacmlTemplate::active_fact(int node) const {
  Elem args[1] = {static_cast<Elem>(node)};
  return facts.id_of(xactive, args);
}
FactId XacmlTemplate::isrule_fact(int node) const {
  Elem args[1] = {static_cast<Elem>(node)};
  return facts.id_of(xisrule, args);
}
FactId XacmlTemplate::req_fact(int node, int attval) const {
  Elem args[2] = {static_cast<Elem>(node), static_cast<Elem>(attval)};
  return facts.id_of(xreq, args);
}
FactId XacmlTemplate::dec_fact(int node) const {
  Elem args[1] = {static_cast<Elem>(node)};
  return facts.id_of(xdec, args);
}
FactId XacmlTemplate::comb_fact(int node) const {
  Elem args[1] = {static_cast<Elem>(node)};
  return facts.id_of(xcomb, args);
}

namespace {

void gen_nodes(const std::string& name, int depth, int max_depth, int breadth,
               std::vector<std::string>& names, std::vector<int>& depths,
               std::vector<std::vector<int>>& children) {
  int me = static_cast<int>(names.size());
  names.push_back(name);
  depths.push_back(depth);
  children.emplace_back();
  if (depth == max_depth) return;
  for (int j = 0; j < breadth; ++j) {
    children[static_cast<std::size_t>(me)].push_back(static_cast<int>(names.size()));
    gen_nodes(name + "." + std::to_string(j), depth + 1, max_depth, breadth, names, depths,
              children);
  }
}

}  // namespace

XacmlTemplate build_xacml(const std::vector<std::string>& attvals, int depth, int breadth,
                          const std::vector<std::pair<std::string, std::set<std::string>>>& requests) {
  if (depth < 1 || breadth < 1) throw ConfigError("depth and breadth must be at least 1");
  XacmlTemplate t;
  t.depth = depth;
  t.breadth = breadth;
  t.attvals = attvals;
  t.requests = requests;
  gen_nodes("y", 0, depth, breadth, t.node_names, t.node_depth, t.node_children);

  Structure& s = t.structure;
  std::vector<std::string> req_names;
  for (const auto& [name, attrs] : requests) req_names.push_back(name);
  t.reqs_sort = s.add_sort("REQS", req_names);
  t.avals_sort = s.add_sort("AVALS", attvals);
  t.pols_sort = s.add_sort("POLS", t.node_names);
  t.decs_sort = s.add_sort("DECS", {"allow", "deny"});
  t.combs_sort = s.add_sort("COMBS", {"FirstApp", "AllowOv", "DenyOv"});

  t.xactive = s.add_relation("XActive", {t.pols_sort}, false);
  t.xisrule = s.add_relation("XIsRule", {t.pols_sort}, false);
  t.xreq = s.add_relation("XRequiresAVal", {t.pols_sort, t.avals_sort}, false);
  t.xdec = s.add_function("XDec", {t.pols_sort}, t.decs_sort, false);
  t.xcomb = s.add_function("XComb", {t.pols_sort}, t.combs_sort, false);
  t.has_attval = s.add_relation("hasAttVal", {t.reqs_sort, t.avals_sort}, true);
  for (std::size_t r = 0; r < requests.size(); ++r)
    for (const auto& a : requests[r].second) {
      Elem args[2] = {static_cast<Elem>(r), s.elem(t.avals_sort, a)};
      s.add_rigid_tuple(t.has_attval, args);
    }
  s.validate();

  logic::FormulaFactory mk(s);
  auto z = mk.var(0, t.reqs_sort, "z");
  Elem allow_e = s.elem(t.decs_sort, "allow");
  Elem deny_e = s.elem(t.decs_sort, "deny");
  Elem firstapp_e = s.elem(t.combs_sort, "FirstApp");
  Elem allowov_e = s.elem(t.combs_sort, "AllowOv");
  Elem denyov_e = s.elem(t.combs_sort, "DenyOv");

  std::size_t n = t.node_names.size();
  std::vector<FormulaPtr>& allows = t.allows;
  std::vector<FormulaPtr>& denies = t.denies;
  std::vector<FormulaPtr>& na = t.not_applicable;
  allows.resize(n);
  denies.resize(n);
  na.resize(n);
  t.allows_rule.resize(n);
  t.allows_pol.resize(n);
  t.denies_pol.resize(n);

  // Children precede nothing in preorder, so walk nodes in reverse: every
  // child index is larger than its parent's.
  for (std::size_t rev = n; rev-- > 0;) {
    int i = static_cast<int>(rev);
    auto y = mk.lit(t.pols_sort, static_cast<Elem>(i));
    auto active = mk.rel(t.xactive, {y});
    auto isrule = mk.rel(t.xisrule, {y});

    std::vector<FormulaPtr> sat_parts;
    for (std::size_t a = 0; a < attvals.size(); ++a) {
      auto al = mk.lit(t.avals_sort, static_cast<Elem>(a));
      sat_parts.push_back(mk.implies(mk.rel(t.xreq, {y, al}), mk.rel(t.has_attval, {z, al})));
    }
    auto satisfies = mk.conj(sat_parts);

    auto dec_is = [&](Elem d) { return mk.eq(mk.app(t.xdec, {y}), mk.lit(t.decs_sort, d)); };
    auto comb_is = [&](Elem c) { return mk.eq(mk.app(t.xcomb, {y}), mk.lit(t.combs_sort, c)); };

    auto allows_rule = mk.conj({dec_is(allow_e), satisfies});
    auto denies_rule = mk.conj({dec_is(deny_e), satisfies});

    const auto& kids = t.node_children[static_cast<std::size_t>(i)];
    FormulaPtr allows_pol, denies_pol, na_kids;
    if (kids.empty()) {
      allows_pol = mk.bottom();
      denies_pol = mk.bottom();
      na_kids = mk.top();
    } else {
      auto prefix_na = [&](int j) {
        std::vector<FormulaPtr> parts;
        for (int k = 0; k < j; ++k) parts.push_back(na[static_cast<std::size_t>(kids[k])]);
        return parts;
      };
      int nkids = static_cast<int>(kids.size());

      std::vector<FormulaPtr> any_allows, any_denies;
      for (int j = 0; j < nkids; ++j) {
        any_allows.push_back(allows[static_cast<std::size_t>(kids[j])]);
        any_denies.push_back(denies[static_cast<std::size_t>(kids[j])]);
      }

      std::vector<FormulaPtr> first_allows, first_denies, denyov_allows, allowov_denies;
      for (int j = 0; j < nkids; ++j) {
        auto base = prefix_na(j);
        auto fa = base;
        fa.push_back(allows[static_cast<std::size_t>(kids[j])]);
        first_allows.push_back(mk.conj(fa));

        auto fd = base;
        fd.push_back(denies[static_cast<std::size_t>(kids[j])]);
        first_denies.push_back(mk.conj(fd));

        auto da = base;
        da.push_back(allows[static_cast<std::size_t>(kids[j])]);
        for (int k = j + 1; k < nkids; ++k)
          da.push_back(mk.negate(denies[static_cast<std::size_t>(kids[k])]));
        denyov_allows.push_back(mk.conj(da));

        auto ad = base;
        ad.push_back(denies[static_cast<std::size_t>(kids[j])]);
        for (int k = j + 1; k < nkids; ++k)
          ad.push_back(mk.negate(allows[static_cast<std::size_t>(kids[k])]));
        allowov_denies.push_back(mk.conj(ad));
      }

      allows_pol = mk.oplus({mk.conj({comb_is(allowov_e), mk.disj(any_allows)}),
                             mk.conj({comb_is(firstapp_e), mk.oplus(first_allows)}),
                             mk.conj({comb_is(denyov_e), mk.oplus(denyov_allows)})});
      denies_pol = mk.oplus({mk.conj({comb_is(allowov_e), mk.oplus(allowov_denies)}),
                             mk.conj({comb_is(firstapp_e), mk.oplus(first_denies)}),
                             mk.conj({comb_is(denyov_e), mk.disj(any_denies)})});
      std::vector<FormulaPtr> kid_nas;
      for (int j = 0; j < nkids; ++j) kid_nas.push_back(na[static_cast<std::size_t>(kids[j])]);
      na_kids = mk.conj(kid_nas);
    }

    allows[static_cast<std::size_t>(i)] = mk.conj(
        {active,
         mk.oplus({mk.conj({isrule, allows_rule}), mk.conj({mk.negate(isrule), allows_pol})})});
    denies[static_cast<std::size_t>(i)] = mk.conj(
        {active,
         mk.oplus({mk.conj({isrule, denies_rule}), mk.conj({mk.negate(isrule), denies_pol})})});
    na[static_cast<std::size_t>(i)] =
        mk.oplus({mk.negate(active),
                  mk.conj({active, mk.oplus({mk.conj({isrule, mk.negate(satisfies)}),
                                             mk.conj({mk.negate(isrule), na_kids})})})});
    t.allows_rule[static_cast<std::size_t>(i)] = allows_rule;
    t.allows_pol[static_cast<std::size_t>(i)] = allows_pol;
    t.denies_pol[static_cast<std::size_t>(i)] = denies_pol;
  }

  t.formula = allows[0];
  t.facts = logic::enumerate_random_facts(*t.formula, s);
  return t;
}

namespace {

bool node_live(const XacmlTemplate& t, const Interpretation& interp, int i) {
  if (!interp.value(t.active_fact(i))) return false;
  if (interp.value(t.isrule_fact(i))) return true;
  for (int c : t.node_children[static_cast<std::size_t>(i)])
    if (node_live(t, interp, c)) return true;
  return false;
}

XacmlNode extract_node(const XacmlTemplate& t, const Interpretation& interp, int i) {
  if (interp.value(t.isrule_fact(i))) {
    std::set<std::string> attrs;
    for (std::size_t a = 0; a < t.attvals.size(); ++a)
      if (interp.value(t.req_fact(i, static_cast<int>(a)))) attrs.insert(t.attvals[a]);
    bool allow = interp.value(t.dec_fact(i)) ==
                 t.structure.elem(t.decs_sort, "allow");
    return XacmlNode::rule(allow, std::move(attrs));
  }
  std::vector<XacmlNode> children;
  for (int c : t.node_children[static_cast<std::size_t>(i)])
    if (node_live(t, interp, c)) children.push_back(extract_node(t, interp, c));
  std::string comb = t.structure.elem_name(
      t.combs_sort, static_cast<Elem>(interp.value(t.comb_fact(i))));
  return XacmlNode::policy(std::move(comb), std::move(children));
}

}  // namespace

XacmlNode extract_xacml(const XacmlTemplate& t, const Interpretation& interp) {
  if (!node_live(t, interp, 0)) return XacmlNode::policy("AllowOv", {});
  return extract_node(t, interp, 0);
}

namespace {

void encode_node(const XacmlTemplate& t, const XacmlNode& node, int i, Interpretation& interp) {
  interp.set(t.active_fact(i), 1);
  if (node.is_rule) {
    interp.set(t.isrule_fact(i), 1);
    interp.set(t.dec_fact(i),
               t.structure.elem(t.decs_sort, node.allow ? "allow" : "deny"));
    for (const auto& a : node.attrs) {
      auto it = std::find(t.attvals.begin(), t.attvals.end(), a);
      if (it == t.attvals.end())
        throw DataError("rule requires unknown attribute value '" + a + "'");
      interp.set(t.req_fact(i, static_cast<int>(it - t.attvals.begin())), 1);
    }
    return;
  }
  const auto& kids = t.node_children[static_cast<std::size_t>(i)];
  if (node.children.size() > kids.size())
    throw DataError("tree does not fit the template's depth/breadth grid");
  interp.set(t.isrule_fact(i), 0);
  interp.set(t.comb_fact(i), t.structure.elem(t.combs_sort, node.comb));
  for (std::size_t j = 0; j < node.children.size(); ++j)
    encode_node(t, node.children[j], kids[j], interp);
}

}  // namespace

Interpretation encode_xacml(const XacmlTemplate& t, const XacmlNode& tree) {
  Interpretation interp = Interpretation::zeros(t.facts);
  encode_node(t, tree, 0, interp);
  return interp;
}

}  // namespace polymine::lang
