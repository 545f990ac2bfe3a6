#pragma once

#include "polymine/expect/loss.hpp"
#include "polymine/lang/rbac.hpp"
#include "polymine/objectives/objectives.hpp"

namespace polymine::test {

// Three users (Alice, Bob, Charlie), three permissions (c, m, d), two roles,
// and the two reference interpretations whose induced assignments differ
// from the authorization matrix by one and two entries.
struct Example2 {
  lang::RbacTemplate t;
  logic::Interpretation j1, j2;
  std::vector<logic::Binding> requests;  // all 9 user-permission pairs
  std::vector<bool> auth;
  expect::LossExpression loss;

  Example2() : t(lang::build_rbac({"Alice", "Bob", "Charlie"}, {"c", "m", "d"}, 2)) {
    j1 = logic::Interpretation::zeros(t.facts);
    j1.set(t.ua_fact(0, 0), 1);  // Alice -> r1
    j1.set(t.ua_fact(1, 0), 1);  // Bob -> r1
    j1.set(t.ua_fact(2, 1), 1);  // Charlie -> r2
    j1.set(t.pa_fact(0, 0), 1);  // r1 -> c
    j1.set(t.pa_fact(0, 1), 1);  // r1 -> m
    j1.set(t.pa_fact(1, 2), 1);  // r2 -> d

    j2 = logic::Interpretation::zeros(t.facts);
    j2.set(t.ua_fact(0, 0), 1);
    j2.set(t.ua_fact(1, 0), 1);
    j2.set(t.ua_fact(2, 1), 1);
    j2.set(t.pa_fact(0, 1), 1);  // r1 -> m
    j2.set(t.pa_fact(1, 0), 1);  // r2 -> c
    j2.set(t.pa_fact(1, 2), 1);  // r2 -> d

    // Auth: Alice {c,m}, Bob {c,m}, Charlie {c,d}
    bool grid[3][3] = {{true, true, false}, {true, true, false}, {true, false, true}};
    for (logic::Elem u = 0; u < 3; ++u)
      for (logic::Elem p = 0; p < 3; ++p) {
        requests.push_back({u, p});
        auth.push_back(grid[u][p]);
      }
    loss = objectives::symmetric_difference_loss(t.formula, requests, auth);
  }

  Example2(const Example2&) = delete;
  Example2& operator=(const Example2&) = delete;
};

}  // namespace polymine::test
