#include "polymine/lang/starbac.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "polymine/logic/formula.hpp"

namespace polymine::lang {

double rect_distance_sq(const Building& b, double px, double py) {
  double dx = std::max({b.x0 - px, 0.0, px - b.x1});
  double dy = std::max({b.y0 - py, 0.0, py - b.y1});
  return dx * dx + dy * dy;
}

bool within_distance(const Building& b, double px, double py, int d) {
  return rect_distance_sq(b, px, py) <= static_cast<double>(d) * d;
}

bool PeriodicExpression::satisfied(int month, int day, int hour) const {
  if (!months.count(month) || !days.count(day)) return false;
  for (int h : hours)
    if (h <= hour && hour < h + window) return true;
  return false;
}

PeriodicExpression PeriodicExpression::normalized() const {
  PeriodicExpression out;
  out.months = months;
  out.days = days;
  out.window = 1;
  for (int h : hours)
    for (int x = h; x < h + window && x <= 24; ++x) out.hours.insert(x);
  return out;
}

bool StarbacSide::satisfied(const std::vector<Building>& buildings, double px, double py,
                            int month, int day, int hour) const {
  if (!spatial.empty()) {
    bool any = false;
    for (const auto& sc : spatial) {
      auto it = std::find_if(buildings.begin(), buildings.end(),
                             [&](const Building& b) { return b.name == sc.building; });
      if (it == buildings.end()) throw DataError("unknown building '" + sc.building + "'");
      bool inside = within_distance(*it, px, py, sc.distance);
      if (sc.negated ? !inside : inside) {
        any = true;
        break;
      }
    }
    if (!any) return false;
  }
  for (const auto& pe : temporal)
    if (!pe.satisfied(month, day, hour)) return false;
  return true;
}

bool StarbacPolicy::grants(const std::vector<Building>& buildings, int month, int day, int hour,
                           double ux, double uy, double px, double py) const {
  for (const auto& role : roles)
    if (role.user_side.satisfied(buildings, ux, uy, month, day, hour) &&
        role.perm_side.satisfied(buildings, px, py, month, day, hour))
      return true;
  return false;
}

int StarbacTemplate::sslot(int role, int side, int k) const {
  return (role * 2 + side) * config.spatial_slots + k;
}
int StarbacTemplate::tslot(int role, int side, int j) const {
  return (role * 2 + side) * config.temporal_slots + j;
}

namespace {
FactId unary_fact(const FactSet& fs, logic::SymbolId sym, int a) {
  Elem args[1] = {static_cast<Elem>(a)};
  return fs.id_of(sym, args);
}
FactId binary_fact(const FactSet& fs, logic::SymbolId sym, int a, int b) {
  Elem args[2] = {static_cast<Elem>(a), static_cast<Elem>(b)};
  return fs.id_of(sym, args);
}
}  // namespace

FactId StarbacTemplate::sp_en_fact(int slot) const { return unary_fact(facts, sp_en, slot); }
FactId StarbacTemplate::sp_neg_fact(int slot) const { return unary_fact(facts, sp_neg, slot); }
FactId StarbacTemplate::sp_dist_fact(int slot) const { return unary_fact(facts, sp_dist, slot); }
FactId StarbacTemplate::sp_bld_fact(int slot) const { return unary_fact(facts, sp_bld, slot); }
FactId StarbacTemplate::t_en_fact(int slot) const { return unary_fact(facts, t_en, slot); }
FactId StarbacTemplate::pm_fact(int slot, int month) const {
  return binary_fact(facts, pm, slot, month - 1);
}
FactId StarbacTemplate::pd_fact(int slot, int day) const {
  return binary_fact(facts, pd, slot, day - 1);
}
FactId StarbacTemplate::ph_fact(int slot, int hour) const {
  return binary_fact(facts, ph, slot, hour - 1);
}
FactId StarbacTemplate::t_win_fact(int slot) const { return unary_fact(facts, t_win, slot); }

namespace {

std::string point_name(double x, double y) {
  std::string sx = std::to_string(x), sy = std::to_string(y);
  sx.erase(sx.find_last_not_of('0') + 1);
  sy.erase(sy.find_last_not_of('0') + 1);
  if (!sx.empty() && sx.back() == '.') sx.pop_back();
  if (!sy.empty() && sy.back() == '.') sy.pop_back();
  return sx + ";" + sy;
}

std::string instant_name(int m, int d, int h) {
  return std::to_string(m) + "-" + std::to_string(d) + "-" + std::to_string(h);
}

}  // namespace

logic::Binding StarbacTemplate::binding_for(const StarbacRequest& r) const {
  const Structure& s = structure;
  logic::Binding b(3);
  b[0] = s.elem(instants_sort, instant_name(r.month, r.day, r.hour));
  b[1] = s.elem(s.users_sort(), point_name(r.ux, r.uy));
  b[2] = s.elem(s.perms_sort(), point_name(r.px, r.py));
  return b;
}

StarbacTemplate build_starbac(const std::vector<StarbacRequest>& requests,
                              const std::vector<Building>& buildings,
                              const StarbacConfig& config) {
  if (config.roles < 1) throw ConfigError("role count must be at least 1");
  if (buildings.empty()) throw ConfigError("building list must be non-empty");
  StarbacTemplate t;
  t.config = config;
  t.buildings = buildings;
  Structure& s = t.structure;

  // Carriers from the request log. Users and permissions are identified by
  // their positions; distinct positions double as the POINTS carrier.
  std::map<std::string, std::pair<double, double>> upoints, ppoints, points;
  std::set<std::string> instants;
  for (const auto& r : requests) {
    upoints[point_name(r.ux, r.uy)] = {r.ux, r.uy};
    ppoints[point_name(r.px, r.py)] = {r.px, r.py};
    if (r.month < 1 || r.month > 12 || r.day < 1 || r.day > 31 || r.hour < 1 || r.hour > 24)
      throw DataError("time instant outside the calendar carriers");
    instants.insert(instant_name(r.month, r.day, r.hour));
  }
  points = upoints;
  points.insert(ppoints.begin(), ppoints.end());

  auto names = [](const auto& m) {
    std::vector<std::string> out;
    for (const auto& [k, v] : m) out.push_back(k);
    return out;
  };
  s.set_carrier(s.users_sort(), names(upoints));
  s.set_carrier(s.perms_sort(), names(ppoints));
  t.points_sort = s.add_sort("POINTS", names(points));
  t.instants_sort = s.add_sort("INSTANTS", {instants.begin(), instants.end()});
  t.months_sort = s.add_int_sort("MONTHS", 1, 12);
  t.days_sort = s.add_int_sort("DAYS", 1, 31);
  t.hours_sort = s.add_int_sort("HOURS", 1, 24);
  t.win_sort = s.add_int_sort("WINDOW", 1, 24);
  t.dist_sort = s.add_int_sort("DIST", 0, config.max_distance);
  std::vector<std::string> bnames;
  for (const auto& b : buildings) bnames.push_back(b.name);
  t.bldg_sort = s.add_sort("BLDGS", bnames);

  std::vector<std::string> sslots, tslots;
  for (int i = 0; i < config.roles; ++i)
    for (int side = 0; side < 2; ++side)
      for (int k = 0; k < config.spatial_slots; ++k)
        sslots.push_back("r" + std::to_string(i + 1) + (side ? ".p" : ".u") + ".s" +
                         std::to_string(k + 1));
  for (int i = 0; i < config.roles; ++i)
    for (int side = 0; side < 2; ++side)
      for (int j = 0; j < config.temporal_slots; ++j)
        tslots.push_back("r" + std::to_string(i + 1) + (side ? ".p" : ".u") + ".t" +
                         std::to_string(j + 1));
  t.sslot_sort = s.add_sort("SSLOTS", sslots);
  t.tslot_sort = s.add_sort("TSLOTS", tslots);

  if (config.spatial_slots > 0) {
    t.sp_en = s.add_relation("SpEnabled", {t.sslot_sort}, false);
    t.sp_neg = s.add_relation("SpNegated", {t.sslot_sort}, false);
    t.sp_dist = s.add_function("SpDist", {t.sslot_sort}, t.dist_sort, false);
    t.sp_bld = s.add_function("SpBldg", {t.sslot_sort}, t.bldg_sort, false);
  }
  if (config.temporal_slots > 0) {
    t.t_en = s.add_relation("TEnabled", {t.tslot_sort}, false);
    t.pm = s.add_relation("PM", {t.tslot_sort, t.months_sort}, false);
    t.pd = s.add_relation("PD", {t.tslot_sort, t.days_sort}, false);
    t.ph = s.add_relation("PH", {t.tslot_sort, t.hours_sort}, false);
    t.t_win = s.add_function("TWin", {t.tslot_sort}, t.win_sort, false);
  }
  if (config.spatial_slots == 0 && config.temporal_slots == 0)
    throw ConfigError("at least one spatial or temporal slot is needed");

  t.loc_u = s.add_function("LocU", {s.users_sort()}, t.points_sort, true);
  t.loc_p = s.add_function("LocP", {s.perms_sort()}, t.points_sort, true);
  t.is_within = s.add_relation("isWithin", {t.points_sort, t.dist_sort, t.bldg_sort}, true);
  t.month_of = s.add_function("monthOf", {t.instants_sort}, t.months_sort, true);
  t.day_of = s.add_function("dayOf", {t.instants_sort}, t.days_sort, true);
  t.hour_of = s.add_function("hourOf", {t.instants_sort}, t.hours_sort, true);

  std::vector<std::pair<double, double>> point_xy;
  for (const auto& [name, xy] : points) point_xy.push_back(xy);
  s.define_rigid_function(t.loc_u, [&](std::span<const Elem> args) {
    return s.elem(t.points_sort, s.elem_name(s.users_sort(), args[0]));
  });
  s.define_rigid_function(t.loc_p, [&](std::span<const Elem> args) {
    return s.elem(t.points_sort, s.elem_name(s.perms_sort(), args[0]));
  });
  s.define_rigid_relation(t.is_within, [&](std::span<const Elem> args) {
    auto [x, y] = point_xy[static_cast<std::size_t>(args[0])];
    return within_distance(buildings[static_cast<std::size_t>(args[2])], x, y,
                           static_cast<int>(args[1]));
  });
  auto instant_field = [&](int which) {
    return [&, which](std::span<const Elem> args) -> Elem {
      const std::string& name = s.elem_name(t.instants_sort, args[0]);
      int m = 0, d = 0, h = 0;
      std::sscanf(name.c_str(), "%d-%d-%d", &m, &d, &h);
      int v = which == 0 ? m : which == 1 ? d : h;
      return static_cast<Elem>(v - 1);
    };
  };
  s.define_rigid_function(t.month_of, instant_field(0));
  s.define_rigid_function(t.day_of, instant_field(1));
  s.define_rigid_function(t.hour_of, instant_field(2));
  s.validate();

  logic::FormulaFactory mk(s);
  auto tvar = mk.var(0, t.instants_sort, "t");
  auto uvar = mk.var(1, s.users_sort(), "u");
  auto pvar = mk.var(2, s.perms_sort(), "p");

  auto spatial_position = [&](int role, int side, const logic::TermPtr& entity,
                              logic::SymbolId loc) -> FormulaPtr {
    if (config.spatial_slots == 0) return mk.top();
    std::vector<FormulaPtr> all_off, enabled_sat;
    for (int k = 0; k < config.spatial_slots; ++k) {
      auto slot = mk.lit(t.sslot_sort, static_cast<Elem>(t.sslot(role, side, k)));
      auto en = mk.rel(t.sp_en, {slot});
      auto neg = mk.rel(t.sp_neg, {slot});
      auto within = mk.rel(t.is_within,
                           {mk.app(loc, {entity}), mk.app(t.sp_dist, {slot}),
                            mk.app(t.sp_bld, {slot})});
      auto sat = mk.oplus({mk.conj({neg, mk.negate(within)}),
                           mk.conj({mk.negate(neg), within})});
      all_off.push_back(mk.negate(en));
      enabled_sat.push_back(mk.conj({en, sat}));
    }
    return mk.oplus({mk.conj(all_off), mk.disj(enabled_sat)});
  };

  auto temporal_slot = [&](int slot_ix) -> FormulaPtr {
    auto slot = mk.lit(t.tslot_sort, static_cast<Elem>(slot_ix));
    auto en = mk.rel(t.t_en, {slot});
    std::vector<FormulaPtr> month_branches, day_branches, hour_branches;
    for (int m = 1; m <= 12; ++m) {
      auto ml = mk.lit(t.months_sort, static_cast<Elem>(m - 1));
      month_branches.push_back(
          mk.conj({mk.rel(t.pm, {slot, ml}), mk.eq(mk.app(t.month_of, {tvar}), ml)}));
    }
    for (int d = 1; d <= 31; ++d) {
      auto dl = mk.lit(t.days_sort, static_cast<Elem>(d - 1));
      day_branches.push_back(
          mk.conj({mk.rel(t.pd, {slot, dl}), mk.eq(mk.app(t.day_of, {tvar}), dl)}));
    }
    for (int h = 1; h <= 24; ++h) {
      auto hl = mk.lit(t.hours_sort, static_cast<Elem>(h - 1));
      hour_branches.push_back(mk.conj(
          {mk.rel(t.ph, {slot, hl}), mk.le(hl, mk.app(t.hour_of, {tvar})),
           mk.lt(mk.app(t.hour_of, {tvar}), mk.sum({hl, mk.app(t.t_win, {slot})}))}));
    }
    auto cal = mk.conj({mk.disj(month_branches), mk.disj(day_branches),
                        mk.disj(hour_branches)});
    return mk.oplus({mk.negate(en), mk.conj({en, cal})});
  };

  auto side_formula = [&](int role, int side, const logic::TermPtr& entity,
                          logic::SymbolId loc) -> FormulaPtr {
    std::vector<FormulaPtr> conjuncts;
    conjuncts.push_back(spatial_position(role, side, entity, loc));
    for (int j = 0; j < config.temporal_slots; ++j)
      conjuncts.push_back(temporal_slot(t.tslot(role, side, j)));
    return mk.conj(conjuncts);
  };

  std::vector<FormulaPtr> role_branches;
  for (int i = 0; i < config.roles; ++i)
    role_branches.push_back(mk.conj(
        {side_formula(i, 0, uvar, t.loc_u), side_formula(i, 1, pvar, t.loc_p)}));
  t.formula = mk.disj(role_branches);
  t.facts = logic::enumerate_random_facts(*t.formula, s);
  return t;
}

StarbacPolicy extract_starbac(const StarbacTemplate& t, const Interpretation& interp) {
  StarbacPolicy pol;
  const Structure& s = t.structure;
  for (int i = 0; i < t.config.roles; ++i) {
    StarbacRole role;
    for (int side = 0; side < 2; ++side) {
      StarbacSide& out = side ? role.perm_side : role.user_side;
      for (int k = 0; k < t.config.spatial_slots; ++k) {
        int slot = t.sslot(i, side, k);
        if (!interp.value(t.sp_en_fact(slot))) continue;
        SpatialConstraint sc;
        sc.negated = interp.value(t.sp_neg_fact(slot)) != 0;
        sc.distance = static_cast<int>(
            s.elem_numeric(t.dist_sort, static_cast<Elem>(interp.value(t.sp_dist_fact(slot)))));
        sc.building = s.elem_name(t.bldg_sort,
                                  static_cast<Elem>(interp.value(t.sp_bld_fact(slot))));
        out.spatial.push_back(std::move(sc));
      }
      for (int j = 0; j < t.config.temporal_slots; ++j) {
        int slot = t.tslot(i, side, j);
        if (!interp.value(t.t_en_fact(slot))) continue;
        PeriodicExpression pe;
        for (int m = 1; m <= 12; ++m)
          if (interp.value(t.pm_fact(slot, m))) pe.months.insert(m);
        for (int d = 1; d <= 31; ++d)
          if (interp.value(t.pd_fact(slot, d))) pe.days.insert(d);
        for (int h = 1; h <= 24; ++h)
          if (interp.value(t.ph_fact(slot, h))) pe.hours.insert(h);
        pe.window = static_cast<int>(
            s.elem_numeric(t.win_sort, static_cast<Elem>(interp.value(t.t_win_fact(slot)))));
        out.temporal.push_back(pe.normalized());
      }
    }
    pol.roles.push_back(std::move(role));
  }
  return pol;
}

const std::vector<Building>& fixture_buildings() {
  static const std::vector<Building> buildings = {
      {"MainBuilding", 1, 3, 4, 4}, {"Library", 1, 1, 2, 2},     {"Station", 8, 1, 9, 9},
      {"Laboratory", 2, 6, 4, 8},   {"ComputerRoom", 6, 6, 7, 7},
  };
  return buildings;
}

bool fixture_grants(const StarbacRequest& r) {
  const auto& b = fixture_buildings();
  const Building& main = b[0];
  const Building& library = b[1];
  const Building& station = b[2];
  const Building& lab = b[3];
  const Building& computer = b[4];

  // Role 1: near the computer room, object in the computer room or lab,
  // odd day, 8AM-5PM.
  if (within_distance(computer, r.ux, r.uy, 1) &&
      (within_distance(computer, r.px, r.py, 0) || within_distance(lab, r.px, r.py, 0)) &&
      r.day % 2 == 1 && r.hour >= 8 && r.hour < 17)
    return true;

  // Role 2: user outside the library, object near it, early-month
  // afternoons or late-month mornings.
  if (!within_distance(library, r.ux, r.uy, 0) && within_distance(library, r.px, r.py, 1) &&
      ((r.day < 10 && r.hour >= 14 && r.hour < 20) ||
       (r.day > 15 && r.hour >= 8 && r.hour < 12)))
    return true;

  // Role 3: both parties near the main building.
  if (within_distance(main, r.ux, r.uy, 3) && within_distance(main, r.px, r.py, 3)) return true;

  // Role 4: user in the library, object outside, first half of the month,
  // midnight to noon.
  if (within_distance(library, r.ux, r.uy, 0) && !within_distance(library, r.px, r.py, 0) &&
      r.day < 15 && r.hour <= 12)
    return true;

  // Role 5: both parties on campus, first half of the month, midnight to noon.
  auto on_campus = [&](double x, double y) {
    return within_distance(main, x, y, 0) || within_distance(library, x, y, 1) ||
           within_distance(lab, x, y, 0) || within_distance(computer, x, y, 2) ||
           within_distance(station, x, y, 0);
  };
  if (on_campus(r.ux, r.uy) && on_campus(r.px, r.py) && r.day < 15 && r.hour <= 12) return true;

  return false;
}

std::vector<LabeledRequest> generate_starbac_fixture(std::uint64_t seed, int count) {
  mining::Rng rng(seed);
  std::vector<LabeledRequest> log;
  log.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    LabeledRequest entry;
    entry.request.month = static_cast<int>(rng.below(12)) + 1;
    entry.request.day = static_cast<int>(rng.below(31)) + 1;
    entry.request.hour = static_cast<int>(rng.below(24)) + 1;
    entry.request.ux = static_cast<double>(rng.below(11));
    entry.request.uy = static_cast<double>(rng.below(11));
    entry.request.px = static_cast<double>(rng.below(11));
    entry.request.py = static_cast<double>(rng.below(11));
    entry.allowed = fixture_grants(entry.request);
    log.push_back(entry);
  }
  return log;
}

}  // namespace polymine::lang
