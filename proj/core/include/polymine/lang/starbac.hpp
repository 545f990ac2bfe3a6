#pragma once

#include <set>
#include <string>

#include "polymine/logic/eval.hpp"
#include "polymine/mining/rng.hpp"

namespace polymine::lang {

using logic::Elem;
using logic::FactId;
using logic::FactSet;
using logic::FormulaPtr;
using logic::Interpretation;
using logic::Structure;

struct Building {
  std::string name;
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // axis-aligned rectangle
};

// Squared Euclidean distance from a point to the rectangle (0 inside).
double rect_distance_sq(const Building& b, double px, double py);
bool within_distance(const Building& b, double px, double py, int d);

// Calendar: months 1-12, days 1-31, hours 1-24.
struct PeriodicExpression {
  std::set<int> months, days, hours;
  int window = 1;

  bool satisfied(int month, int day, int hour) const;
  // Equivalent expression with the window folded into the hour set.
  PeriodicExpression normalized() const;
};

struct SpatialConstraint {
  bool negated = false;
  int distance = 0;
  std::string building;
};

// One side (user or permission) of a role: a disjunction of spatial
// constraints (vacuously true when empty) conjoined with periodic
// expressions, one per enabled temporal slot.
struct StarbacSide {
  std::vector<SpatialConstraint> spatial;
  std::vector<PeriodicExpression> temporal;

  bool satisfied(const std::vector<Building>& buildings, double px, double py, int month, int day,
                 int hour) const;
};

struct StarbacRole {
  StarbacSide user_side, perm_side;
};

struct StarbacPolicy {
  std::vector<StarbacRole> roles;

  bool grants(const std::vector<Building>& buildings, int month, int day, int hour, double ux,
              double uy, double px, double py) const;
};

struct StarbacRequest {
  int month = 1, day = 1, hour = 1;
  double ux = 0, uy = 0, px = 0, py = 0;
};

struct StarbacConfig {
  int roles = 5;
  int spatial_slots = 2;   // disjuncts of the spatial constraint, per side
  int temporal_slots = 2;  // conjoined periodic-expression slots, per side
  int max_distance = 10;   // distance constants range over 0..max_distance
};

// Free variables: t (0, INSTANTS), u (1, USERS), p (2, PERMS). Users and
// permissions are identified with the distinct request positions; instants
// with the distinct request times.
struct StarbacTemplate {
  Structure structure;
  FormulaPtr formula;
  FactSet facts;
  StarbacConfig config;
  std::vector<Building> buildings;

  logic::SortId instants_sort = -1, points_sort = -1, dist_sort = -1, bldg_sort = -1;
  logic::SortId months_sort = -1, days_sort = -1, hours_sort = -1, win_sort = -1;
  logic::SortId sslot_sort = -1, tslot_sort = -1;
  logic::SymbolId sp_en = -1, sp_neg = -1, sp_dist = -1, sp_bld = -1;
  logic::SymbolId t_en = -1, pm = -1, pd = -1, ph = -1, t_win = -1;
  logic::SymbolId loc_u = -1, loc_p = -1, is_within = -1;
  logic::SymbolId month_of = -1, day_of = -1, hour_of = -1;

  int sslot(int role, int side, int k) const;  // side: 0 user, 1 perm
  int tslot(int role, int side, int j) const;
  FactId sp_en_fact(int slot) const;
  FactId sp_neg_fact(int slot) const;
  FactId sp_dist_fact(int slot) const;
  FactId sp_bld_fact(int slot) const;
  FactId t_en_fact(int slot) const;
  FactId pm_fact(int slot, int month) const;  // 1-based month
  FactId pd_fact(int slot, int day) const;
  FactId ph_fact(int slot, int hour) const;
  FactId t_win_fact(int slot) const;

  // Binding for a request; time and positions must be present in the
  // carriers the template was built over.
  logic::Binding binding_for(const StarbacRequest& r) const;
};

StarbacTemplate build_starbac(const std::vector<StarbacRequest>& requests,
                              const std::vector<Building>& buildings,
                              const StarbacConfig& config);

StarbacPolicy extract_starbac(const StarbacTemplate& t, const Interpretation& interp);

// The synthetic five-building, five-role policy used as a ground-truth
// generator and end-to-end fixture.
const std::vector<Building>& fixture_buildings();
bool fixture_grants(const StarbacRequest& r);

struct LabeledRequest {
  StarbacRequest request;
  bool allowed = false;
};

// Uniform requests: integer positions on the 0..10 grid covering the
// buildings, months 1-12, days 1-31, hours 1-24; labels by fixture_grants.
std::vector<LabeledRequest> generate_starbac_fixture(std::uint64_t seed, int count);

}  // namespace polymine::lang
