#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "polymine/errors.hpp"

namespace polymine::logic {

using SortId = std::int32_t;
using SymbolId = std::int32_t;
using Elem = std::int32_t;  // index into a sort's carrier

// A sort together with its finite, ordered carrier. Carrier order is the
// canonical total order used everywhere (fact enumeration, tie breaking).
struct Sort {
  std::string name;
  std::vector<std::string> carrier;
  std::vector<long long> numeric;  // per-element numeric value, set iff is_numeric
  bool is_numeric = false;

  std::size_t size() const { return carrier.size(); }
};

enum class SymbolKind { Relation, Function };

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Relation;
  bool rigid = false;
  std::vector<SortId> arg_sorts;
  SortId result_sort = -1;  // BOOL for relations

  bool is_constant() const { return kind == SymbolKind::Function && arg_sorts.empty(); }
};

// Signature plus carriers plus the fixed rigid interpretation. The flexible
// symbols carry no interpretation here; the miner searches for one.
class Structure {
 public:
  Structure();

  // --- sorts ---------------------------------------------------------------
  SortId add_sort(std::string name, std::vector<std::string> carrier);
  SortId add_int_sort(std::string name, long long lo, long long hi);
  void set_carrier(SortId sort, std::vector<std::string> carrier);

  SortId sort_id(const std::string& name) const;
  SortId find_sort(const std::string& name) const;  // -1 if absent
  const Sort& sort(SortId id) const { return sorts_.at(static_cast<std::size_t>(id)); }
  std::size_t sort_count() const { return sorts_.size(); }

  SortId bool_sort() const { return bool_sort_; }
  SortId users_sort() const { return users_sort_; }
  SortId perms_sort() const { return perms_sort_; }

  Elem elem(SortId sort, const std::string& name) const;
  std::optional<Elem> find_elem(SortId sort, const std::string& name) const;
  const std::string& elem_name(SortId sort, Elem e) const;
  long long elem_numeric(SortId sort, Elem e) const;

  // --- symbols -------------------------------------------------------------
  SymbolId add_relation(std::string name, std::vector<SortId> args, bool rigid);
  SymbolId add_function(std::string name, std::vector<SortId> args, SortId result, bool rigid);
  SymbolId add_constant(std::string name, SortId sort, bool rigid);

  SymbolId symbol_id(const std::string& name) const;
  SymbolId find_symbol(const std::string& name) const;  // -1 if absent
  const Symbol& symbol(SymbolId id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  std::size_t symbol_count() const { return symbols_.size(); }

  // --- rigid interpretation ------------------------------------------------
  // Relations default to empty; functions must be fully defined before use.
  void set_rigid_relation(SymbolId sym, const std::vector<std::vector<std::string>>& tuples);
  void add_rigid_tuple(SymbolId sym, std::span<const Elem> args);
  void define_rigid_relation(SymbolId sym, const std::function<bool(std::span<const Elem>)>& pred);
  void define_rigid_function(SymbolId sym, const std::function<Elem(std::span<const Elem>)>& fn);
  void set_rigid_constant(SymbolId sym, Elem value);

  bool rigid_holds(SymbolId sym, std::span<const Elem> args) const;
  Elem rigid_value(SymbolId sym, std::span<const Elem> args) const;
  bool has_rigid_table(SymbolId sym) const;
  std::vector<std::vector<Elem>> rigid_tuples(SymbolId sym) const;  // relation rows / function graph

  // Checks carrier and rigid-table invariants; throws SignatureError.
  void validate() const;

 private:
  std::size_t table_size(SymbolId sym) const;  // product of arg carrier sizes
  std::size_t tuple_index(SymbolId sym, std::span<const Elem> args) const;

  std::vector<Sort> sorts_;
  std::vector<Symbol> symbols_;
  std::unordered_map<std::string, SortId> sort_index_;
  std::unordered_map<std::string, SymbolId> symbol_index_;
  std::vector<std::unordered_map<std::string, Elem>> elem_index_;

  // Rigid tables, indexed by symbol id. Relations: byte per tuple. Functions:
  // value per tuple, -1 when undefined.
  std::vector<std::vector<std::uint8_t>> rel_tables_;
  std::vector<std::vector<Elem>> fn_tables_;

  SortId bool_sort_ = -1;
  SortId users_sort_ = -1;
  SortId perms_sort_ = -1;
};

}  // namespace polymine::logic
