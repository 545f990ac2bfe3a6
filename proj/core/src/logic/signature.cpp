#include "polymine/logic/signature.hpp"

#include <algorithm>

namespace polymine::logic {

namespace {
std::string quoted(const std::string& s) { return "'" + s + "'"; }
}  // namespace

Structure::Structure() {
  bool_sort_ = add_sort("BOOL", {"false", "true"});
  sorts_[static_cast<std::size_t>(bool_sort_)].is_numeric = true;
  sorts_[static_cast<std::size_t>(bool_sort_)].numeric = {0, 1};
  users_sort_ = add_sort("USERS", {});
  perms_sort_ = add_sort("PERMS", {});
}

SortId Structure::add_sort(std::string name, std::vector<std::string> carrier) {
  if (sort_index_.count(name)) throw SignatureError("duplicate sort " + quoted(name));
  SortId id = static_cast<SortId>(sorts_.size());
  Sort s;
  s.name = name;
  s.carrier = std::move(carrier);
  sorts_.push_back(std::move(s));
  sort_index_.emplace(std::move(name), id);
  elem_index_.emplace_back();
  auto& ix = elem_index_.back();
  const auto& c = sorts_.back().carrier;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!ix.emplace(c[i], static_cast<Elem>(i)).second)
      throw SignatureError("duplicate carrier element " + quoted(c[i]) + " in sort " +
                           quoted(sorts_.back().name));
  }
  return id;
}

SortId Structure::add_int_sort(std::string name, long long lo, long long hi) {
  if (hi < lo) throw SignatureError("empty integer carrier for sort " + quoted(name));
  std::vector<std::string> carrier;
  std::vector<long long> numeric;
  for (long long v = lo; v <= hi; ++v) {
    carrier.push_back(std::to_string(v));
    numeric.push_back(v);
  }
  SortId id = add_sort(std::move(name), std::move(carrier));
  sorts_[static_cast<std::size_t>(id)].is_numeric = true;
  sorts_[static_cast<std::size_t>(id)].numeric = std::move(numeric);
  return id;
}

void Structure::set_carrier(SortId sort, std::vector<std::string> carrier) {
  auto& s = sorts_.at(static_cast<std::size_t>(sort));
  if (!symbols_.empty()) {
    // Carriers are frozen once any symbol exists; tables depend on their sizes.
    for (const auto& sym : symbols_) {
      bool uses = sym.result_sort == sort ||
                  std::find(sym.arg_sorts.begin(), sym.arg_sorts.end(), sort) != sym.arg_sorts.end();
      if (uses) throw SignatureError("carrier of sort " + quoted(s.name) + " set after use");
    }
  }
  s.carrier = std::move(carrier);
  auto& ix = elem_index_.at(static_cast<std::size_t>(sort));
  ix.clear();
  for (std::size_t i = 0; i < s.carrier.size(); ++i) {
    if (!ix.emplace(s.carrier[i], static_cast<Elem>(i)).second)
      throw SignatureError("duplicate carrier element " + quoted(s.carrier[i]) + " in sort " +
                           quoted(s.name));
  }
}

SortId Structure::sort_id(const std::string& name) const {
  auto it = sort_index_.find(name);
  if (it == sort_index_.end()) throw SignatureError("unknown sort " + quoted(name));
  return it->second;
}

SortId Structure::find_sort(const std::string& name) const {
  auto it = sort_index_.find(name);
  return it == sort_index_.end() ? -1 : it->second;
}

Elem Structure::elem(SortId sort, const std::string& name) const {
  auto e = find_elem(sort, name);
  if (!e)
    throw SignatureError("unknown element " + quoted(name) + " of sort " +
                         quoted(this->sort(sort).name));
  return *e;
}

std::optional<Elem> Structure::find_elem(SortId sort, const std::string& name) const {
  const auto& ix = elem_index_.at(static_cast<std::size_t>(sort));
  auto it = ix.find(name);
  if (it == ix.end()) return std::nullopt;
  return it->second;
}

const std::string& Structure::elem_name(SortId sort, Elem e) const {
  return this->sort(sort).carrier.at(static_cast<std::size_t>(e));
}

long long Structure::elem_numeric(SortId sort, Elem e) const {
  const Sort& s = this->sort(sort);
  if (!s.is_numeric)
    throw SignatureError("sort " + quoted(s.name) + " has no numeric interpretation");
  return s.numeric.at(static_cast<std::size_t>(e));
}

SymbolId Structure::add_relation(std::string name, std::vector<SortId> args, bool rigid) {
  if (symbol_index_.count(name)) throw SignatureError("duplicate symbol " + quoted(name));
  Symbol sym;
  sym.name = name;
  sym.kind = SymbolKind::Relation;
  sym.rigid = rigid;
  sym.arg_sorts = std::move(args);
  sym.result_sort = bool_sort_;
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(std::move(sym));
  symbol_index_.emplace(std::move(name), id);
  rel_tables_.emplace_back();
  fn_tables_.emplace_back();
  if (rigid) rel_tables_.back().assign(table_size(id), 0);
  return id;
}

SymbolId Structure::add_function(std::string name, std::vector<SortId> args, SortId result,
                                 bool rigid) {
  if (symbol_index_.count(name)) throw SignatureError("duplicate symbol " + quoted(name));
  Symbol sym;
  sym.name = name;
  sym.kind = SymbolKind::Function;
  sym.rigid = rigid;
  sym.arg_sorts = std::move(args);
  sym.result_sort = result;
  SymbolId id = static_cast<SymbolId>(symbols_.size());
  symbols_.push_back(std::move(sym));
  symbol_index_.emplace(std::move(name), id);
  rel_tables_.emplace_back();
  fn_tables_.emplace_back();
  if (rigid) fn_tables_.back().assign(table_size(id), -1);
  return id;
}

SymbolId Structure::add_constant(std::string name, SortId sort, bool rigid) {
  return add_function(std::move(name), {}, sort, rigid);
}

SymbolId Structure::symbol_id(const std::string& name) const {
  auto it = symbol_index_.find(name);
  if (it == symbol_index_.end()) throw SignatureError("unknown symbol " + quoted(name));
  return it->second;
}

SymbolId Structure::find_symbol(const std::string& name) const {
  auto it = symbol_index_.find(name);
  return it == symbol_index_.end() ? -1 : it->second;
}

std::size_t Structure::table_size(SymbolId sym) const {
  const Symbol& s = symbol(sym);
  std::size_t n = 1;
  for (SortId a : s.arg_sorts) n *= sort(a).size();
  return n;
}

std::size_t Structure::tuple_index(SymbolId sym, std::span<const Elem> args) const {
  const Symbol& s = symbol(sym);
  if (args.size() != s.arg_sorts.size())
    throw SignatureError("arity mismatch for symbol " + quoted(s.name));
  std::size_t ix = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::size_t n = sort(s.arg_sorts[i]).size();
    auto a = static_cast<std::size_t>(args[i]);
    if (args[i] < 0 || a >= n)
      throw SignatureError("argument out of carrier range for symbol " + quoted(s.name));
    ix = ix * n + a;
  }
  return ix;
}

void Structure::set_rigid_relation(SymbolId sym,
                                   const std::vector<std::vector<std::string>>& tuples) {
  const Symbol& s = symbol(sym);
  if (!s.rigid || s.kind != SymbolKind::Relation)
    throw SignatureError(quoted(s.name) + " is not a rigid relation");
  auto& table = rel_tables_.at(static_cast<std::size_t>(sym));
  table.assign(table_size(sym), 0);
  std::vector<Elem> row(s.arg_sorts.size());
  for (const auto& t : tuples) {
    if (t.size() != s.arg_sorts.size())
      throw SignatureError("arity mismatch in tuple for " + quoted(s.name));
    for (std::size_t i = 0; i < t.size(); ++i) row[i] = elem(s.arg_sorts[i], t[i]);
    table[tuple_index(sym, row)] = 1;
  }
}

void Structure::add_rigid_tuple(SymbolId sym, std::span<const Elem> args) {
  const Symbol& s = symbol(sym);
  if (!s.rigid || s.kind != SymbolKind::Relation)
    throw SignatureError(quoted(s.name) + " is not a rigid relation");
  rel_tables_.at(static_cast<std::size_t>(sym)).at(tuple_index(sym, args)) = 1;
}

void Structure::define_rigid_relation(SymbolId sym,
                                      const std::function<bool(std::span<const Elem>)>& pred) {
  const Symbol& s = symbol(sym);
  if (!s.rigid || s.kind != SymbolKind::Relation)
    throw SignatureError(quoted(s.name) + " is not a rigid relation");
  auto& table = rel_tables_.at(static_cast<std::size_t>(sym));
  table.assign(table_size(sym), 0);
  std::vector<Elem> args(s.arg_sorts.size(), 0);
  std::size_t total = table.size();
  for (std::size_t ix = 0; ix < total; ++ix) {
    std::size_t rest = ix;
    for (std::size_t i = s.arg_sorts.size(); i-- > 0;) {
      std::size_t n = sort(s.arg_sorts[i]).size();
      args[i] = static_cast<Elem>(rest % n);
      rest /= n;
    }
    table[ix] = pred(args) ? 1 : 0;
  }
}

void Structure::define_rigid_function(SymbolId sym,
                                      const std::function<Elem(std::span<const Elem>)>& fn) {
  const Symbol& s = symbol(sym);
  if (!s.rigid || s.kind != SymbolKind::Function)
    throw SignatureError(quoted(s.name) + " is not a rigid function");
  auto& table = fn_tables_.at(static_cast<std::size_t>(sym));
  table.assign(table_size(sym), -1);
  std::vector<Elem> args(s.arg_sorts.size(), 0);
  std::size_t result_n = sort(s.result_sort).size();
  for (std::size_t ix = 0; ix < table.size(); ++ix) {
    std::size_t rest = ix;
    for (std::size_t i = s.arg_sorts.size(); i-- > 0;) {
      std::size_t n = sort(s.arg_sorts[i]).size();
      args[i] = static_cast<Elem>(rest % n);
      rest /= n;
    }
    Elem v = fn(args);
    if (v < 0 || static_cast<std::size_t>(v) >= result_n)
      throw SignatureError("rigid function " + quoted(s.name) + " produced out-of-carrier value");
    table[ix] = v;
  }
}

void Structure::set_rigid_constant(SymbolId sym, Elem value) {
  const Symbol& s = symbol(sym);
  if (!s.rigid || !s.is_constant())
    throw SignatureError(quoted(s.name) + " is not a rigid constant");
  std::size_t n = sort(s.result_sort).size();
  if (value < 0 || static_cast<std::size_t>(value) >= n)
    throw SignatureError("constant " + quoted(s.name) + " out of carrier range");
  fn_tables_.at(static_cast<std::size_t>(sym)).assign(1, value);
}

bool Structure::rigid_holds(SymbolId sym, std::span<const Elem> args) const {
  const Symbol& s = symbol(sym);
  if (!s.rigid || s.kind != SymbolKind::Relation)
    throw SignatureError(quoted(s.name) + " is not a rigid relation");
  return rel_tables_.at(static_cast<std::size_t>(sym)).at(tuple_index(sym, args)) != 0;
}

Elem Structure::rigid_value(SymbolId sym, std::span<const Elem> args) const {
  const Symbol& s = symbol(sym);
  if (!s.rigid || s.kind != SymbolKind::Function)
    throw SignatureError(quoted(s.name) + " is not a rigid function");
  Elem v = fn_tables_.at(static_cast<std::size_t>(sym)).at(tuple_index(sym, args));
  if (v < 0) throw SignatureError("rigid function " + quoted(s.name) + " undefined at tuple");
  return v;
}

bool Structure::has_rigid_table(SymbolId sym) const {
  const Symbol& s = symbol(sym);
  if (!s.rigid) return false;
  if (s.kind == SymbolKind::Relation)
    return !rel_tables_.at(static_cast<std::size_t>(sym)).empty();
  const auto& t = fn_tables_.at(static_cast<std::size_t>(sym));
  return !t.empty() && std::find(t.begin(), t.end(), -1) == t.end();
}

std::vector<std::vector<Elem>> Structure::rigid_tuples(SymbolId sym) const {
  const Symbol& s = symbol(sym);
  std::vector<std::vector<Elem>> out;
  std::size_t total = table_size(sym);
  std::vector<Elem> args(s.arg_sorts.size());
  for (std::size_t ix = 0; ix < total; ++ix) {
    std::size_t rest = ix;
    for (std::size_t i = s.arg_sorts.size(); i-- > 0;) {
      std::size_t n = sort(s.arg_sorts[i]).size();
      args[i] = static_cast<Elem>(rest % n);
      rest /= n;
    }
    if (s.kind == SymbolKind::Relation) {
      if (rel_tables_.at(static_cast<std::size_t>(sym)).at(ix)) out.push_back(args);
    } else {
      Elem v = fn_tables_.at(static_cast<std::size_t>(sym)).at(ix);
      if (v >= 0) {
        auto row = args;
        row.push_back(v);
        out.push_back(std::move(row));
      }
    }
  }
  return out;
}

void Structure::validate() const {
  const Sort& b = sort(bool_sort_);
  if (b.carrier != std::vector<std::string>{"false", "true"})
    throw SignatureError("BOOL carrier must be exactly {false,true}");
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    const Symbol& s = symbols_[i];
    for (SortId a : s.arg_sorts)
      if (sort(a).size() == 0)
        throw SignatureError("sort " + quoted(sort(a).name) + " used by " + quoted(s.name) +
                             " has empty carrier");
    if (s.kind == SymbolKind::Function && sort(s.result_sort).size() == 0)
      throw SignatureError("result sort of " + quoted(s.name) + " has empty carrier");
    if (s.rigid && s.kind == SymbolKind::Function) {
      const auto& t = fn_tables_[i];
      if (t.empty() || std::find(t.begin(), t.end(), -1) != t.end())
        throw SignatureError("rigid function " + quoted(s.name) + " is not total");
    }
  }
}

}  // namespace polymine::logic
