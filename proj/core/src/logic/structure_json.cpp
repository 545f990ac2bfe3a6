#include "polymine/logic/structure_json.hpp"

#include <fstream>

#include <json.hpp>

namespace polymine::logic {

using nlohmann::json;

Structure structure_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad structure document: ") + e.what());
  }
  Structure s;
  for (const auto& js : doc.value("sorts", json::array())) {
    std::string name = js.at("name").get<std::string>();
    if (js.contains("int_range")) {
      auto r = js.at("int_range");
      s.add_int_sort(name, r.at(0).get<long long>(), r.at(1).get<long long>());
    } else {
      std::vector<std::string> carrier = js.value("carrier", std::vector<std::string>{});
      SortId existing = s.find_sort(name);
      if (existing >= 0)
        s.set_carrier(existing, std::move(carrier));
      else
        s.add_sort(name, std::move(carrier));
    }
  }
  for (const auto& jy : doc.value("symbols", json::array())) {
    std::string name = jy.at("name").get<std::string>();
    std::string kind = jy.at("kind").get<std::string>();
    bool rigid = jy.value("rigid", false);
    std::vector<SortId> args;
    for (const auto& a : jy.value("args", std::vector<std::string>{})) args.push_back(s.sort_id(a));
    if (kind == "relation") {
      s.add_relation(name, std::move(args), rigid);
    } else if (kind == "function") {
      s.add_function(name, std::move(args), s.sort_id(jy.at("result").get<std::string>()), rigid);
    } else if (kind == "constant") {
      s.add_constant(name, s.sort_id(jy.at("result").get<std::string>()), rigid);
    } else {
      throw ParseError("unknown symbol kind '" + kind + "'");
    }
  }
  json rigid_doc = doc.value("rigid", json::object());
  for (const auto& [name, rows] : rigid_doc.items()) {
    SymbolId sym = s.symbol_id(name);
    const Symbol& decl = s.symbol(sym);
    if (decl.kind == SymbolKind::Relation) {
      std::vector<std::vector<std::string>> tuples;
      for (const auto& row : rows) tuples.push_back(row.get<std::vector<std::string>>());
      s.set_rigid_relation(sym, tuples);
    } else if (decl.is_constant()) {
      s.set_rigid_constant(sym, s.elem(decl.result_sort, rows.get<std::string>()));
    } else {
      throw ParseError("'" + name + "' is a function; list its graph under \"graphs\"");
    }
  }
  // Function graphs: {"graphs": {"Loc": [["alice","p1"], ...]}}
  json graphs_doc = doc.value("graphs", json::object());
  for (const auto& [name, rows] : graphs_doc.items()) {
    SymbolId sym = s.symbol_id(name);
    const Symbol& decl = s.symbol(sym);
    if (decl.kind != SymbolKind::Function) throw ParseError("'" + name + "' is not a function");
    std::vector<std::vector<Elem>> graph;
    for (const auto& row : rows) {
      auto cells = row.get<std::vector<std::string>>();
      if (cells.size() != decl.arg_sorts.size() + 1)
        throw ParseError("bad function row arity for '" + name + "'");
      std::vector<Elem> entry(cells.size());
      for (std::size_t i = 0; i + 1 < cells.size(); ++i)
        entry[i] = s.elem(decl.arg_sorts[i], cells[i]);
      entry.back() = s.elem(decl.result_sort, cells.back());
      graph.push_back(std::move(entry));
    }
    s.define_rigid_function(sym, [&](std::span<const Elem> args) -> Elem {
      for (const auto& row : graph) {
        bool match = true;
        for (std::size_t i = 0; i < args.size(); ++i)
          if (row[i] != args[i]) { match = false; break; }
        if (match) return row.back();
      }
      throw SignatureError("rigid function '" + name + "' undefined at some tuple");
    });
  }
  s.validate();
  return s;
}

Structure structure_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return structure_from_json(text);
}

std::string structure_to_json(const Structure& s) {
  json doc;
  doc["sorts"] = json::array();
  for (std::size_t i = 0; i < s.sort_count(); ++i) {
    const Sort& so = s.sort(static_cast<SortId>(i));
    json js{{"name", so.name}, {"carrier", so.carrier}};
    doc["sorts"].push_back(std::move(js));
  }
  doc["symbols"] = json::array();
  json rigid = json::object();
  json graphs = json::object();
  for (std::size_t i = 0; i < s.symbol_count(); ++i) {
    SymbolId id = static_cast<SymbolId>(i);
    const Symbol& sym = s.symbol(id);
    json jy{{"name", sym.name},
            {"kind", sym.kind == SymbolKind::Relation ? "relation" : "function"},
            {"rigid", sym.rigid}};
    json args = json::array();
    for (SortId a : sym.arg_sorts) args.push_back(s.sort(a).name);
    jy["args"] = std::move(args);
    if (sym.kind == SymbolKind::Function) jy["result"] = s.sort(sym.result_sort).name;
    doc["symbols"].push_back(std::move(jy));
    if (sym.rigid && s.has_rigid_table(id)) {
      json rows = json::array();
      for (const auto& row : s.rigid_tuples(id)) {
        json cells = json::array();
        for (std::size_t k = 0; k < row.size(); ++k) {
          SortId sort = k < sym.arg_sorts.size() ? sym.arg_sorts[k] : sym.result_sort;
          cells.push_back(s.elem_name(sort, row[k]));
        }
        rows.push_back(std::move(cells));
      }
      if (sym.kind == SymbolKind::Relation)
        rigid[sym.name] = std::move(rows);
      else if (sym.is_constant())
        rigid[sym.name] = s.elem_name(sym.result_sort, s.rigid_value(id, {}));
      else
        graphs[sym.name] = std::move(rows);
    }
  }
  doc["rigid"] = std::move(rigid);
  doc["graphs"] = std::move(graphs);
  return doc.dump(2);
}

}  // namespace polymine::logic
