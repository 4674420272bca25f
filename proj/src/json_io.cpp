#include "relmeas/json_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "relmeas/error.hpp"

namespace relmeas {

namespace {

// Library errors surfacing while a file is interpreted are schema errors from
// the caller's point of view; the original witness is kept.
template <class Fn>
auto as_schema(Fn&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() == "Schema") throw;
    throw Error("Schema", e.what());
  }
}

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw Error("Schema", std::string("expected an object around ") + name);
  auto it = j.find(name);
  if (it == j.end()) throw Error("Schema", std::string("missing field ") + name);
  return *it;
}

int int_field(const Json& j, const char* name) {
  const Json& f = field(j, name);
  if (!f.is_number_integer()) throw Error("Schema", std::string(name) + " must be an integer");
  return f.get<int>();
}

std::string str_field(const Json& j, const char* name) {
  const Json& f = field(j, name);
  if (!f.is_string()) throw Error("Schema", std::string(name) + " must be a string");
  return f.get<std::string>();
}

const Json& arr_field(const Json& j, const char* name) {
  const Json& f = field(j, name);
  if (!f.is_array()) throw Error("Schema", std::string(name) + " must be an array");
  return f;
}

Tuple tuple_of(const Json& j, const char* what) {
  if (!j.is_array()) throw Error("Schema", std::string(what) + " must be an array of integers");
  Tuple t;
  for (const Json& e : j) {
    if (!e.is_number_integer()) throw Error("Schema", std::string(what) + " holds a non-integer");
    t.push_back(e.get<int>());
  }
  return t;
}

int rel_id(const Language& l, const std::string& name) {
  int id = l.id_of(name);
  if (id < 0) throw Error("Schema", "unknown relation name " + name);
  return id;
}

Rat rat_of(const Json& j, const char* what) {
  if (!j.is_string()) throw Error("Schema", std::string(what) + " must be a \"p/q\" string");
  return as_schema([&] { return rat_parse(j.get<std::string>()); });
}

// The "atoms" list of a serialized type: every slot exactly once, signed.
template <class Type>
Type type_of_atoms(const Json& j, const Language& lang,
                   const std::vector<std::pair<int, Tuple>>& slots) {
  int vars = int_field(j, "vars");
  Type q(lang, vars);
  const Json& atoms = arr_field(j, "atoms");
  std::set<std::pair<int, Tuple>> seen;
  for (const Json& a : atoms) {
    if (!a.is_array() || a.size() != 3 || !a[0].is_string() || !a[2].is_boolean())
      throw Error("Schema", "atom entries are [rel, tuple, sign]");
    int rel = rel_id(lang, a[0].get<std::string>());
    Tuple t = tuple_of(a[1], "atom tuple");
    if (!seen.insert({rel, t}).second)
      throw Error("Schema", "duplicate atom " + lang.rel(rel).name + tuple_str(t));
    as_schema([&] { q.set(rel, t, a[2].get<bool>()); return 0; });
  }
  if (seen.size() != slots.size())
    throw Error("Schema", "atom list must decide every slot exactly once");
  return q;
}

template <class Type>
Json atoms_of_type(const Type& q, const std::vector<std::pair<int, Tuple>>& slots) {
  Json j;
  j["vars"] = q.vars();
  Json atoms = Json::array();
  for (const auto& [rel, t] : slots)
    atoms.push_back(Json::array({q.lang().rel(rel).name, t, q.decide(rel, t)}));
  j["atoms"] = std::move(atoms);
  return j;
}

CanonicalPresentation base_ref_of(const Json& ref, const std::string& ref_dir) {
  if (ref.is_string()) {
    std::filesystem::path p(ref.get<std::string>());
    if (p.is_relative() && !ref_dir.empty()) p = std::filesystem::path(ref_dir) / p;
    return presentation_of_json(load_json(p.string()));
  }
  return presentation_of_json(ref);
}

std::vector<Literal> literals_of(const Json& j, const char* what) {
  if (!j.is_array()) throw Error("Schema", std::string(what) + " must be an array of literals");
  std::vector<Literal> lits;
  for (const Json& a : j) {
    if (!a.is_array() || a.size() != 3 || !a[0].is_string() || !a[2].is_boolean())
      throw Error("Schema", "literals are [rel, tuple, sign]");
    lits.push_back({a[0].get<std::string>(), tuple_of(a[1], "literal tuple"), a[2].get<bool>()});
  }
  return lits;
}

Json literals_json(const std::vector<Literal>& lits) {
  Json out = Json::array();
  for (const Literal& l : lits) out.push_back(Json::array({l.rel, l.args, l.positive}));
  return out;
}

void grid_and_cells_json(const StepFunction& f, Json& entry) {
  Json grid = Json::array();
  for (const Tuple& c : f.coords()) {
    Json cuts = Json::array();
    auto it = f.cut_lists.find(c);
    if (it != f.cut_lists.end())
      for (const Rat& r : it->second) cuts.push_back(rat_str(r));
    grid.push_back(Json{{"subset", c}, {"cuts", std::move(cuts)}});
  }
  entry["grid"] = std::move(grid);
  Json cells = Json::array();
  for (const auto& [cell, q] : f.values)
    cells.push_back(Json{{"cell", cell}, {"value_type", ordered_type_json(q)}});
  entry["cells"] = std::move(cells);
}

void load_grid_and_cells(const Json& entry, const Language& value_lang, StepFunction& f) {
  for (const Json& g : arr_field(entry, "grid")) {
    Tuple subset = tuple_of(field(g, "subset"), "grid subset");
    std::vector<Rat> cuts;
    for (const Json& c : arr_field(g, "cuts")) cuts.push_back(rat_of(c, "cut"));
    as_schema([&] { f.set_cuts(subset, std::move(cuts)); return 0; });
  }
  for (const Json& c : arr_field(entry, "cells")) {
    Tuple cell = tuple_of(field(c, "cell"), "cell");
    OrderedQfType q = ordered_type_of_json(field(c, "value_type"), value_lang);
    as_schema([&] { f.set_value(cell, std::move(q)); return 0; });
  }
}

}  // namespace

Json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("Schema", "cannot open " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error("Schema", "invalid JSON in " + path);
  return j;
}

void save_json(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("Schema", "cannot write " + path);
  out << j.dump(2) << "\n";
}

Json language_json(const Language& l) {
  Json rels = Json::array();
  for (const Relation& r : l.relations()) rels.push_back(Json{{"name", r.name}, {"arity", r.arity}});
  return Json{{"relations", std::move(rels)}};
}

Language language_of_json(const Json& j) {
  return as_schema([&] {
    std::vector<Relation> rels;
    for (const Json& r : arr_field(j, "relations"))
      rels.push_back({str_field(r, "name"), int_field(r, "arity")});
    return Language(std::move(rels));
  });
}

Json structure_json(const WindowStructure& s) {
  Json j;
  j["language"] = language_json(s.lang());
  j["window"] = s.window();
  j["mode"] = s.mode() == Mode::canonical ? "canonical" : "general";
  Json facts = Json::array();
  auto emit = [&](const Fact& f) {
    facts.push_back(Json{{"rel", s.lang().rel(f.rel).name}, {"tuple", f.args}});
  };
  if (s.mode() == Mode::general) {
    for (const Fact& f : s.facts()) emit(f);
  } else {
    for (const auto& [subset, f] : s.colors()) emit(f);
  }
  j["facts"] = std::move(facts);
  return j;
}

WindowStructure structure_of_json(const Json& j) {
  return as_schema([&] {
    Language lang = language_of_json(field(j, "language"));
    int window = int_field(j, "window");
    std::string mode = str_field(j, "mode");
    if (mode != "general" && mode != "canonical")
      throw Error("Schema", "mode must be general or canonical");
    WindowStructure s(lang, window, mode == "canonical" ? Mode::canonical : Mode::general);
    for (const Json& f : arr_field(j, "facts")) {
      int rel = rel_id(lang, str_field(f, "rel"));
      Tuple t = tuple_of(field(f, "tuple"), "fact tuple");
      if (s.mode() == Mode::general)
        s.add_fact(rel, t);
      else
        s.set_color(sorted_set(t), rel, t);
    }
    if (s.mode() == Mode::canonical) s.validate_canonical();
    return s;
  });
}

Json age_json(const Age& a) {
  Json j;
  j["language"] = language_json(a.lang());
  j["size_bound"] = a.size_bound();
  std::vector<WindowStructure> members = a.members();
  std::sort(members.begin(), members.end());
  Json ms = Json::array();
  for (const WindowStructure& m : members) ms.push_back(structure_json(m));
  j["members"] = std::move(ms);
  return j;
}

Age age_of_json(const Json& j) {
  return as_schema([&] {
    Language lang = language_of_json(field(j, "language"));
    int bound = int_field(j, "size_bound");
    std::vector<WindowStructure> members;
    for (const Json& m : arr_field(j, "members")) {
      WindowStructure s = structure_of_json(m);
      if (!(s.lang() == lang)) throw Error("Schema", "member language differs from age language");
      members.push_back(std::move(s));
    }
    Age a = age_of(members, bound);
    if (a.members().size() != members.size())
      throw Error("Schema", "members are not closed under induced substructures");
    return a;
  });
}

Json ordered_type_json(const OrderedQfType& q) {
  return atoms_of_type(q, ordered_slots(q.lang(), q.vars()));
}

OrderedQfType ordered_type_of_json(const Json& j, const Language& lang) {
  return as_schema([&] {
    return type_of_atoms<OrderedQfType>(j, lang, ordered_slots(lang, int_field(j, "vars")));
  });
}

Json nr_type_json(const NonRedundantQfType& q) {
  return atoms_of_type(q, nonredundant_slots(q.lang(), q.vars()));
}

NonRedundantQfType nr_type_of_json(const Json& j, const Language& lang) {
  return as_schema([&] {
    return type_of_atoms<NonRedundantQfType>(j, lang, nonredundant_slots(lang, int_field(j, "vars")));
  });
}

Json presentation_json(const CanonicalPresentation& p) {
  if (p.size() == 0) throw Error("Schema", "empty presentation");
  std::vector<WindowStructure> members;
  for (int i = 0; i < p.size(); ++i)
    if (p.rel(i).base.window() > 0) members.push_back(p.rel(i).base);
  if (members.empty()) throw Error("Schema", "presentation has no age members to store");
  Age age = age_of(members, p.max_arity());

  Json j;
  j["language"] = language_json(p.lang());
  j["age"] = age_json(age);
  Json table = Json::array();
  for (const auto& [rel, ix, sub] : p.restriction_table())
    table.push_back(Json{{"rel", p.lang().rel(rel).name},
                         {"index_set", ix},
                         {"restricted_rel", p.lang().rel(sub).name}});
  j["restriction_table"] = std::move(table);

  CanonicalPresentation back = presentation_of_json(j);
  bool same = back.describe() == p.describe();
  for (int i = 0; same && i < p.size(); ++i)
    same = back.rel(i).rep.key() == p.rel(i).rep.key() &&
           back.rel(i).base.key() == p.rel(i).base.key();
  if (!same) throw Error("Schema", "presentation does not rebuild from its age");
  return j;
}

CanonicalPresentation presentation_of_json(const Json& j) {
  return as_schema([&] {
    Language lang = language_of_json(field(j, "language"));
    Age age = age_of_json(field(j, "age"));
    int bound = lang.max_arity();
    if (age.size_bound() < bound)
      throw Error("Schema", "age size bound below the class language arity");
    CanonicalPresentation p = canonicalize(age, bound);
    if (p.size() != lang.size()) p = free_completion(p, bound);
    if (p.size() != lang.size())
      throw Error("Schema", "stored language lists " + std::to_string(lang.size()) +
                                " classes, the age rebuilds to " + std::to_string(p.size()));
    for (int i = 0; i < p.size(); ++i)
      if (p.lang().rel(i).arity != lang.rel(i).arity)
        throw Error("Schema", "class arity mismatch at " + lang.rel(i).name);
    for (int i = 0; i < p.size(); ++i) p.rename_relation(i, lang.rel(i).name);

    std::set<std::string> want;
    for (const Json& e : arr_field(j, "restriction_table"))
      want.insert(str_field(e, "rel") + " " + tuple_str(tuple_of(field(e, "index_set"), "index_set")) +
                  " -> " + str_field(e, "restricted_rel"));
    std::set<std::string> got;
    for (const auto& [rel, ix, sub] : p.restriction_table())
      got.insert(p.lang().rel(rel).name + " " + tuple_str(ix) + " -> " + p.lang().rel(sub).name);
    if (want != got) {
      std::string witness;
      for (const std::string& w : want)
        if (!got.count(w)) { witness = w; break; }
      if (witness.empty())
        for (const std::string& g : got)
          if (!want.count(g)) { witness = g; break; }
      throw Error("Schema", "restriction table disagrees with the rebuilt presentation at " + witness);
    }
    return p;
  });
}

namespace {

// Measures and kernels share the table layout; the kernel side also carries
// per-type defaulted marks.
template <class Table>
Json tables_json(const Table& t, const std::function<std::vector<Atom>(int)>& atoms_of,
                 const std::function<bool(const WindowStructure&)>& is_defaulted) {
  Json tables = Json::array();
  for (int m = 1; m <= t.horizon(); ++m) {
    std::string cur;
    Json entry;
    for (const Atom& a : atoms_of(m)) {
      if (a.type.key() != cur) {
        if (!cur.empty()) tables.push_back(std::move(entry));
        cur = a.type.key();
        entry = Json{{"size", m}, {"base_diagram", structure_json(a.type)}};
        if (is_defaulted(a.type)) entry["defaulted"] = true;
        entry["rows"] = Json::array();
      }
      entry["rows"].push_back(
          Json{{"diagram", nr_type_json(a.extra)}, {"prob", rat_str(t.value(a.type, a.extra))}});
    }
    if (!cur.empty()) tables.push_back(std::move(entry));
  }
  return tables;
}

struct ParsedTables {
  CanonicalPresentation base;
  Language extra;
  int horizon = 0;
};

ParsedTables tables_header(const Json& j, const char* kind, const std::string& ref_dir) {
  if (str_field(j, "kind") != kind)
    throw Error("Schema", std::string("expected kind ") + kind + ", got " + str_field(j, "kind"));
  ParsedTables h;
  h.base = base_ref_of(field(j, "base_ref"), ref_dir);
  h.extra = language_of_json(field(j, "extra_language"));
  h.horizon = int_field(j, "horizon");
  return h;
}

template <class Table>
void load_tables(const Json& j, Table& t, const std::function<void(const WindowStructure&)>& on_default) {
  for (const Json& entry : arr_field(j, "tables")) {
    int m = int_field(entry, "size");
    if (m < 1 || m > t.horizon()) throw Error("Schema", "table size outside the horizon");
    WindowStructure type = structure_of_json(field(entry, "base_diagram"));
    if (!(type.lang() == t.base().lang()))
      throw Error("Schema", "base diagram language differs from base_ref");
    if (type.window() != m) throw Error("Schema", "base diagram window differs from size");
    for (const Json& row : arr_field(entry, "rows")) {
      NonRedundantQfType d = nr_type_of_json(field(row, "diagram"), t.extra());
      if (d.vars() != m) throw Error("Schema", "diagram vars differ from size");
      t.set_value(type, d, rat_of(field(row, "prob"), "prob"));
    }
    if (entry.contains("defaulted") && entry.at("defaulted").is_boolean() &&
        entry.at("defaulted").get<bool>())
      on_default(type);
  }
}

}  // namespace

Json measure_json(const WindowMeasure& m) {
  Json j;
  j["kind"] = "measure";
  j["base_ref"] = presentation_json(m.base());
  j["extra_language"] = language_json(m.extra());
  j["horizon"] = m.horizon();
  j["tables"] = tables_json(m, [&](int s) { return m.atoms(s); },
                            [](const WindowStructure&) { return false; });
  return j;
}

WindowMeasure measure_of_json(const Json& j, const std::string& ref_dir) {
  return as_schema([&] {
    ParsedTables h = tables_header(j, "measure", ref_dir);
    WindowMeasure m(h.base, h.extra, h.horizon);
    load_tables(j, m, [](const WindowStructure&) {});
    return m;
  });
}

Json kernel_json(const ColoringKernel& k) {
  Json j;
  j["kind"] = "kernel";
  j["base_ref"] = presentation_json(k.base());
  j["extra_language"] = language_json(k.extra());
  j["horizon"] = k.horizon();
  auto atoms_of = [&](int m) {
    std::vector<std::pair<std::string, WindowStructure>> types;
    for (const WindowStructure& t : k.base().labeled_types_of_size(m)) types.push_back({t.key(), t});
    std::sort(types.begin(), types.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Atom> atoms;
    for (const auto& [key, t] : types)
      for (const NonRedundantQfType& d : enumerate_nonredundant_types(k.extra(), m))
        atoms.push_back({t, d});
    return atoms;
  };
  j["tables"] = tables_json(k, atoms_of, [&](const WindowStructure& t) {
    return k.defaulted().count(t.key()) > 0;
  });
  return j;
}

ColoringKernel kernel_of_json(const Json& j, const std::string& ref_dir) {
  return as_schema([&] {
    ParsedTables h = tables_header(j, "kernel", ref_dir);
    ColoringKernel k(h.base, h.extra, h.horizon);
    load_tables(j, k, [&](const WindowStructure& t) { k.mark_defaulted(t); });
    return k;
  });
}

Json table_recipe_json(const TableRecipe& r) {
  Json j;
  j["kind"] = "sym";
  j["target_language"] = language_json(r.lang());
  Json fns = Json::array();
  for (int n = 1; n <= r.horizon(); ++n) {
    Json entry;
    entry["index"] = n;
    grid_and_cells_json(r.fn(n), entry);
    fns.push_back(std::move(entry));
  }
  j["functions"] = std::move(fns);
  return j;
}

TableRecipe table_recipe_of_json(const Json& j) {
  return as_schema([&] {
    if (str_field(j, "kind") != "sym") throw Error("Schema", "expected kind sym");
    Language lang = language_of_json(field(j, "target_language"));
    const Json& fns = arr_field(j, "functions");
    int horizon = 0;
    std::set<int> seen;
    for (const Json& f : fns) {
      const Json& ix = field(f, "index");
      if (!ix.is_number_integer()) throw Error("Schema", "sym recipe indices are arities");
      int n = ix.get<int>();
      if (n < 1) throw Error("Schema", "function index below 1");
      if (!seen.insert(n).second) throw Error("Schema", "duplicate function index");
      horizon = std::max(horizon, n);
    }
    if (horizon == 0) throw Error("Schema", "recipe lists no functions");
    TableRecipe r(lang, horizon);
    for (const Json& f : fns) load_grid_and_cells(f, lang, r.fn(field(f, "index").get<int>()));
    return r;
  });
}

Json aut_recipe_json(const AutRecipe& f) {
  Json j;
  j["kind"] = "aut";
  j["base_ref"] = presentation_json(f.base());
  j["target_language"] = language_json(f.extra());
  Json fns = Json::array();
  for (int m = 1; m <= f.horizon(); ++m) {
    std::vector<WindowStructure> types = f.types_of_size(m);
    std::sort(types.begin(), types.end());
    for (const WindowStructure& t : types) {
      Json entry;
      entry["index"] = structure_json(t);
      grid_and_cells_json(f.at(t), entry);
      fns.push_back(std::move(entry));
    }
  }
  j["functions"] = std::move(fns);
  return j;
}

AutRecipe aut_recipe_of_json(const Json& j, const std::string& ref_dir) {
  return as_schema([&] {
    if (str_field(j, "kind") != "aut") throw Error("Schema", "expected kind aut");
    CanonicalPresentation base = base_ref_of(field(j, "base_ref"), ref_dir);
    Language extra = language_of_json(field(j, "target_language"));
    const Json& fns = arr_field(j, "functions");
    int horizon = 0;
    for (const Json& f : fns) {
      const Json& ix = field(f, "index");
      if (!ix.is_object()) throw Error("Schema", "aut recipe indices are labeled types");
      horizon = std::max(horizon, int_field(ix, "window"));
    }
    if (horizon == 0) throw Error("Schema", "recipe lists no functions");
    AutRecipe r(base, extra, horizon);
    for (const Json& f : fns) {
      WindowStructure type = structure_of_json(field(f, "index"));
      if (!(type.lang() == base.lang()))
        throw Error("Schema", "function index language differs from base_ref");
      load_grid_and_cells(f, extra, r.at(type));
    }
    return r;
  });
}

Json events_json(const CanonicalPresentation& base, const Language& extra, int horizon,
                 const std::vector<EventValue>& events) {
  Json j;
  j["kind"] = "events";
  j["base_ref"] = presentation_json(base);
  j["extra_language"] = language_json(extra);
  j["horizon"] = horizon;
  Json evs = Json::array();
  for (const EventValue& e : events)
    evs.push_back(Json{{"type", structure_json(e.type)},
                       {"event", literals_json(e.event)},
                       {"prob", rat_str(e.value)}});
  j["events"] = std::move(evs);
  return j;
}

EventsFile events_of_json(const Json& j, const std::string& ref_dir) {
  return as_schema([&] {
    EventsFile out;
    ParsedTables h = tables_header(j, "events", ref_dir);
    out.base = std::move(h.base);
    out.extra = std::move(h.extra);
    out.horizon = h.horizon;
    for (const Json& e : arr_field(j, "events")) {
      EventValue v;
      v.type = structure_of_json(field(e, "type"));
      v.event = literals_of(field(e, "event"), "event");
      v.value = rat_of(field(e, "prob"), "prob");
      out.events.push_back(std::move(v));
    }
    return out;
  });
}

QfFormula parse_formula(const std::string& text) {
  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  auto split = [](const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
      if (c == sep) {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(cur);
    return parts;
  };

  QfFormula f;
  bool any = false;
  for (const std::string& dis : split(text, '|')) {
    std::vector<Literal> lits;
    for (const std::string& raw : split(dis, '&')) {
      std::string lit = trim(raw);
      if (lit.empty()) throw Error("Schema", "empty literal in formula");
      bool positive = true;
      if (lit[0] == '!') {
        positive = false;
        lit = trim(lit.substr(1));
      }
      size_t open = lit.find('(');
      if (open == std::string::npos || lit.empty() || lit.back() != ')')
        throw Error("Schema", "literal must look like R(0,1): " + lit);
      std::string name = trim(lit.substr(0, open));
      if (name.empty()) throw Error("Schema", "literal with no relation name");
      Tuple args;
      for (const std::string& a : split(lit.substr(open + 1, lit.size() - open - 2), ',')) {
        std::string at = trim(a);
        try {
          size_t used = 0;
          args.push_back(std::stoi(at, &used));
          if (used != at.size()) throw std::invalid_argument(at);
        } catch (const std::exception&) {
          throw Error("Schema", "bad argument " + at + " in " + lit);
        }
      }
      lits.push_back({name, args, positive});
    }
    f.add_disjunct(std::move(lits));
    any = true;
  }
  if (!any) throw Error("Schema", "empty formula");
  return f;
}

}  // namespace relmeas
