#include "relmeas/recipe.hpp"

#include <algorithm>

#include "relmeas/util.hpp"

namespace relmeas {

namespace {

// Enumerates every cell of the product grid over the given cut lists,
// invoking fn with the per-coordinate midpoints and the exact cell volume.
void for_each_cell(const std::map<Tuple, std::set<Rat>>& cut_map, long long cell_cap,
                   const std::function<void(const std::map<Tuple, Rat>&, const Rat&)>& fn) {
  std::vector<Tuple> coords;
  std::vector<std::vector<Rat>> bounds;
  long long total = 1;
  for (const auto& [sub, cs] : cut_map) {
    coords.push_back(sub);
    std::vector<Rat> b{Rat(0)};
    b.insert(b.end(), cs.begin(), cs.end());
    b.push_back(Rat(1));
    total *= static_cast<long long>(b.size()) - 1;
    if (total > cell_cap)
      throw Error("TooManyCells", "refined grid exceeds " + std::to_string(cell_cap) + " cells");
    bounds.push_back(std::move(b));
  }
  std::vector<size_t> idx(coords.size(), 0);
  while (true) {
    std::map<Tuple, Rat> mid;
    Rat vol = 1;
    for (size_t i = 0; i < coords.size(); ++i) {
      const Rat& lo = bounds[i][idx[i]];
      const Rat& hi = bounds[i][idx[i] + 1];
      mid[coords[i]] = Rat((lo + hi) / 2);
      vol = Rat(vol * (hi - lo));
    }
    fn(mid, vol);
    size_t d = 0;
    for (; d < idx.size(); ++d) {
      if (idx[d] + 2 < bounds[d].size()) {
        ++idx[d];
        break;
      }
      idx[d] = 0;
    }
    if (d == idx.size()) break;
  }
}

}  // namespace

StepFunction::StepFunction(Language l, int v) : lang(std::move(l)), vars(v) {
  if (v < 1) throw Error("BadWindow", "a step function needs at least one variable");
}

std::vector<Tuple> StepFunction::coords() const {
  std::vector<Tuple> cs{Tuple{}};
  for (const auto& s : subsets_up_to(vars, vars)) cs.push_back(s);
  return cs;
}

void StepFunction::set_cuts(const Tuple& subset, std::vector<Rat> cut_points) {
  if (subset != sorted_set(subset) ||
      (!subset.empty() && (subset.front() < 0 || subset.back() >= vars)))
    throw Error("BadSubset", tuple_str(subset) + " is not a coordinate index subset");
  for (size_t i = 0; i < cut_points.size(); ++i) {
    if (cut_points[i] <= 0 || cut_points[i] >= 1)
      throw Error("BadCut", rat_str(cut_points[i]) + " outside (0,1)");
    if (i > 0 && !(cut_points[i - 1] < cut_points[i]))
      throw Error("BadCut", "cut points must strictly increase");
  }
  cut_lists[subset] = std::move(cut_points);
}

void StepFunction::set_value(const std::vector<int>& cell, OrderedQfType value) {
  auto cs = coords();
  if (cell.size() != cs.size())
    throw Error("BadCell", "expected one index per coordinate, got " + std::to_string(cell.size()));
  for (size_t i = 0; i < cs.size(); ++i) {
    auto it = cut_lists.find(cs[i]);
    int cells = 1 + (it == cut_lists.end() ? 0 : static_cast<int>(it->second.size()));
    if (cell[i] < 0 || cell[i] >= cells)
      throw Error("BadCell", "index " + std::to_string(cell[i]) + " at " + tuple_str(cs[i]));
  }
  if (!(value.lang() == lang) || value.vars() != vars)
    throw Error("BadValue", "type does not match the function's language and variables");
  values[cell] = std::move(value);
}

std::vector<int> StepFunction::cell_at(const CoordFn& coord) const {
  std::vector<int> cell;
  for (const auto& s : coords()) {
    Rat y = coord(s);
    if (y < 0 || y > 1) throw Error("OutOfDomain", rat_str(y));
    int idx = 0;
    auto it = cut_lists.find(s);
    if (it != cut_lists.end())
      for (const Rat& c : it->second)
        if (c <= y) ++idx;
    cell.push_back(idx);
  }
  return cell;
}

OrderedQfType StepFunction::eval(const CoordFn& coord) const {
  auto hit = values.find(cell_at(coord));
  if (hit != values.end()) return hit->second;
  return OrderedQfType(lang, vars);
}

Recipe::Recipe(Language lang, int horizon) : lang_(std::move(lang)), horizon_(horizon) {
  if (horizon < 1) throw Error("BadHorizon", "horizon must be at least 1");
}

TableRecipe::TableRecipe(Language lang, int horizon) : Recipe(std::move(lang), horizon) {
  fns_.reserve(horizon_ + 1);
  fns_.emplace_back();
  for (int n = 1; n <= horizon_; ++n) fns_.emplace_back(lang_, n);
}

const StepFunction& TableRecipe::fn(int n) const {
  if (n < 1 || n > horizon_) throw Error("OutOfHorizon", "f_" + std::to_string(n));
  return fns_[n];
}

StepFunction& TableRecipe::fn(int n) {
  if (n < 1 || n > horizon_) throw Error("OutOfHorizon", "f_" + std::to_string(n));
  return fns_[n];
}

void TableRecipe::set_cuts(int n, const Tuple& subset, std::vector<Rat> cut_points) {
  fn(n).set_cuts(subset, std::move(cut_points));
}

void TableRecipe::set_value(int n, const std::vector<int>& cell, OrderedQfType value) {
  fn(n).set_value(cell, std::move(value));
}

std::vector<Tuple> TableRecipe::coords_of(int n) const { return fn(n).coords(); }

OrderedQfType TableRecipe::eval(int n, const CoordFn& coord) const { return fn(n).eval(coord); }

std::vector<Rat> TableRecipe::cuts(int subset_size) const {
  std::set<Rat> cs;
  for (int n = 1; n <= horizon_; ++n)
    for (const auto& [sub, list] : fns_[n].cut_lists)
      if (static_cast<int>(sub.size()) == subset_size) cs.insert(list.begin(), list.end());
  return {cs.begin(), cs.end()};
}

namespace {

// Serializes the colors on the proper nonempty subsets of sub, with points
// renamed to their ranks within sub. Agrees across a full coloring and the
// standalone boundary structure of the same type.
std::string boundary_signature(const WindowStructure& c, const Tuple& sub) {
  int s = static_cast<int>(sub.size());
  std::map<int, int> rank;
  for (int i = 0; i < s; ++i) rank[sub[i]] = i;
  std::string key;
  for (int k = 1; k < s; ++k) {
    for (const auto& ix : subsets_of_size(s, k)) {
      const Fact& f = c.color(sorted_set(select(sub, ix)));
      key += std::to_string(f.rel);
      key += '(';
      for (int p : f.args) {
        key += std::to_string(rank.at(p));
        key += ',';
      }
      key += ')';
    }
  }
  return key;
}

}  // namespace

UniformExtensionRecipe::UniformExtensionRecipe(CanonicalPresentation pres, int horizon)
    : Recipe(pres.lang(), horizon), pres_(std::move(pres)) {
  if (horizon_ > pres_.max_arity())
    throw Error("BadHorizon", "horizon exceeds the presentation's arity bound");
  FreenessReport fr = pres_.freeness();
  if (!fr.free)
    throw Error("NotFree", "boundary " + fr.witness + " at arity " + std::to_string(fr.arity) +
                               " has no extension");
  counts_.assign(pres_.max_arity() + 1, {});
  ext_table_.assign(pres_.max_arity() + 1, {});
  int unary = static_cast<int>(pres_.rels_of_arity(1).size());
  if (unary == 0) throw Error("NotFree", "the presentation has no unary relation");
  counts_[1].insert(unary);
  for (int s = 2; s <= pres_.max_arity(); ++s) {
    for (const auto& cc : pres_.enumerate_compatible(s)) {
      std::vector<int> exts = pres_.extensions_of(cc.boundary);
      counts_[s].insert(static_cast<int>(exts.size()));
      ext_table_[s][boundary_signature(cc.boundary, identity_perm(s))] = std::move(exts);
    }
  }
}

WindowStructure UniformExtensionRecipe::eval_coloring(int n, const CoordFn& coord) const {
  if (n < 1) throw Error("BadWindow", "a coloring needs at least one point");
  WindowStructure c(pres_.lang(), n, Mode::canonical);
  int top = std::min(n, pres_.max_arity());
  for (int s = 1; s <= top; ++s) {
    for (const auto& sub : subsets_of_size(n, s)) {
      std::vector<int> xs;
      if (s == 1) {
        xs = pres_.rels_of_arity(1);
      } else {
        auto it = ext_table_[s].find(boundary_signature(c, sub));
        xs = it != ext_table_[s].end() ? it->second
                                       : pres_.extensions_of(pres_.boundary_at(c, sub));
      }
      if (xs.empty()) throw Error("NotFree", "no extension at " + tuple_str(sub));
      int rel = gamma_eval(IntervalCode<int>::finite_list(xs), coord(sub));
      bool placed = false;
      for (const auto& p : permutations_of(s)) {
        Fact f{rel, select(sub, p)};
        if (pres_.fact_fits(c, f)) {
          c.set_color(sub, f.rel, f.args);
          placed = true;
          break;
        }
      }
      if (!placed)
        throw Error("Internal", pres_.lang().rel(rel).name + " lost its incidence at " +
                                    tuple_str(sub));
    }
  }
  return c;
}

OrderedQfType UniformExtensionRecipe::eval(int n, const CoordFn& coord) const {
  if (n < 1 || n > horizon_) throw Error("OutOfHorizon", "f_" + std::to_string(n));
  WindowStructure c = eval_coloring(n, coord);
  OrderedQfType q(lang_, n);
  for (const auto& [rel, inc] : ordered_slots(lang_, n))
    q.set(rel, inc, pres_.relation_at(c, inc) == rel);
  return q;
}

std::vector<Rat> UniformExtensionRecipe::cuts(int subset_size) const {
  std::set<Rat> cs;
  if (subset_size >= 1 && subset_size < static_cast<int>(counts_.size()))
    for (int len : counts_[subset_size])
      for (int i = 1; i < len; ++i) cs.insert(Rat(i, len));
  return {cs.begin(), cs.end()};
}

UniformExtensionRecipe extend_to_free(const CanonicalPresentation& pres, int max_arity) {
  return UniformExtensionRecipe(free_completion(pres, max_arity), max_arity);
}

AutRecipe::AutRecipe(CanonicalPresentation base, Language extra, int horizon)
    : base_(std::move(base)), extra_(std::move(extra)), horizon_(horizon) {
  if (horizon_ < 1 || horizon_ > base_.max_arity())
    throw Error("BadHorizon", "horizon must be between 1 and the base max arity");
  if (!disjoint_names(base_.lang(), extra_))
    throw Error("DuplicateRelation", "extra language reuses a base relation name");
  for (int m = 1; m <= horizon_; ++m)
    for (const auto& t : base_.labeled_types_of_size(m))
      fns_[t.key()] = {t, StepFunction(extra_, m)};
}

StepFunction& AutRecipe::at(const WindowStructure& type) {
  WindowStructure n = type;
  base_.normalize(n);
  auto it = fns_.find(n.key());
  if (it == fns_.end()) throw Error("UnknownType", "no step function for the given type");
  return it->second.second;
}

const StepFunction& AutRecipe::at(const WindowStructure& type) const {
  WindowStructure n = type;
  base_.normalize(n);
  auto it = fns_.find(n.key());
  if (it == fns_.end()) throw Error("UnknownType", "no step function for the given type");
  return it->second.second;
}

std::vector<WindowStructure> AutRecipe::types_of_size(int m) const {
  return base_.labeled_types_of_size(m);
}

OrderedQfType AutRecipe::eval(const WindowStructure& type, const CoordFn& coord) const {
  return at(type).eval(coord);
}

AutRecipe extend_to_free(const AutRecipe& f, const CanonicalPresentation& completion) {
  auto e = sub_presentation_embedding(f.base(), completion);
  if (!e) throw Error("NotACompletion", "the recipe's base does not embed into the completion");
  FreenessReport fr = completion.freeness();
  if (!fr.free)
    throw Error("NotACompletion", "the completion is not free: boundary " + fr.witness +
                                      " has no extension");
  std::map<int, int> inv;
  for (const auto& [a, b] : *e) inv[b] = a;
  AutRecipe out(completion, f.extra(), f.horizon());
  for (int m = 1; m <= f.horizon(); ++m) {
    for (const auto& q : out.types_of_size(m)) {
      bool in_image = true;
      for (const auto& [sub, fact] : q.colors())
        if (!inv.count(fact.rel)) {
          in_image = false;
          break;
        }
      if (!in_image) continue;
      out.at(q) = f.at(translate_coloring(f.base(), q, inv));
    }
  }
  return out;
}

Rat UniformArray::zeta(const Tuple& set) const {
  Tuple s = sorted_set(set);
  uint64_t h = mix64(seed_ ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ (static_cast<uint64_t>(s.size()) + 1));
  for (int v : s) h = mix64(h ^ (static_cast<uint64_t>(v) + 0x10001));
  return Rat(BigInt(h), BigInt(1) << 64);
}

Rat Region::volume() const {
  Rat v = 1;
  for (const auto& [sub, cell] : cells) v = Rat(v * (cell.second - cell.first));
  return v;
}

Rat Region::transform(const Tuple& set, const Rat& y) const {
  auto it = cells.find(set);
  if (it == cells.end()) return y;
  return Rat(it->second.first + (it->second.second - it->second.first) * y);
}

Region region_of_type(const UniformExtensionRecipe& r, const WindowStructure& type) {
  const CanonicalPresentation& pres = r.presentation();
  if (type.mode() != Mode::canonical) throw Error("WrongMode", "regions index canonical colorings");
  Region reg;
  reg.window = type.window();
  int top = std::min(type.window(), pres.max_arity());
  for (int s = 1; s <= top; ++s) {
    for (const auto& sub : subsets_of_size(type.window(), s)) {
      std::vector<int> xs = s == 1 ? pres.rels_of_arity(1)
                                   : pres.extensions_of(pres.boundary_at(type, sub));
      auto it = std::find(xs.begin(), xs.end(), type.color_rel(sub));
      if (it == xs.end())
        throw Error("BadType", "color at " + tuple_str(sub) + " does not extend its boundary");
      int pos = static_cast<int>(it - xs.begin());
      int len = static_cast<int>(xs.size());
      reg.cells[sub] = {Rat(pos, len), Rat(pos + 1, len)};
    }
  }
  return reg;
}

namespace {

Rat pinned_coord(const UniformArray& ua, const Region* pin, const Tuple& set) {
  Rat y = ua.zeta(set);
  if (!pin) return y;
  for (int v : set)
    if (v < 0 || v >= pin->window) return y;
  return pin->transform(set, y);
}

}  // namespace

WindowStructure sample_structure(const Recipe& r, int window, uint64_t seed, const Region* pin) {
  if (window < 1) throw Error("BadWindow", "window must be positive");
  int top = std::min(window, r.lang().max_arity());
  if (top > r.horizon()) throw Error("OutOfHorizon", "window needs f_" + std::to_string(top));
  UniformArray ua(seed);
  WindowStructure out(r.lang(), window, Mode::general);
  for (int n = 1; n <= top; ++n) {
    const auto& rels = r.lang().rels_of_arity(n);
    if (rels.empty()) continue;
    for (const auto& a : injective_tuples(window, n)) {
      CoordFn fn = [&](const Tuple& ix) { return pinned_coord(ua, pin, sorted_set(select(a, ix))); };
      OrderedQfType q = r.eval(n, fn);
      for (int rel : rels)
        if (q.top(rel)) out.add_fact(rel, a);
    }
  }
  return out;
}

WindowStructure sample_coloring(const UniformExtensionRecipe& r, int window, uint64_t seed,
                                const Region* pin) {
  if (window < 1) throw Error("BadWindow", "window must be positive");
  UniformArray ua(seed);
  CoordFn fn = [&](const Tuple& sub) { return pinned_coord(ua, pin, sub); };
  return r.eval_coloring(window, fn);
}

WindowStructure sample_expansion(const AutRecipe& f, const WindowStructure& base_realization,
                                 uint64_t seed) {
  const CanonicalPresentation& pres = f.base();
  if (base_realization.mode() != Mode::canonical)
    throw Error("WrongMode", "the base realization must be a canonical coloring");
  if (!(base_realization.lang() == pres.lang()))
    throw Error("BadLanguage", "realization language differs from the recipe base");
  base_realization.validate_canonical();
  std::string why;
  if (!pres.glues(base_realization, &why)) throw Error("BadRealization", why);
  int n = base_realization.window();
  int top = std::min(n, f.extra().max_arity());
  if (top > f.horizon())
    throw Error("OutOfHorizon", "window needs functions on " + std::to_string(top) + " points");
  UniformArray ua(seed);
  WindowStructure out(f.extra(), n, Mode::general);
  for (int k = 1; k <= top; ++k) {
    const auto& rels = f.extra().rels_of_arity(k);
    if (rels.empty()) continue;
    for (const auto& a : injective_tuples(n, k)) {
      CoordFn fn = [&](const Tuple& ix) { return ua.zeta(sorted_set(select(a, ix))); };
      OrderedQfType q = f.eval(pres.labeled_type(base_realization, a), fn);
      for (int rel : rels)
        if (q.top(rel)) out.add_fact(rel, a);
    }
  }
  return out;
}

std::map<std::string, Rat> pushforward_diagrams(const Recipe& r, int window, long long cell_cap) {
  if (window < 1) throw Error("BadWindow", "window must be positive");
  int top = std::min(window, r.lang().max_arity());
  if (top > r.horizon()) throw Error("OutOfHorizon", "window needs f_" + std::to_string(top));
  std::map<Tuple, std::set<Rat>> cut_map;
  {
    auto zero = r.cuts(0);
    cut_map[Tuple{}] = {zero.begin(), zero.end()};
    for (int s = 1; s <= top; ++s) {
      auto cs = r.cuts(s);
      for (const auto& sub : subsets_of_size(window, s)) cut_map[sub] = {cs.begin(), cs.end()};
    }
  }
  std::map<std::string, Rat> out;
  for_each_cell(cut_map, cell_cap, [&](const std::map<Tuple, Rat>& mid, const Rat& vol) {
    NonRedundantQfType diag(r.lang(), window);
    for (int n = 1; n <= top; ++n)
      for (const auto& a : injective_tuples(window, n)) {
        CoordFn fn = [&](const Tuple& ix) { return mid.at(sorted_set(select(a, ix))); };
        OrderedQfType q = r.eval(n, fn);
        for (int rel : r.lang().rels_of_arity(n)) diag.set(rel, a, q.top(rel));
      }
    out[diag.key()] += vol;
  });
  return out;
}

WindowMeasure pushforward_measure(const UniformExtensionRecipe& r, int horizon,
                                  const Region* pin) {
  const CanonicalPresentation& pres = r.presentation();
  WindowMeasure out(pres, Language(std::vector<Relation>{}), horizon);
  for (int m = 1; m <= horizon; ++m) {
    NonRedundantQfType empty_diag(out.extra(), m);
    for (const auto& t : pres.labeled_types_of_size(m)) {
      Region reg = region_of_type(r, t);
      Rat v = 1;
      for (const auto& [sub, cell] : reg.cells) {
        bool inside = pin != nullptr;
        if (inside)
          for (int p : sub)
            if (p < 0 || p >= pin->window) {
              inside = false;
              break;
            }
        if (inside) {
          auto it = pin->cells.find(sub);
          if (it != pin->cells.end()) {
            if (!(it->second == cell)) {
              v = 0;
              break;
            }
            continue;
          }
        }
        v = Rat(v * (cell.second - cell.first));
      }
      out.set_value(t, empty_diag, v);
    }
  }
  return out;
}

ColoringKernel pushforward_kernel(const AutRecipe& f, int horizon, long long cell_cap) {
  const CanonicalPresentation& pres = f.base();
  ColoringKernel out(pres, f.extra(), horizon);
  for (int m = 1; m <= horizon; ++m) {
    std::vector<int> ks;
    for (int k = 1; k <= std::min(m, f.extra().max_arity()); ++k)
      if (!f.extra().rels_of_arity(k).empty()) ks.push_back(k);
    if (!ks.empty() && ks.back() > f.horizon())
      throw Error("OutOfHorizon", "extra relations of arity " + std::to_string(ks.back()) +
                                      " need functions beyond the recipe horizon");
    for (const auto& p : pres.labeled_types_of_size(m)) {
      std::map<Tuple, std::set<Rat>> cut_map;
      cut_map[Tuple{}] = {};
      int kmax = ks.empty() ? 0 : ks.back();
      for (const auto& sub : subsets_up_to(m, kmax)) cut_map[sub] = {};
      for (int k : ks) {
        for (const auto& a : injective_tuples(m, k)) {
          const StepFunction& fp = f.at(pres.labeled_type(p, a));
          for (const auto& [ix, cl] : fp.cut_lists) {
            Tuple sub = sorted_set(select(a, ix));
            cut_map[sub].insert(cl.begin(), cl.end());
          }
        }
      }
      std::map<std::string, std::pair<NonRedundantQfType, Rat>> row;
      for_each_cell(cut_map, cell_cap, [&](const std::map<Tuple, Rat>& mid, const Rat& vol) {
        NonRedundantQfType diag(f.extra(), m);
        for (int k : ks)
          for (const auto& a : injective_tuples(m, k)) {
            CoordFn fn = [&](const Tuple& ix) { return mid.at(sorted_set(select(a, ix))); };
            OrderedQfType q = f.eval(pres.labeled_type(p, a), fn);
            for (int rel : f.extra().rels_of_arity(k)) diag.set(rel, a, q.top(rel));
          }
        auto& slot = row.emplace(diag.key(), std::make_pair(diag, Rat(0))).first->second;
        slot.second += vol;
      });
      for (const auto& [dk, dv] : row) out.set_value(p, dv.first, dv.second);
    }
  }
  return out;
}

AutRecipe conditional_recipe(const UniformExtensionRecipe& cm, const TableRecipe& joint,
                             long long cell_cap) {
  const CanonicalPresentation& pres = cm.presentation();
  const Language& bl = pres.lang();
  const Language& jl = joint.lang();
  if (jl.size() < bl.size()) throw Error("BadLanguage", "joint recipe lacks the base relations");
  for (int i = 0; i < bl.size(); ++i)
    if (!(jl.rel(i) == bl.rel(i)))
      throw Error("BadLanguage", "joint language must start with the base relations in order");
  Language extra(std::vector<Relation>(jl.relations().begin() + bl.size(), jl.relations().end()));
  if (joint.horizon() < cm.horizon())
    throw Error("BadHorizon", "joint recipe horizon below the base horizon");

  for (int n = 1; n <= cm.horizon(); ++n) {
    const StepFunction& jfn = joint.fn(n);
    std::map<Tuple, std::set<Rat>> cut_map;
    for (const auto& sub : jfn.coords()) {
      auto cs = cm.cuts(static_cast<int>(sub.size()));
      std::set<Rat> merged(cs.begin(), cs.end());
      auto it = jfn.cut_lists.find(sub);
      if (it != jfn.cut_lists.end()) merged.insert(it->second.begin(), it->second.end());
      cut_map[sub] = std::move(merged);
    }
    for_each_cell(cut_map, cell_cap, [&](const std::map<Tuple, Rat>& mid, const Rat&) {
      CoordFn at_mid = [&](const Tuple& sub) { return mid.at(sub); };
      OrderedQfType tj = joint.eval(n, at_mid);
      OrderedQfType tc = cm.eval(n, at_mid);
      for (int rel : bl.rels_of_arity(n))
        if (tj.top(rel) != tc.top(rel)) {
          std::string where;
          for (const auto& [sub, y] : mid) where += tuple_str(sub) + "=" + rat_str(y) + " ";
          throw Error("NotAgreeing", "base decision for " + bl.rel(rel).name +
                                         " differs from the staged recipe at " + where);
        }
    });
  }

  AutRecipe out(pres, extra, cm.horizon());
  for (int m = 1; m <= cm.horizon(); ++m) {
    const StepFunction& em = joint.fn(m);
    for (const auto& p : pres.labeled_types_of_size(m)) {
      Region reg = region_of_type(cm, p);
      StepFunction& fp = out.at(p);
      for (const auto& sub : fp.coords()) {
        auto it = em.cut_lists.find(sub);
        if (it == em.cut_lists.end()) continue;
        auto cellit = reg.cells.find(sub);
        std::vector<Rat> cs;
        if (cellit == reg.cells.end()) {
          cs = it->second;
        } else {
          const Rat& lo = cellit->second.first;
          const Rat& hi = cellit->second.second;
          Rat w = hi - lo;
          for (const Rat& c : it->second)
            if (lo < c && c < hi) cs.push_back(Rat((c - lo) / w));
        }
        if (!cs.empty()) fp.set_cuts(sub, cs);
      }
      auto coords = fp.coords();
      std::vector<std::vector<Rat>> bounds;
      for (const auto& sub : coords) {
        std::vector<Rat> b{Rat(0)};
        auto it = fp.cut_lists.find(sub);
        if (it != fp.cut_lists.end()) b.insert(b.end(), it->second.begin(), it->second.end());
        b.push_back(Rat(1));
        bounds.push_back(std::move(b));
      }
      std::vector<size_t> idx(coords.size(), 0);
      while (true) {
        std::map<Tuple, Rat> x;
        std::vector<int> cell;
        for (size_t i = 0; i < coords.size(); ++i) {
          Rat y = Rat((bounds[i][idx[i]] + bounds[i][idx[i] + 1]) / 2);
          x[coords[i]] = reg.transform(coords[i], y);
          cell.push_back(static_cast<int>(idx[i]));
        }
        OrderedQfType jq = joint.eval(m, [&](const Tuple& sub) { return x.at(sub); });
        OrderedQfType v(extra, m);
        for (const auto& [rel, inc] : ordered_slots(extra, m))
          v.set(rel, inc, jq.decide(bl.size() + rel, inc));
        fp.set_value(cell, v);
        size_t d = 0;
        for (; d < idx.size(); ++d) {
          if (idx[d] + 2 < bounds[d].size()) {
            ++idx[d];
            break;
          }
          idx[d] = 0;
        }
        if (d == idx.size()) break;
      }
    }
  }
  return out;
}

TableRecipe materialized_table(const UniformExtensionRecipe& r, long long cell_cap) {
  TableRecipe out(r.lang(), r.horizon());
  for (int n = 1; n <= r.horizon(); ++n) {
    StepFunction& fn = out.fn(n);
    for (const auto& sub : fn.coords()) {
      if (sub.empty()) continue;
      auto cs = r.cuts(static_cast<int>(sub.size()));
      if (!cs.empty()) fn.set_cuts(sub, cs);
    }
    auto coords = fn.coords();
    std::vector<std::vector<Rat>> bounds;
    long long total = 1;
    for (const auto& sub : coords) {
      std::vector<Rat> b{Rat(0)};
      auto it = fn.cut_lists.find(sub);
      if (it != fn.cut_lists.end()) b.insert(b.end(), it->second.begin(), it->second.end());
      b.push_back(Rat(1));
      total *= static_cast<long long>(b.size()) - 1;
      if (total > cell_cap)
        throw Error("TooManyCells", "f_" + std::to_string(n) + " grid exceeds " +
                                        std::to_string(cell_cap) + " cells");
      bounds.push_back(std::move(b));
    }
    std::vector<size_t> idx(coords.size(), 0);
    while (true) {
      std::map<Tuple, Rat> mid;
      std::vector<int> cell;
      for (size_t i = 0; i < coords.size(); ++i) {
        mid[coords[i]] = Rat((bounds[i][idx[i]] + bounds[i][idx[i] + 1]) / 2);
        cell.push_back(static_cast<int>(idx[i]));
      }
      fn.set_value(cell, r.eval(n, [&](const Tuple& sub) { return mid.at(sub); }));
      size_t d = 0;
      for (; d < idx.size(); ++d) {
        if (idx[d] + 2 < bounds[d].size()) {
          ++idx[d];
          break;
        }
        idx[d] = 0;
      }
      if (d == idx.size()) break;
    }
  }
  return out;
}

}  // namespace relmeas
