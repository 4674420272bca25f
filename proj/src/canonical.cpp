#include "relmeas/canonical.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "relmeas/error.hpp"

namespace relmeas {
namespace {

std::vector<Tuple> orderings_of(const Tuple& subset) {
  std::vector<Tuple> out;
  for (const auto& d : permutations_of(static_cast<int>(subset.size())))
    out.push_back(select(subset, d));
  return out;
}

std::map<Tuple, int> constant_reorder(int arity, int rel_id) {
  std::map<Tuple, int> r;
  for (const auto& d : permutations_of(arity)) r[d] = rel_id;
  return r;
}

}  // namespace

const PresRelation& CanonicalPresentation::rel(int id) const {
  if (id < 0 || id >= size()) throw Error("UnknownRelation", std::to_string(id));
  return rels_[id];
}

int CanonicalPresentation::id_of(const std::string& name) const {
  auto it = by_name_.find(name);
  if (it == by_name_.end()) throw Error("UnknownRelation", name);
  return it->second;
}

std::vector<int> CanonicalPresentation::rels_of_arity(int arity) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (rels_[i].arity == arity) out.push_back(i);
  return out;
}

void CanonicalPresentation::add_relation(PresRelation r) {
  if (r.arity < 1) throw Error("BadArity", r.name);
  if (by_name_.count(r.name)) throw Error("DuplicateRelation", r.name);
  if (r.rep.window() != r.arity || r.rep.mode() != Mode::canonical)
    throw Error("BadRepresentative", r.name);
  int id = size();
  rels_.push_back(std::move(r));
  by_name_[rels_.back().name] = id;
  max_arity_ = std::max(max_arity_, rels_.back().arity);
  std::vector<Relation> sig;
  for (const auto& pr : rels_) sig.push_back({pr.name, pr.arity});
  lang_ = Language(sig);

  const PresRelation& added = rels_[id];
  Tuple full = identity_perm(added.arity);
  const Fact& top = added.rep.color(full);
  if (top.rel != id || top.args != full)
    throw Error("BadRepresentative", added.name + ": top fact must be (self, identity)");
  if (std::find(added.auts.begin(), added.auts.end(), full) == added.auts.end())
    throw Error("BadRepresentative", added.name + ": missing identity aut");
  if (added.reorder.size() != permutations_of(added.arity).size() ||
      added.reorder.at(full) != id)
    throw Error("BadRepresentative", added.name + ": bad reorder table");
  std::string why;
  if (!glues(added.rep, &why))
    throw Error("BadRepresentative", added.name + ": " + why);
}

void CanonicalPresentation::rename_relation(int id, const std::string& name) {
  if (id < 0 || id >= size()) throw Error("UnknownRelation", std::to_string(id));
  if (by_name_.count(name) && by_name_[name] != id) throw Error("DuplicateRelation", name);
  by_name_.erase(rels_[id].name);
  rels_[id].name = name;
  by_name_[name] = id;
  std::vector<Relation> sig;
  for (const auto& pr : rels_) sig.push_back({pr.name, pr.arity});
  lang_ = Language(sig);
}

Fact CanonicalPresentation::normalize_fact(const Fact& f) const {
  const PresRelation& r = rel(f.rel);
  Tuple best = f.args;
  for (const auto& a : r.auts) best = std::min(best, select(f.args, a));
  return Fact{f.rel, best};
}

void CanonicalPresentation::normalize(WindowStructure& s) const {
  WindowStructure out(lang_, s.window(), Mode::canonical);
  for (const auto& [sub, f] : s.colors()) {
    Fact n = normalize_fact(f);
    out.set_color(sub, n.rel, n.args);
  }
  s = out;
}

WindowStructure CanonicalPresentation::relabeled_coloring(const WindowStructure& s,
                                                          const Tuple& perm) const {
  WindowStructure out = s.relabeled(perm);
  normalize(out);
  return out;
}

WindowStructure CanonicalPresentation::canon_coloring(const WindowStructure& s) const {
  WindowStructure best = s;
  normalize(best);
  std::string best_key = best.key();
  for (const auto& p : permutations_of(s.window())) {
    WindowStructure cand = relabeled_coloring(s, p);
    if (cand.key() < best_key) {
      best_key = cand.key();
      best = cand;
    }
  }
  return best;
}

std::vector<Tuple> CanonicalPresentation::coloring_auts(const WindowStructure& s) const {
  WindowStructure base = s;
  normalize(base);
  std::vector<Tuple> out;
  for (const auto& p : permutations_of(s.window()))
    if (relabeled_coloring(s, p).key() == base.key()) out.push_back(p);
  return out;
}

namespace {

// One fact agrees with its relation's representative when every proper
// sub-face of the fact matches the transported sub-face of the representative.
bool fact_glues(const CanonicalPresentation& pres, const WindowStructure& s, const Fact& f,
                std::string* why) {
  const PresRelation& r = pres.rel(f.rel);
  for (int k = 1; k < r.arity; ++k) {
    for (const auto& ix : subsets_of_size(r.arity, k)) {
      const Fact& rep_fact = r.rep.color(ix);
      Fact want = pres.normalize_fact(Fact{rep_fact.rel, select(f.args, rep_fact.args)});
      Tuple sub = sorted_set(want.args);
      auto it = s.colors().find(sub);
      if (it == s.colors().end()) {
        if (why) *why = "missing color at " + tuple_str(sub);
        return false;
      }
      Fact have = pres.normalize_fact(it->second);
      if (!(have == want)) {
        if (why)
          *why = "face " + tuple_str(sub) + " carries " + pres.lang().rel(have.rel).name +
                 " but " + pres.lang().rel(f.rel).name + " needs " + pres.lang().rel(want.rel).name;
        return false;
      }
    }
  }
  return true;
}

}  // namespace

bool CanonicalPresentation::glues(const WindowStructure& s, std::string* why) const {
  if (s.mode() != Mode::canonical) throw Error("WrongMode", "glues expects canonical mode");
  for (const auto& [sub, f] : s.colors())
    if (!fact_glues(*this, s, f, why)) return false;
  return true;
}

bool CanonicalPresentation::fact_fits(const WindowStructure& s, const Fact& f) const {
  return fact_glues(*this, s, f, nullptr);
}

WindowStructure CanonicalPresentation::boundary_at(const WindowStructure& s,
                                                   const Tuple& subset) const {
  if (s.mode() != Mode::canonical) throw Error("WrongMode", "boundary_at expects canonical mode");
  std::map<int, int> rank;
  for (size_t i = 0; i < subset.size(); ++i) rank[subset[i]] = static_cast<int>(i);
  WindowStructure out(lang(), static_cast<int>(subset.size()), Mode::canonical);
  int n = static_cast<int>(subset.size());
  for (int k = 1; k < n; ++k) {
    for (const auto& ix : subsets_of_size(n, k)) {
      const Fact& f = s.color(select(subset, ix));
      Tuple args(f.args.size());
      for (size_t i = 0; i < f.args.size(); ++i) args[i] = rank.at(f.args[i]);
      out.set_color(ix, f.rel, args);
    }
  }
  return out;
}

int CanonicalPresentation::relation_at(const WindowStructure& s, const Tuple& ordered) const {
  if (!injective(ordered)) throw Error("RedundantTuple", tuple_str(ordered));
  const Fact& f = s.color(sorted_set(ordered));
  Tuple d(ordered.size());
  for (size_t i = 0; i < ordered.size(); ++i) {
    auto it = std::find(f.args.begin(), f.args.end(), ordered[i]);
    d[i] = static_cast<int>(it - f.args.begin());
  }
  return rel(f.rel).reorder.at(d);
}

WindowStructure CanonicalPresentation::labeled_type(const WindowStructure& s,
                                                    const Tuple& t) const {
  if (!injective(t)) throw Error("RedundantTuple", tuple_str(t));
  int m = static_cast<int>(t.size());
  std::map<int, int> pos;
  for (int i = 0; i < m; ++i) pos[t[i]] = i;
  WindowStructure out(lang_, m, Mode::canonical);
  for (const auto& ix : subsets_up_to(m, max_arity_)) {
    if (static_cast<int>(ix.size()) > s.window()) continue;
    Tuple points = select(t, ix);
    const Fact& f = s.color(sorted_set(points));
    Tuple args;
    for (int p : f.args) args.push_back(pos.at(p));
    Fact n = normalize_fact(Fact{f.rel, args});
    out.set_color(ix, n.rel, n.args);
  }
  return out;
}

std::vector<WindowStructure> CanonicalPresentation::labeled_types_of_size(int m) const {
  if (m < 1 || m > max_arity_) throw Error("BadArity", "no members of size " + std::to_string(m));
  std::map<std::string, WindowStructure> seen;
  for (int r : rels_of_arity(m)) {
    const WindowStructure& rep = rels_[r].rep;
    for (const auto& p : permutations_of(m)) {
      WindowStructure t = labeled_type(rep, p);
      seen.emplace(t.key(), t);
    }
  }
  std::vector<WindowStructure> out;
  for (auto& [k, v] : seen) out.push_back(v);
  return out;
}

int CanonicalPresentation::restrict_relation(int rel_id, const Tuple& index_set) const {
  const PresRelation& r = rel(rel_id);
  Tuple ix = sorted_set(index_set);
  if (ix != index_set || ix.empty() || static_cast<int>(ix.size()) >= r.arity ||
      ix.back() >= r.arity)
    throw Error("BadIndexSet", r.name + tuple_str(index_set));
  return r.rep.color(ix).rel;
}

std::vector<std::tuple<int, Tuple, int>> CanonicalPresentation::restriction_table() const {
  std::vector<std::tuple<int, Tuple, int>> out;
  for (int id = 0; id < size(); ++id)
    for (int k = 1; k < rels_[id].arity; ++k)
      for (const auto& ix : subsets_of_size(rels_[id].arity, k))
        out.emplace_back(id, ix, restrict_relation(id, ix));
  return out;
}

std::vector<WindowStructure> CanonicalPresentation::raw_boundaries(int n) const {
  std::vector<Tuple> subs;
  for (const auto& s : subsets_up_to(n, max_arity_))
    if (static_cast<int>(s.size()) < n) subs.push_back(s);

  std::vector<WindowStructure> out;
  WindowStructure cur(lang_, n, Mode::canonical);
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == subs.size()) {
      out.push_back(cur);
      return;
    }
    const Tuple& sub = subs[i];
    std::set<Fact> cands;
    for (int r : rels_of_arity(static_cast<int>(sub.size())))
      for (const auto& ord : orderings_of(sub)) cands.insert(normalize_fact(Fact{r, ord}));
    for (const Fact& f : cands) {
      if (!fact_glues(*this, cur, f, nullptr)) continue;
      cur.set_color(sub, f.rel, f.args);
      self(self, i + 1);
    }
    WindowStructure reset(lang_, n, Mode::canonical);
    for (size_t j = 0; j < i; ++j) {
      const Fact& kept = cur.color(subs[j]);
      reset.set_color(subs[j], kept.rel, kept.args);
    }
    cur = reset;
  };
  rec(rec, 0);
  return out;
}

std::vector<CompatibleCollection> CanonicalPresentation::enumerate_compatible(int n) const {
  if (n < 2 || n > max_arity_ + 1)
    throw Error("BadArity", "compatible collections need 2 <= n <= max arity + 1");
  std::map<std::string, WindowStructure> classes;
  for (const auto& b : raw_boundaries(n)) {
    WindowStructure c = canon_coloring(b);
    classes.emplace(c.key(), c);
  }
  std::vector<CompatibleCollection> out;
  for (auto& [k, b] : classes) {
    CompatibleCollection cc{b, {}};
    if (n - 1 >= 1 && n - 1 <= max_arity_) {
      for (int omit = 0; omit < n; ++omit) {
        Tuple face;
        for (int p = 0; p < n; ++p)
          if (p != omit) face.push_back(p);
        cc.parts.push_back(b.color_rel(face));
      }
    }
    out.push_back(std::move(cc));
  }
  return out;
}

std::vector<int> CanonicalPresentation::extensions_of(const WindowStructure& boundary) const {
  int n = boundary.window();
  if (n < 1 || n > max_arity_) throw Error("BadArity", "boundary window exceeds max arity");
  std::set<int> found;
  Tuple full = identity_perm(n);
  for (int r : rels_of_arity(n)) {
    bool ok = false;
    for (const auto& ord : orderings_of(full)) {
      if (fact_glues(*this, boundary, Fact{r, ord}, nullptr)) {
        ok = true;
        break;
      }
    }
    if (ok) found.insert(r);
  }
  return {found.begin(), found.end()};
}

FreenessReport CanonicalPresentation::freeness() const {
  for (int n = 2; n <= max_arity_; ++n) {
    for (const auto& cc : enumerate_compatible(n)) {
      if (!extensions_of(cc.boundary).empty()) continue;
      std::ostringstream os;
      os << "<";
      for (size_t i = 0; i < cc.parts.size(); ++i)
        os << (i ? "," : "") << lang_.rel(cc.parts[i]).name;
      os << ">";
      return {false, n, os.str()};
    }
  }
  return {true, 0, ""};
}

std::string CanonicalPresentation::describe() const {
  std::ostringstream os;
  os << "relations (" << size() << "):\n";
  for (int i = 0; i < size(); ++i)
    os << "  " << rels_[i].name << "/" << rels_[i].arity << " auts=" << rels_[i].auts.size()
       << "\n";
  os << "restrictions:\n";
  for (const auto& [r, ix, sub] : restriction_table())
    os << "  " << lang_.rel(r).name << " " << tuple_str(ix) << " -> " << lang_.rel(sub).name
       << "\n";
  return os.str();
}

namespace {

// Shared by both canonicalize overloads: builds the representative coloring of
// a relation from a resolver mapping an ordering of rep points to the fact it
// realizes, which must return the least valid incidence for each subset.
WindowStructure build_rep(const Language& lang_with_self, int arity, int self_id,
                          const std::function<Fact(const Tuple&)>& face_fact) {
  WindowStructure rep(lang_with_self, arity, Mode::canonical);
  for (const auto& ix : subsets_up_to(arity, arity)) {
    if (static_cast<int>(ix.size()) == arity) {
      rep.set_color(ix, self_id, identity_perm(arity));
    } else {
      Fact f = face_fact(ix);
      rep.set_color(ix, f.rel, f.args);
    }
  }
  return rep;
}

}  // namespace

CanonicalPresentation canonicalize(const Age& age, int bound) {
  if (bound < 1 || bound > age.size_bound())
    throw Error("BadArity", "bound must be between 1 and the age size bound");
  CanonicalPresentation pres;
  std::map<std::string, int> class_of;          // canon key of base diagram -> rel id
  std::map<int, WindowStructure> base_of;       // rel id -> representative base diagram

  for (int m = 1; m <= bound; ++m) {
    std::map<std::string, WindowStructure> classes;
    for (const WindowStructure* member : age.members_of_size(m)) {
      WindowStructure c = member->canonical_form();
      classes.emplace(c.key(), c);
    }
    if (classes.empty()) throw Error("EmptyAge", "no members of size " + std::to_string(m));
    int idx = 0;
    for (auto& [ckey, base] : classes) {
      int id = pres.size();
      PresRelation r;
      r.name = "T" + std::to_string(m) + "_" + std::to_string(idx++);
      r.arity = m;
      r.auts = automorphisms(base);
      r.reorder = constant_reorder(m, id);

      std::vector<Relation> sig;
      for (int i = 0; i < pres.size(); ++i)
        sig.push_back({pres.rel(i).name, pres.rel(i).arity});
      sig.push_back({r.name, r.arity});
      Language lang_with_self(sig);

      r.rep = build_rep(lang_with_self, m, id, [&](const Tuple& ix) {
        for (const auto& ord : orderings_of(ix)) {
          WindowStructure sub = base.substructure(ord);
          auto it = class_of.find(sub.canonical_form().key());
          if (it == class_of.end()) throw Error("EmptyAge", "age is not closed under substructure");
          if (sub == base_of.at(it->second)) return Fact{it->second, ord};
        }
        throw Error("Internal", "no aligned face class at " + tuple_str(ix));
      });

      class_of[ckey] = id;
      base_of.emplace(id, base);
      r.base = base;
      pres.add_relation(std::move(r));
    }
  }
  return pres;
}

CanonicalPresentation canonicalize(const WindowStructure& s, int bound) {
  if (s.mode() != Mode::general) throw Error("NotGeneral", "orbit presentation needs a general structure");
  if (bound < 1 || bound > s.window()) throw Error("BadArity", "bound must be between 1 and the window");
  std::vector<Tuple> auts = automorphisms(s);
  CanonicalPresentation pres;
  std::map<Tuple, int> orbit_of;                // tuple -> rel id, all arities

  for (int m = 1; m <= bound; ++m) {
    std::map<Tuple, std::vector<Tuple>> orbits;  // least element -> orbit
    for (const auto& t : injective_tuples(s.window(), m)) {
      Tuple least = t;
      for (const auto& p : auts) least = std::min(least, select(p, t));
      orbits[least].push_back(t);
    }
    int idx = 0;
    int first_id = pres.size();
    std::vector<std::pair<Tuple, std::vector<Tuple>>> ordered(orbits.begin(), orbits.end());
    for (const auto& [least, members] : ordered) {
      for (const auto& t : members) orbit_of[t] = first_id + idx;
      ++idx;
    }
    idx = 0;
    for (const auto& [least, members] : ordered) {
      int id = first_id + idx;
      PresRelation r;
      r.name = "O" + std::to_string(m) + "_" + std::to_string(idx);
      r.arity = m;
      for (const auto& d : permutations_of(m)) {
        if (orbit_of.at(select(least, d)) == id) r.auts.push_back(d);
        r.reorder[d] = orbit_of.at(select(least, d));
      }

      std::vector<Relation> sig;
      for (int i = 0; i < pres.size(); ++i)
        sig.push_back({pres.rel(i).name, pres.rel(i).arity});
      sig.push_back({r.name, r.arity});
      Language lang_with_self(sig);

      const Tuple rep_tuple = least;
      r.rep = build_rep(lang_with_self, m, id, [&](const Tuple& ix) {
        Tuple ord = ix;  // increasing order is the least ordering
        return Fact{orbit_of.at(select(rep_tuple, ord)), ord};
      });
      r.base = s.substructure(rep_tuple);
      pres.add_relation(std::move(r));
      ++idx;
    }
  }
  return pres;
}

CanonicalPresentation free_completion(const CanonicalPresentation& p, int max_arity) {
  if (max_arity < p.max_arity())
    throw Error("BadArity", "free completion cannot lower the max arity");
  CanonicalPresentation out;
  for (int i = 0; i < p.size(); ++i) out.add_relation(p.rel(i));

  for (int m = 2; m <= max_arity; ++m) {
    std::map<std::string, WindowStructure> classes;
    for (const auto& b : out.raw_boundaries(m)) {
      WindowStructure c = out.canon_coloring(b);
      classes.emplace(c.key(), c);
    }
    for (auto& [ckey, boundary] : classes) {
      if (!out.extensions_of(boundary).empty()) continue;
      PresRelation r;
      r.arity = m;
      std::vector<std::string> faces;
      for (int omit = 0; omit < m; ++omit) {
        Tuple face;
        for (int q = 0; q < m; ++q)
          if (q != omit) face.push_back(q);
        faces.push_back(out.lang().rel(boundary.color_rel(face)).name);
      }
      std::sort(faces.begin(), faces.end());
      std::ostringstream os;
      os << "P[";
      for (size_t i = 0; i < faces.size(); ++i) os << (i ? "," : "") << faces[i];
      os << "]";
      std::string base_name = os.str();
      std::string name = base_name;
      for (int suffix = 2; true; ++suffix) {
        bool taken = false;
        for (int i = 0; i < out.size(); ++i)
          if (out.rel(i).name == name) taken = true;
        if (!taken) break;
        name = base_name + "#" + std::to_string(suffix);
      }
      r.name = name;

      int id = out.size();
      r.auts = out.coloring_auts(boundary);
      r.reorder = constant_reorder(m, id);
      std::vector<Relation> sig;
      for (int i = 0; i < out.size(); ++i) sig.push_back({out.rel(i).name, out.rel(i).arity});
      sig.push_back({r.name, r.arity});
      Language lang_with_self(sig);
      WindowStructure rep(lang_with_self, m, Mode::canonical);
      for (const auto& [sub, f] : boundary.colors()) rep.set_color(sub, f.rel, f.args);
      rep.set_color(identity_perm(m), id, identity_perm(m));
      r.rep = rep;
      out.add_relation(std::move(r));
    }
  }
  return out;
}

WindowStructure translate_coloring(const CanonicalPresentation& target,
                                   const WindowStructure& s, const std::map<int, int>& rel_map) {
  WindowStructure out(target.lang(), s.window(), Mode::canonical);
  for (const auto& [sub, f] : s.colors()) {
    auto it = rel_map.find(f.rel);
    if (it == rel_map.end()) throw Error("UntranslatedRelation", "no image for a coloring fact");
    Fact n = target.normalize_fact(Fact{it->second, f.args});
    out.set_color(sub, n.rel, n.args);
  }
  return out;
}

namespace {

bool same_perm_group(std::vector<Tuple> a, std::vector<Tuple> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

struct EmbedSearch {
  const CanonicalPresentation& sub;
  const CanonicalPresentation& super;
  size_t limit = 1;
  std::vector<std::map<int, int>> found;

  void from_arity(std::map<int, int>& iota, int arity) {
    if (found.size() >= limit) return;
    if (arity > sub.max_arity()) {
      found.push_back(iota);
      return;
    }
    std::vector<int> ids0 = sub.rels_of_arity(arity);
    std::vector<int> ids1 = super.rels_of_arity(arity);
    std::vector<std::vector<int>> cands(ids0.size());
    for (size_t i = 0; i < ids0.size(); ++i) {
      for (int r1 : ids1) {
        std::map<int, int> probe = iota;
        probe[ids0[i]] = r1;
        WindowStructure t = translate_coloring(super, sub.rel(ids0[i]).rep, probe);
        if (super.canon_coloring(t).key() != super.canon_coloring(super.rel(r1).rep).key())
          continue;
        cands[i].push_back(r1);
      }
      if (cands[i].empty()) return;
    }
    std::vector<bool> used(super.size(), false);
    assign(iota, ids0, cands, 0, used, arity);
  }

  void assign(std::map<int, int>& iota, const std::vector<int>& ids0,
              const std::vector<std::vector<int>>& cands, size_t k, std::vector<bool>& used,
              int arity) {
    if (found.size() >= limit) return;
    if (k == ids0.size()) {
      // Every member of this arity must carry over as a valid coloring with
      // the same point symmetries; otherwise the lift is not unique.
      for (int r0 : ids0) {
        WindowStructure t = translate_coloring(super, sub.rel(r0).rep, iota);
        if (!super.glues(t)) return;
        if (!same_perm_group(sub.coloring_auts(sub.rel(r0).rep), super.coloring_auts(t))) return;
      }
      from_arity(iota, arity + 1);
      return;
    }
    for (int r1 : cands[k]) {
      if (used[r1]) continue;
      used[r1] = true;
      iota[ids0[k]] = r1;
      assign(iota, ids0, cands, k + 1, used, arity);
      iota.erase(ids0[k]);
      used[r1] = false;
    }
  }
};

}  // namespace

std::vector<std::map<int, int>> sub_presentation_embeddings(const CanonicalPresentation& sub,
                                                            const CanonicalPresentation& super,
                                                            size_t limit) {
  if (sub.max_arity() > super.max_arity()) return {};
  EmbedSearch search{sub, super, limit, {}};
  std::map<int, int> iota;
  search.from_arity(iota, 1);
  return std::move(search.found);
}

std::optional<std::map<int, int>> sub_presentation_embedding(const CanonicalPresentation& sub,
                                                             const CanonicalPresentation& super) {
  auto all = sub_presentation_embeddings(sub, super, 1);
  if (all.empty()) return std::nullopt;
  return all.front();
}

}  // namespace relmeas
