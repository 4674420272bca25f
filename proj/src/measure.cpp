#include "relmeas/measure.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "relmeas/error.hpp"

namespace relmeas {
namespace {

std::string type_label(const WindowStructure& type) {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (const auto& [sub, f] : type.colors()) {
    if (!first) os << " ";
    first = false;
    os << type.lang().rel(f.rel).name << tuple_str(f.args);
  }
  os << "}";
  return os.str();
}

std::string diagram_label(const NonRedundantQfType& d) {
  std::ostringstream os;
  os << "[";
  bool first = true;
  for (const auto& [rel, inj] : nonredundant_slots(d.lang(), d.vars())) {
    if (!d.decide(rel, inj)) continue;
    if (!first) os << " ";
    first = false;
    os << d.lang().rel(rel).name << tuple_str(inj);
  }
  os << "]";
  return os.str();
}

std::string atom_label(const WindowStructure& type, const NonRedundantQfType& d) {
  std::string out = type_label(type);
  if (d.lang().size() > 0) out += diagram_label(d);
  return out;
}

}  // namespace

WindowMeasure::WindowMeasure(CanonicalPresentation base, Language extra, int horizon)
    : base_(std::move(base)), extra_(std::move(extra)), horizon_(horizon) {
  if (horizon < 1 || horizon > base_.max_arity())
    throw Error("BadHorizon", "horizon must be between 1 and the presentation max arity");
  if (!disjoint_names(base_.lang(), extra_))
    throw Error("DuplicateRelation", "extra language reuses a presentation name");
  for (int m = 1; m <= horizon_; ++m) {
    auto& table = tables_[m];
    std::vector<NonRedundantQfType> diagrams = enumerate_nonredundant_types(extra_, m);
    for (const auto& t : base_.labeled_types_of_size(m)) {
      auto& row = table[t.key()];
      row.first = t;
      for (const auto& d : diagrams) row.second[d.key()] = {d, Rat(0)};
    }
  }
}

void WindowMeasure::set_value(const WindowStructure& type, const NonRedundantQfType& d,
                              const Rat& v) {
  int m = type.window();
  auto tit = tables_.find(m);
  if (tit == tables_.end()) throw Error("BadWindow", "size outside horizon");
  WindowStructure n = type;
  base_.normalize(n);
  auto rit = tit->second.find(n.key());
  if (rit == tit->second.end()) throw Error("UnknownType", type_label(n));
  auto cit = rit->second.second.find(d.key());
  if (cit == rit->second.second.end()) throw Error("UnknownDiagram", d.key());
  cit->second.second = v;
}

Rat WindowMeasure::value(const WindowStructure& type, const NonRedundantQfType& d) const {
  int m = type.window();
  auto tit = tables_.find(m);
  if (tit == tables_.end()) throw Error("BadWindow", "size outside horizon");
  WindowStructure n = type;
  base_.normalize(n);
  auto rit = tit->second.find(n.key());
  if (rit == tit->second.end()) throw Error("UnknownType", type_label(n));
  auto cit = rit->second.second.find(d.key());
  if (cit == rit->second.second.end()) throw Error("UnknownDiagram", d.key());
  return cit->second.second;
}

Rat WindowMeasure::type_mass(const WindowStructure& type) const {
  Rat s(0);
  for (const auto& d : enumerate_nonredundant_types(extra_, type.window())) s += value(type, d);
  return s;
}

std::vector<Atom> WindowMeasure::atoms(int m) const {
  auto tit = tables_.find(m);
  if (tit == tables_.end()) throw Error("BadWindow", "size outside horizon");
  std::vector<Atom> out;
  for (const auto& [tk, row] : tit->second)
    for (const auto& [dk, cell] : row.second) out.push_back({row.first, cell.first});
  return out;
}

MeasureReport WindowMeasure::check() const {
  for (int m = 1; m <= horizon_; ++m) {
    Rat total(0);
    for (const auto& [tk, row] : tables_.at(m)) {
      for (const auto& [dk, cell] : row.second) {
        if (cell.second < 0 || cell.second > 1)
          return {false, "value outside [0,1] at " + atom_label(row.first, cell.first)};
        total += cell.second;
      }
    }
    if (total != 1) {
      Rat t = total;
      return {false, "size " + std::to_string(m) + " has total mass " + rat_str(t)};
    }
  }

  for (int m = 1; m <= horizon_; ++m) {
    for (const auto& [tk, row] : tables_.at(m)) {
      for (const auto& p : permutations_of(m)) {
        WindowStructure moved = base_.relabeled_coloring(row.first, p);
        for (const auto& [dk, cell] : row.second) {
          Rat there = value(moved, relabel_type(cell.first, p));
          if (there != cell.second)
            return {false, "not invariant: " + atom_label(row.first, cell.first) + " has " +
                               rat_str(cell.second) + " but image under " + tuple_str(p) +
                               " has " + rat_str(there)};
        }
      }
    }
  }

  for (int m = 1; m < horizon_; ++m) {
    for (const auto& [tk, row] : tables_.at(m)) {
      for (const auto& [dk, cell] : row.second) {
        Rat sum(0);
        Tuple initial = identity_perm(m);
        for (const auto& [qk, qrow] : tables_.at(m + 1)) {
          if (base_.labeled_type(qrow.first, initial).key() != tk) continue;
          for (const auto& [ek, ecell] : qrow.second) {
            if (restrict_type(ecell.first, m).key() != dk) continue;
            sum += ecell.second;
          }
        }
        if (sum != cell.second) {
          Rat s = sum;
          return {false, "not projective: " + atom_label(row.first, cell.first) + " has " +
                             rat_str(cell.second) + " but its size-" + std::to_string(m + 1) +
                             " extensions sum to " + rat_str(s)};
        }
      }
    }
  }
  return {true, ""};
}

WindowMeasure WindowMeasure::restricted(int new_horizon) const {
  if (new_horizon < 1 || new_horizon > horizon_)
    throw Error("BadHorizon", std::to_string(new_horizon));
  WindowMeasure out(base_, extra_, new_horizon);
  for (int m = 1; m <= new_horizon; ++m) out.tables_[m] = tables_.at(m);
  return out;
}

bool atom_sat(const CanonicalPresentation& pres, const WindowStructure& type,
              const NonRedundantQfType& d, const QfFormula& f) {
  auto literal = [&](const Literal& lit) {
    int w = type.window();
    for (int a : lit.args)
      if (a < 0 || a >= w) throw Error("ParameterOutOfWindow", lit.rel + tuple_str(lit.args));
    int base_rel = pres.lang().id_of(lit.rel);
    int extra_rel = d.lang().id_of(lit.rel);
    if (base_rel < 0 && extra_rel < 0) throw Error("UnknownRelation", lit.rel);
    int arity = base_rel >= 0 ? pres.lang().rel(base_rel).arity : d.lang().rel(extra_rel).arity;
    if (static_cast<int>(lit.args.size()) != arity)
      throw Error("BadArity", lit.rel + tuple_str(lit.args));
    if (!injective(lit.args)) return !lit.positive;
    bool holds = base_rel >= 0 ? pres.relation_at(type, lit.args) == base_rel
                               : d.decide(extra_rel, lit.args);
    return lit.positive ? holds : !holds;
  };
  for (const auto& disj : f.disjuncts()) {
    bool all = true;
    for (const auto& lit : disj)
      if (!literal(lit)) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

Rat WindowMeasure::event_probability(const QfFormula& f) const {
  int w = std::max(1, f.max_param() + 1);
  if (w > horizon_) throw Error("WindowTooLarge", "event needs window " + std::to_string(w));
  Rat s(0);
  for (const auto& [tk, row] : tables_.at(w))
    for (const auto& [dk, cell] : row.second)
      if (atom_sat(base_, row.first, cell.first, f)) s += cell.second;
  return s;
}

ColoringKernel::ColoringKernel(CanonicalPresentation base, Language extra, int horizon)
    : base_(std::move(base)), extra_(std::move(extra)), horizon_(horizon) {
  if (horizon < 1 || horizon > base_.max_arity())
    throw Error("BadHorizon", "horizon must be between 1 and the presentation max arity");
  if (!disjoint_names(base_.lang(), extra_))
    throw Error("DuplicateRelation", "extra language reuses a presentation name");
  for (int m = 1; m <= horizon_; ++m) {
    auto& table = tables_[m];
    std::vector<NonRedundantQfType> diagrams = enumerate_nonredundant_types(extra_, m);
    for (const auto& t : base_.labeled_types_of_size(m)) {
      auto& row = table[t.key()];
      row.first = t;
      for (const auto& d : diagrams) row.second[d.key()] = {d, Rat(0)};
    }
  }
}

void ColoringKernel::set_value(const WindowStructure& type, const NonRedundantQfType& d,
                               const Rat& v) {
  auto tit = tables_.find(type.window());
  if (tit == tables_.end()) throw Error("BadWindow", "size outside horizon");
  WindowStructure n = type;
  base_.normalize(n);
  auto rit = tit->second.find(n.key());
  if (rit == tit->second.end()) throw Error("UnknownType", type_label(n));
  auto cit = rit->second.second.find(d.key());
  if (cit == rit->second.second.end()) throw Error("UnknownDiagram", d.key());
  cit->second.second = v;
}

Rat ColoringKernel::value(const WindowStructure& type, const NonRedundantQfType& d) const {
  auto tit = tables_.find(type.window());
  if (tit == tables_.end()) throw Error("BadWindow", "size outside horizon");
  WindowStructure n = type;
  base_.normalize(n);
  auto rit = tit->second.find(n.key());
  if (rit == tit->second.end()) throw Error("UnknownType", type_label(n));
  auto cit = rit->second.second.find(d.key());
  if (cit == rit->second.second.end()) throw Error("UnknownDiagram", d.key());
  return cit->second.second;
}

void ColoringKernel::mark_defaulted(const WindowStructure& type) {
  WindowStructure n = type;
  base_.normalize(n);
  defaulted_.insert(n.key());
}

MeasureReport ColoringKernel::check() const {
  for (int m = 1; m <= horizon_; ++m) {
    for (const auto& [tk, row] : tables_.at(m)) {
      Rat total(0);
      for (const auto& [dk, cell] : row.second) {
        if (cell.second < 0 || cell.second > 1)
          return {false, "value outside [0,1] at " + atom_label(row.first, cell.first)};
        total += cell.second;
      }
      if (total != 1) {
        Rat t = total;
        return {false, "row " + type_label(row.first) + " has total mass " + rat_str(t)};
      }
    }
  }
  for (int m = 1; m <= horizon_; ++m) {
    for (const auto& [tk, row] : tables_.at(m)) {
      if (defaulted_.count(tk)) continue;
      for (const auto& p : permutations_of(m)) {
        WindowStructure moved = base_.relabeled_coloring(row.first, p);
        if (defaulted_.count(moved.key())) continue;
        for (const auto& [dk, cell] : row.second) {
          Rat there = value(moved, relabel_type(cell.first, p));
          if (there != cell.second)
            return {false, "not invariant: row " + type_label(row.first) + " at " +
                               diagram_label(cell.first) + " has " + rat_str(cell.second) +
                               " but image under " + tuple_str(p) + " has " + rat_str(there)};
        }
      }
    }
  }
  return {true, ""};
}

WindowMeasure merge_measures(const ColoringKernel& mu, const WindowMeasure& nu) {
  if (nu.extra().size() != 0) throw Error("BadMerge", "base measure carries an extra language");
  if (!(nu.base().lang() == mu.base().lang()))
    throw Error("LanguageMismatch", "merge over different presentations");
  if (nu.horizon() != mu.horizon()) throw Error("HorizonMismatch", "merge horizons differ");
  WindowMeasure out(mu.base_, mu.extra_, mu.horizon_);
  for (int m = 1; m <= mu.horizon_; ++m) {
    for (auto& [tk, row] : out.tables_.at(m)) {
      Rat base_mass = nu.tables_.at(m).at(tk).second.begin()->second.second;
      const auto& krow = mu.tables_.at(m).at(tk);
      for (auto& [dk, cell] : row.second) cell.second = Rat(base_mass * krow.second.at(dk).second);
    }
  }
  return out;
}

std::pair<ColoringKernel, WindowMeasure> decompose_measure(const WindowMeasure& eta) {
  ColoringKernel mu(eta.base(), eta.extra(), eta.horizon());
  WindowMeasure nu(eta.base(), Language(std::vector<Relation>{}), eta.horizon());
  for (int m = 1; m <= eta.horizon(); ++m) {
    for (const auto& [tk, row] : eta.tables_.at(m)) {
      Rat mass(0);
      for (const auto& [dk, cell] : row.second) mass += cell.second;
      nu.tables_.at(m).at(tk).second.begin()->second.second = mass;
      auto& krow = mu.tables_.at(m).at(tk);
      if (mass == 0) {
        NonRedundantQfType none(eta.extra(), m);
        krow.second.at(none.key()).second = 1;
        mu.defaulted_.insert(tk);
      } else {
        for (const auto& [dk, cell] : row.second)
          krow.second.at(dk).second = Rat(cell.second / mass);
      }
    }
  }
  return {std::move(mu), std::move(nu)};
}

std::string describe_merge(const ColoringKernel& mu, const WindowMeasure& nu, const QfFormula& f,
                           Rat* out_value) {
  if (nu.extra().size() != 0) throw Error("BadMerge", "base measure carries an extra language");
  if (nu.horizon() != mu.horizon()) throw Error("HorizonMismatch", "merge horizons differ");
  int w = std::max(1, f.max_param() + 1);
  if (w > mu.horizon()) throw Error("WindowTooLarge", "event needs window " + std::to_string(w));
  std::ostringstream os;
  Rat total(0);
  NonRedundantQfType empty_diag(Language(std::vector<Relation>{}), w);
  for (const auto& t : mu.base().labeled_types_of_size(w)) {
    Rat base_mass = nu.value(t, empty_diag);
    for (const auto& d : enumerate_nonredundant_types(mu.extra(), w)) {
      if (!atom_sat(mu.base(), t, d, f)) continue;
      Rat k = mu.value(t, d);
      Rat term = Rat(base_mass * k);
      if (term != 0)
        os << "  " << atom_label(t, d) << ": " << rat_str(base_mass) << " * " << rat_str(k)
           << " = " << rat_str(term) << "\n";
      total += term;
    }
  }
  os << "value = " << rat_str(total) << "\n";
  if (out_value) *out_value = total;
  return os.str();
}

WindowMeasure independent_binary_measure(const CanonicalPresentation& pres, int horizon,
                                         const std::map<int, Rat>& pair_probs) {
  Rat sum(0);
  for (const auto& [rel, p] : pair_probs) {
    if (pres.rel(rel).arity != 2) throw Error("BadArity", "pair probability on a non-binary class");
    sum += p;
  }
  if (sum != 1) throw Error("BadDistribution", "pair probabilities must sum to one");
  WindowMeasure out(pres, Language(std::vector<Relation>{}), horizon);
  for (int m = 1; m <= horizon; ++m) {
    NonRedundantQfType empty_diag(Language(std::vector<Relation>{}), m);
    for (const auto& t : pres.labeled_types_of_size(m)) {
      Rat v(1);
      for (const auto& pair : subsets_of_size(m, 2)) {
        auto it = pair_probs.find(t.color_rel(pair));
        if (it == pair_probs.end()) throw Error("BadDistribution", "missing pair class probability");
        v = Rat(v * it->second);
      }
      out.set_value(t, empty_diag, v);
    }
  }
  MeasureReport rep = out.check();
  if (!rep.ok) throw Error("NotProductClosed", rep.what);
  return out;
}

namespace {

std::string literal_label(const Literal& l) {
  return std::string(l.positive ? "+" : "-") + l.rel + tuple_str(l.args);
}

std::string event_label(const WindowStructure& type, const std::vector<Literal>& ls) {
  std::string s = type_label(type) + " & [";
  for (size_t i = 0; i < ls.size(); ++i) s += (i ? " " : "") + literal_label(ls[i]);
  return s + "]";
}

std::string event_key(std::vector<Literal> ls) {
  std::sort(ls.begin(), ls.end());
  std::string k;
  for (const auto& l : ls) k += literal_label(l) + ";";
  return k;
}

}  // namespace

ColoringKernel kernel_from_events(const CanonicalPresentation& base, const Language& extra,
                                  int horizon, const std::vector<EventValue>& events) {
  ColoringKernel out(base, extra, horizon);

  std::map<int, std::set<std::string>> known;
  for (int m = 1; m <= horizon; ++m)
    for (const auto& t : base.labeled_types_of_size(m)) known[m].insert(t.key());

  std::map<int, std::map<std::string, std::map<std::string, Rat>>> table;
  for (const auto& ev : events) {
    WindowStructure t = ev.type;
    base.normalize(t);
    int m = t.window();
    if (m < 1 || m > horizon)
      throw Error("BadWindow", "event type on " + std::to_string(m) + " points is outside the horizon");
    if (!known.at(m).count(t.key()))
      throw Error("UnknownType", "event over " + type_label(t) + " which is not a labeled type");
    std::set<std::pair<std::string, Tuple>> atoms_seen;
    for (const Literal& l : ev.event) {
      int rel = extra.id_of(l.rel);
      if (extra.rel(rel).arity != static_cast<int>(l.args.size()))
        throw Error("BadEvent", l.rel + " takes " + std::to_string(extra.rel(rel).arity) +
                                    " arguments, got " + tuple_str(l.args));
      if (!injective(l.args))
        throw Error("BadEvent", "literal " + literal_label(l) + " repeats a point");
      for (int v : l.args)
        if (v < 0 || v >= m)
          throw Error("BadEvent", "literal " + literal_label(l) + " leaves the window");
      if (!atoms_seen.insert({l.rel, l.args}).second)
        throw Error("BadEvent", "atom " + l.rel + tuple_str(l.args) + " appears twice");
    }
    if (ev.value < 0)
      throw Error("NegativeMass", event_label(t, ev.event) + " has mass " + rat_str(ev.value));
    if (!table[m][t.key()].emplace(event_key(ev.event), ev.value).second)
      throw Error("DuplicateEvent", event_label(t, ev.event) + " is assigned twice");
  }

  for (int m = 1; m <= horizon; ++m) {
    for (const auto& t : base.labeled_types_of_size(m)) {
      const auto mit = table.find(m);
      const std::map<std::string, Rat>* row = nullptr;
      if (mit != table.end()) {
        auto rit = mit->second.find(t.key());
        if (rit != mit->second.end()) row = &rit->second;
      }
      auto value_of = [&](const std::vector<Literal>& ls) -> const Rat& {
        if (row) {
          auto it = row->find(event_key(ls));
          if (it != row->end()) return it->second;
        }
        throw Error("MissingEvent", event_label(t, ls) + " has no assigned mass");
      };

      auto slots = nonredundant_slots(extra, m);
      std::vector<Literal> current;
      std::vector<size_t> open;
      std::function<void(size_t)> walk = [&](size_t i) {
        if (i == slots.size()) {
          const Rat& v = value_of(current);
          if (current.empty() && v != 1)
            throw Error("TotalMass", event_label(t, current) + " has mass " + rat_str(v) +
                                         " instead of 1");
          for (size_t s : open) {
            Literal pos{extra.rel(slots[s].first).name, slots[s].second, true};
            Literal neg = pos;
            neg.positive = false;
            std::vector<Literal> with_pos = current;
            with_pos.push_back(pos);
            std::vector<Literal> with_neg = current;
            with_neg.push_back(neg);
            Rat split = Rat(value_of(with_pos) + value_of(with_neg));
            if (value_of(current) != split)
              throw Error("AdditivityViolation",
                          event_label(t, current) + " has mass " + rat_str(value_of(current)) +
                              " but splitting on " + pos.rel + tuple_str(pos.args) + " gives " +
                              rat_str(split));
          }
          if (open.empty()) {
            NonRedundantQfType d(extra, m);
            for (const Literal& l : current) d.set(extra.id_of(l.rel), l.args, l.positive);
            out.set_value(t, d, v);
          }
          return;
        }
        open.push_back(i);
        walk(i + 1);
        open.pop_back();
        current.push_back({extra.rel(slots[i].first).name, slots[i].second, true});
        walk(i + 1);
        current.back().positive = false;
        walk(i + 1);
        current.pop_back();
      };
      walk(0);
    }
  }

  for (const auto& [m, rows] : table) {
    for (const auto& [tk, row] : rows) {
      WindowStructure t = base.labeled_types_of_size(m).front();
      for (const auto& cand : base.labeled_types_of_size(m))
        if (cand.key() == tk) t = cand;
      for (const auto& [ek, v] : row) {
        std::vector<Literal> ls;
        for (const auto& ev : events) {
          WindowStructure nt = ev.type;
          base.normalize(nt);
          if (nt.window() == m && nt.key() == tk && event_key(ev.event) == ek) {
            ls = ev.event;
            break;
          }
        }
        for (const auto& p : permutations_of(m)) {
          WindowStructure moved = base.relabeled_coloring(t, p);
          std::vector<Literal> mls = ls;
          for (Literal& l : mls)
            for (int& a : l.args) a = p[a];
          const Rat& there = table.at(m).at(moved.key()).at(event_key(mls));
          if (there != v)
            throw Error("NotInvariant", event_label(t, ls) + " has mass " + rat_str(v) +
                                            " but its image under " + tuple_str(p) + " has " +
                                            rat_str(there));
        }
      }
    }
  }
  return out;
}

ColoringKernel restrict_kernel(const ColoringKernel& from, const CanonicalPresentation& target) {
  auto embs = sub_presentation_embeddings(target, from.base(), 64);
  if (embs.empty())
    throw Error("NoEmbedding", "the target presentation does not embed into the source");
  ColoringKernel out(target, from.extra(), from.horizon());
  std::map<std::string, Rat> seen;
  std::set<std::string> seen_defaulted;
  bool first = true;
  for (const auto& e : embs) {
    for (int m = 1; m <= from.horizon(); ++m) {
      std::vector<NonRedundantQfType> diagrams = enumerate_nonredundant_types(from.extra(), m);
      for (const auto& p : target.labeled_types_of_size(m)) {
        WindowStructure tp = translate_coloring(from.base(), p, e);
        for (const auto& d : diagrams) {
          Rat v = from.value(tp, d);
          std::string key = std::to_string(m) + "|" + p.key() + "|" + d.key();
          if (first) {
            seen[key] = v;
            out.set_value(p, d, v);
          } else if (seen.at(key) != v) {
            throw Error("NotWellDefined", "presentation embeddings disagree at " +
                                              atom_label(p, d) + ": " + rat_str(seen.at(key)) +
                                              " vs " + rat_str(v));
          }
        }
        bool dflt = from.defaulted().count(tp.key()) != 0;
        std::string tkey = std::to_string(m) + "|" + p.key();
        if (first) {
          if (dflt) {
            seen_defaulted.insert(tkey);
            out.mark_defaulted(p);
          }
        } else if ((seen_defaulted.count(tkey) != 0) != dflt) {
          throw Error("NotWellDefined",
                      "presentation embeddings disagree on whether " + type_label(p) +
                          " is a defaulted row");
        }
      }
    }
    first = false;
  }
  return out;
}

WindowMeasure restrict_base_measure(const WindowMeasure& from,
                                    const CanonicalPresentation& target) {
  if (from.extra().size() != 0)
    throw Error("BadMeasure", "base restriction expects a measure without extra relations");
  auto embs = sub_presentation_embeddings(target, from.base(), 64);
  if (embs.empty())
    throw Error("NoEmbedding", "the target presentation does not embed into the source");
  WindowMeasure out(target, Language(std::vector<Relation>{}), from.horizon());
  std::map<std::string, Rat> seen;
  std::string mass_witness;
  bool first = true;
  for (const auto& e : embs) {
    for (int m = 1; m <= from.horizon(); ++m) {
      NonRedundantQfType none(from.extra(), m);
      NonRedundantQfType none_out(out.extra(), m);
      Rat total(0);
      for (const auto& p : target.labeled_types_of_size(m)) {
        WindowStructure tp = translate_coloring(from.base(), p, e);
        Rat v = from.value(tp, none);
        total += v;
        std::string key = std::to_string(m) + "|" + p.key();
        if (first) {
          seen[key] = v;
          out.set_value(p, none_out, v);
        } else if (seen.at(key) != v) {
          throw Error("NotWellDefined", "presentation embeddings disagree at " + type_label(p) +
                                            ": " + rat_str(seen.at(key)) + " vs " + rat_str(v));
        }
      }
      if (first && total != 1 && mass_witness.empty())
        mass_witness = "the target carries mass " + rat_str(total) + " at size " +
                       std::to_string(m);
    }
    first = false;
  }
  if (!mass_witness.empty()) throw Error("NotConcentrated", mass_witness);
  return out;
}

ColoringKernel independent_unary_kernel(const CanonicalPresentation& pres, int horizon,
                                        const Language& extra, const std::map<int, Rat>& prob_true) {
  for (const auto& r : extra.relations())
    if (r.arity != 1) throw Error("BadArity", "unary kernel with non-unary extra relation");
  ColoringKernel out(pres, extra, horizon);
  for (int m = 1; m <= horizon; ++m) {
    for (const auto& t : pres.labeled_types_of_size(m)) {
      for (const auto& d : enumerate_nonredundant_types(extra, m)) {
        Rat v(1);
        for (int rel = 0; rel < extra.size(); ++rel) {
          Rat p = prob_true.at(rel);
          for (int i = 0; i < m; ++i)
            v = Rat(v * (d.decide(rel, {i}) ? p : Rat(1 - p)));
        }
        out.set_value(t, d, v);
      }
    }
  }
  MeasureReport rep = out.check();
  if (!rep.ok) throw Error("BadDistribution", rep.what);
  return out;
}

}  // namespace relmeas
