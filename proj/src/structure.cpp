#include "relmeas/structure.hpp"

#include <algorithm>
#include <sstream>

#include "relmeas/error.hpp"

namespace relmeas {

std::vector<Tuple> subsets_of_size(int n, int k) {
  std::vector<Tuple> out;
  if (k < 0 || k > n) return out;
  Tuple cur(k);
  std::iota(cur.begin(), cur.end(), 0);
  while (true) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[i] == n - k + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < k; ++j) cur[j] = cur[j - 1] + 1;
  }
  if (k == 0) out = {Tuple{}};
  return out;
}

std::vector<Tuple> subsets_up_to(int n, int max_size) {
  std::vector<Tuple> out;
  for (int k = 1; k <= std::min(n, max_size); ++k)
    for (auto& s : subsets_of_size(n, k)) out.push_back(s);
  return out;
}

std::vector<Tuple> injective_tuples(int n, int k) {
  std::vector<Tuple> out;
  Tuple cur;
  std::vector<bool> used(n, false);
  auto rec = [&](auto&& self) -> void {
    if (static_cast<int>(cur.size()) == k) {
      out.push_back(cur);
      return;
    }
    for (int v = 0; v < n; ++v) {
      if (used[v]) continue;
      used[v] = true;
      cur.push_back(v);
      self(self);
      cur.pop_back();
      used[v] = false;
    }
  };
  if (k <= n) rec(rec);
  return out;
}

std::vector<Tuple> permutations_of(int n) { return injective_tuples(n, n); }

std::string tuple_str(const Tuple& t) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < t.size(); ++i) os << (i ? "," : "") << t[i];
  os << ")";
  return os.str();
}

WindowStructure::WindowStructure(Language lang, int window, Mode mode)
    : lang_(std::move(lang)), window_(window), mode_(mode) {
  if (window < 0) throw Error("BadWindow", std::to_string(window));
}

void WindowStructure::add_fact(int rel, const Tuple& args) {
  if (mode_ != Mode::general) throw Error("WrongMode", "add_fact on canonical structure");
  if (rel < 0 || rel >= lang_.size()) throw Error("UnknownRelation", std::to_string(rel));
  if (static_cast<int>(args.size()) != lang_.rel(rel).arity)
    throw Error("BadArity", lang_.rel(rel).name + tuple_str(args));
  for (int a : args)
    if (a < 0 || a >= window_) throw Error("ParameterOutOfWindow", tuple_str(args));
  if (!injective(args)) throw Error("RedundantFact", lang_.rel(rel).name + tuple_str(args));
  facts_.insert(Fact{rel, args});
}

void WindowStructure::add_fact(const std::string& rel, const Tuple& args) {
  add_fact(lang_.require(rel), args);
}

bool WindowStructure::has_fact(int rel, const Tuple& args) const {
  return facts_.count(Fact{rel, args}) > 0;
}

void WindowStructure::set_color(const Tuple& subset, int rel, const Tuple& args) {
  if (mode_ != Mode::canonical) throw Error("WrongMode", "set_color on general structure");
  if (rel < 0 || rel >= lang_.size()) throw Error("UnknownRelation", std::to_string(rel));
  if (static_cast<int>(subset.size()) != lang_.rel(rel).arity)
    throw Error("BadArity", lang_.rel(rel).name + tuple_str(subset));
  if (sorted_set(args) != subset)
    throw Error("BadIncidence", lang_.rel(rel).name + tuple_str(args));
  colors_[subset] = Fact{rel, args};
}

const Fact& WindowStructure::color(const Tuple& subset) const {
  auto it = colors_.find(subset);
  if (it == colors_.end()) throw Error("MissingColor", tuple_str(subset));
  return it->second;
}

int WindowStructure::color_rel(const Tuple& subset) const { return color(subset).rel; }

void WindowStructure::validate_canonical() const {
  if (mode_ != Mode::canonical) throw Error("WrongMode", "validate_canonical");
  for (const auto& s : subsets_up_to(window_, lang_.max_arity())) {
    auto it = colors_.find(s);
    if (it == colors_.end()) throw Error("MissingColor", tuple_str(s));
    if (lang_.rel(it->second.rel).arity != static_cast<int>(s.size()))
      throw Error("BadArity", tuple_str(s));
  }
  for (const auto& [s, f] : colors_)
    if (sorted_set(s) != s || s.empty() || static_cast<int>(s.size()) > lang_.max_arity() ||
        s.back() >= window_)
      throw Error("ExtraColor", tuple_str(s));
}

int WindowStructure::relation_of(const Tuple& t) const {
  if (!injective(t)) throw Error("RedundantTuple", tuple_str(t));
  if (mode_ == Mode::canonical) return color(sorted_set(t)).rel;
  int found = -1;
  for (int r : lang_.rels_of_arity(static_cast<int>(t.size())))
    if (has_fact(r, t)) {
      if (found >= 0) throw Error("NotCanonical", tuple_str(t));
      found = r;
    }
  return found;
}

WindowStructure WindowStructure::substructure(const Tuple& t) const {
  if (!injective(t)) throw Error("RedundantTuple", tuple_str(t));
  for (int a : t)
    if (a < 0 || a >= window_) throw Error("ParameterOutOfWindow", tuple_str(t));
  std::map<int, int> pos;
  for (size_t i = 0; i < t.size(); ++i) pos[t[i]] = static_cast<int>(i);
  WindowStructure out(lang_, static_cast<int>(t.size()), mode_);
  if (mode_ == Mode::general) {
    for (const auto& f : facts_) {
      bool inside = std::all_of(f.args.begin(), f.args.end(),
                                [&](int a) { return pos.count(a) > 0; });
      if (!inside) continue;
      Tuple args;
      for (int a : f.args) args.push_back(pos[a]);
      out.facts_.insert(Fact{f.rel, args});
    }
  } else {
    for (const auto& [s, f] : colors_) {
      bool inside = std::all_of(s.begin(), s.end(), [&](int a) { return pos.count(a) > 0; });
      if (!inside) continue;
      Tuple sub;
      for (int a : s) sub.push_back(pos[a]);
      std::sort(sub.begin(), sub.end());
      Tuple args;
      for (int a : f.args) args.push_back(pos[a]);
      out.colors_[sub] = Fact{f.rel, args};
    }
  }
  return out;
}

WindowStructure WindowStructure::relabeled(const Tuple& perm) const {
  if (static_cast<int>(perm.size()) != window_ || !injective(perm))
    throw Error("BadPermutation", tuple_str(perm));
  WindowStructure out(lang_, window_, mode_);
  if (mode_ == Mode::general) {
    for (const auto& f : facts_) {
      Tuple args;
      for (int a : f.args) args.push_back(perm.at(a));
      out.facts_.insert(Fact{f.rel, args});
    }
  } else {
    for (const auto& [s, f] : colors_) {
      Tuple sub;
      for (int a : s) sub.push_back(perm.at(a));
      std::sort(sub.begin(), sub.end());
      Tuple args;
      for (int a : f.args) args.push_back(perm.at(a));
      out.colors_[sub] = Fact{f.rel, args};
    }
  }
  return out;
}

WindowStructure WindowStructure::canonical_form() const {
  WindowStructure best = *this;
  std::string best_key = key();
  for (const auto& p : permutations_of(window_)) {
    WindowStructure cand = relabeled(p);
    std::string k = cand.key();
    if (k < best_key) {
      best_key = k;
      best = cand;
    }
  }
  return best;
}

std::string WindowStructure::key() const {
  std::ostringstream os;
  os << window_ << (mode_ == Mode::general ? "g" : "c") << "|";
  if (mode_ == Mode::general) {
    for (const auto& f : facts_) os << f.rel << tuple_str(f.args) << ";";
  } else {
    for (const auto& [s, f] : colors_) os << tuple_str(s) << "=" << f.rel << tuple_str(f.args) << ";";
  }
  return os.str();
}

bool isomorphic(const WindowStructure& a, const WindowStructure& b) {
  if (a.window() != b.window()) return false;
  return a.canonical_form().key() == b.canonical_form().key();
}

std::vector<Tuple> embeddings(const WindowStructure& a, const WindowStructure& b) {
  std::vector<Tuple> out;
  for (const auto& t : injective_tuples(b.window(), a.window()))
    if (b.substructure(t) == a) out.push_back(t);
  return out;
}

std::vector<Tuple> automorphisms(const WindowStructure& s) {
  std::vector<Tuple> out;
  for (const auto& p : permutations_of(s.window()))
    if (s.relabeled(p) == s) out.push_back(p);
  return out;
}

QfFormula QfFormula::conj(std::vector<Literal> lits) {
  QfFormula f;
  f.disjuncts_.push_back(std::move(lits));
  return f;
}

QfFormula QfFormula::atom(const std::string& rel, const Tuple& args, bool positive) {
  return conj({Literal{rel, args, positive}});
}

QfFormula& QfFormula::add_disjunct(std::vector<Literal> lits) {
  disjuncts_.push_back(std::move(lits));
  return *this;
}

QfFormula QfFormula::relabeled(const Tuple& perm) const {
  QfFormula out;
  for (const auto& d : disjuncts_) {
    std::vector<Literal> lits;
    for (const auto& l : d) {
      Tuple args;
      for (int a : l.args) args.push_back(perm.at(a));
      lits.push_back(Literal{l.rel, args, l.positive});
    }
    out.disjuncts_.push_back(std::move(lits));
  }
  return out;
}

int QfFormula::max_param() const {
  int m = -1;
  for (const auto& d : disjuncts_)
    for (const auto& l : d)
      for (int a : l.args) m = std::max(m, a);
  return m;
}

bool eval_literal(const WindowStructure& s, const Literal& lit) {
  int rel = s.lang().require(lit.rel);
  if (static_cast<int>(lit.args.size()) != s.lang().rel(rel).arity)
    throw Error("BadArity", lit.rel + tuple_str(lit.args));
  for (int a : lit.args)
    if (a < 0 || a >= s.window()) throw Error("ParameterOutOfWindow", lit.rel + tuple_str(lit.args));
  if (!injective(lit.args)) return !lit.positive;
  bool holds;
  if (s.mode() == Mode::general)
    holds = s.has_fact(rel, lit.args);
  else
    holds = s.relation_of(lit.args) == rel;
  return lit.positive ? holds : !holds;
}

bool eval(const WindowStructure& s, const QfFormula& f) {
  for (const auto& d : f.disjuncts()) {
    bool all = true;
    for (const auto& l : d)
      if (!eval_literal(s, l)) {
        all = false;
        break;
      }
    if (all) return true;
  }
  return false;
}

}  // namespace relmeas
