#include "relmeas/nonredundant.hpp"

#include <algorithm>
#include <map>

#include "relmeas/error.hpp"

namespace relmeas {
namespace {

// Restricted growth strings of length n: s[0] = 0 and each later digit is at
// most one past the running maximum. They enumerate slot equivalences.
void rgs_rec(std::string& cur, int n, int max_used, std::vector<std::string>& out) {
  if (static_cast<int>(cur.size()) == n) {
    out.push_back(cur);
    return;
  }
  for (int d = 0; d <= max_used + 1; ++d) {
    cur.push_back(static_cast<char>('0' + d));
    rgs_rec(cur, n, std::max(max_used, d), out);
    cur.pop_back();
  }
}

std::vector<std::string> rgs_of_length(int n) {
  std::vector<std::string> out;
  std::string cur;
  cur.push_back('0');
  rgs_rec(cur, n, 0, out);
  return out;
}

int classes_of(const std::string& pattern) {
  int mx = 0;
  for (char c : pattern) mx = std::max(mx, c - '0');
  return mx + 1;
}

}  // namespace

std::string NrExpansion::pattern_of(const Tuple& t) {
  std::map<int, int> cls;
  std::string out;
  for (int v : t) {
    auto it = cls.find(v);
    if (it == cls.end()) it = cls.emplace(v, static_cast<int>(cls.size())).first;
    out.push_back(static_cast<char>('0' + it->second));
  }
  return out;
}

Tuple NrExpansion::distinct_first_occurrence(const Tuple& t) {
  Tuple out;
  for (int v : t)
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  return out;
}

NrExpansion::NrExpansion(const Language& source) : source_(source) {
  std::vector<Relation> rels;
  patterns_.resize(source_.size());
  for (int r = 0; r < source_.size(); ++r) {
    const Relation& rel = source_.rel(r);
    for (const std::string& pat : rgs_of_length(rel.arity)) {
      int id = static_cast<int>(rels.size());
      rels.push_back({rel.name + "#" + pat, classes_of(pat)});
      patterns_[r].emplace_back(pat, id);
    }
  }
  expanded_ = Language(rels);
}

int NrExpansion::target_rel(int src_rel, const std::string& pattern) const {
  if (src_rel < 0 || src_rel >= source_.size()) throw Error("UnknownRelation", "bad source relation id");
  for (const auto& [pat, id] : patterns_[src_rel])
    if (pat == pattern) return id;
  throw Error("BadPattern", "no pattern " + pattern + " for " + source_.rel(src_rel).name);
}

WindowStructure NrExpansion::expand_facts(int window, const std::vector<Fact>& raw) const {
  WindowStructure out(expanded_, window, Mode::general);
  for (const Fact& f : raw) {
    if (f.rel < 0 || f.rel >= source_.size()) throw Error("UnknownRelation", "bad relation id in raw fact");
    if (static_cast<int>(f.args.size()) != source_.rel(f.rel).arity)
      throw Error("BadArity", "raw fact arity mismatch for " + source_.rel(f.rel).name);
    int target = target_rel(f.rel, pattern_of(f.args));
    Tuple args = distinct_first_occurrence(f.args);
    if (!out.has_fact(target, args)) out.add_fact(target, args);
  }
  return out;
}

std::vector<Fact> NrExpansion::contract(const WindowStructure& s) const {
  if (s.mode() != Mode::general) throw Error("NotGeneral", "contract expects a general-mode structure");
  std::vector<Fact> out;
  for (const Fact& f : s.facts()) {
    int src = -1;
    std::string pat;
    for (int r = 0; r < source_.size() && src < 0; ++r)
      for (const auto& [p, id] : patterns_[r])
        if (id == f.rel) {
          src = r;
          pat = p;
          break;
        }
    if (src < 0) throw Error("UnknownRelation", "structure not over the expanded language");
    Tuple raw_args;
    for (char c : pat) raw_args.push_back(f.args[c - '0']);
    out.push_back({src, raw_args});
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace relmeas
