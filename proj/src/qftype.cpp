#include "relmeas/qftype.hpp"

#include <algorithm>
#include <sstream>

#include "relmeas/error.hpp"

namespace relmeas {

namespace {

std::vector<std::pair<int, Tuple>> slots_impl(const Language& lang, int vars, bool ordered) {
  std::vector<std::pair<int, Tuple>> out;
  for (int k = 1; k <= std::min(vars, lang.max_arity()); ++k) {
    auto tuples = ordered ? increasing_tuples(vars, k) : injective_tuples(vars, k);
    for (int rel : lang.rels_of_arity(k))
      for (const auto& t : tuples) out.emplace_back(rel, t);
  }
  return out;
}

int find_slot(const std::vector<std::pair<int, Tuple>>& slots, int rel, const Tuple& t) {
  for (size_t i = 0; i < slots.size(); ++i)
    if (slots[i].first == rel && slots[i].second == t) return static_cast<int>(i);
  return -1;
}

}  // namespace

std::vector<std::pair<int, Tuple>> ordered_slots(const Language& lang, int vars) {
  return slots_impl(lang, vars, true);
}

std::vector<std::pair<int, Tuple>> nonredundant_slots(const Language& lang, int vars) {
  return slots_impl(lang, vars, false);
}

OrderedQfType::OrderedQfType(Language lang, int vars) : lang_(std::move(lang)), vars_(vars) {
  bits_.assign(ordered_slots(lang_, vars_).size(), false);
}

int OrderedQfType::slot(int rel, const Tuple& t) const {
  int i = find_slot(ordered_slots(lang_, vars_), rel, t);
  if (i < 0) throw Error("BadSlot", lang_.rel(rel).name + tuple_str(t));
  return i;
}

bool OrderedQfType::decide(int rel, const Tuple& t) const { return bits_.at(slot(rel, t)); }
void OrderedQfType::set(int rel, const Tuple& t, bool v) { bits_.at(slot(rel, t)) = v; }

bool OrderedQfType::top(int rel) const {
  Tuple full(vars_);
  std::iota(full.begin(), full.end(), 0);
  return decide(rel, full);
}

void OrderedQfType::set_top(int rel, bool v) {
  Tuple full(vars_);
  std::iota(full.begin(), full.end(), 0);
  set(rel, full, v);
}

std::string OrderedQfType::key() const {
  std::ostringstream os;
  os << "o" << vars_ << ":";
  for (bool b : bits_) os << (b ? '1' : '0');
  return os.str();
}

NonRedundantQfType::NonRedundantQfType(Language lang, int vars)
    : lang_(std::move(lang)), vars_(vars) {
  bits_.assign(nonredundant_slots(lang_, vars_).size(), false);
}

int NonRedundantQfType::slot(int rel, const Tuple& t) const {
  int i = find_slot(nonredundant_slots(lang_, vars_), rel, t);
  if (i < 0) throw Error("BadSlot", lang_.rel(rel).name + tuple_str(t));
  return i;
}

bool NonRedundantQfType::decide(int rel, const Tuple& t) const { return bits_.at(slot(rel, t)); }
void NonRedundantQfType::set(int rel, const Tuple& t, bool v) { bits_.at(slot(rel, t)) = v; }

std::string NonRedundantQfType::key() const {
  std::ostringstream os;
  os << "n" << vars_ << ":";
  for (bool b : bits_) os << (b ? '1' : '0');
  return os.str();
}

std::vector<OrderedQfType> enumerate_ordered_types(const Language& lang, int vars) {
  auto slots = ordered_slots(lang, vars);
  size_t n = slots.size();
  if (n > 24) throw Error("TooManySlots", std::to_string(n));
  std::vector<OrderedQfType> out;
  out.reserve(size_t{1} << n);
  for (size_t m = 0; m < (size_t{1} << n); ++m) {
    OrderedQfType t(lang, vars);
    for (size_t i = 0; i < n; ++i)
      if ((m >> (n - 1 - i)) & 1) t.set(slots[i].first, slots[i].second, true);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<NonRedundantQfType> enumerate_nonredundant_types(const Language& lang, int vars) {
  auto slots = nonredundant_slots(lang, vars);
  size_t n = slots.size();
  if (n > 24) throw Error("TooManySlots", std::to_string(n));
  std::vector<NonRedundantQfType> out;
  out.reserve(size_t{1} << n);
  for (size_t m = 0; m < (size_t{1} << n); ++m) {
    NonRedundantQfType t(lang, vars);
    for (size_t i = 0; i < n; ++i)
      if ((m >> (n - 1 - i)) & 1) t.set(slots[i].first, slots[i].second, true);
    out.push_back(std::move(t));
  }
  return out;
}

NonRedundantQfType relabel_type(const NonRedundantQfType& q, const Tuple& perm) {
  Tuple inv = inverse_perm(perm);
  NonRedundantQfType out(q.lang(), q.vars());
  for (const auto& [rel, inj] : nonredundant_slots(q.lang(), q.vars()))
    out.set(rel, inj, q.decide(rel, select(inv, inj)));
  return out;
}

NonRedundantQfType restrict_type(const NonRedundantQfType& q, int new_vars) {
  if (new_vars < 0 || new_vars > q.vars()) throw Error("BadSlot", "restriction widens the type");
  NonRedundantQfType out(q.lang(), new_vars);
  for (const auto& [rel, inj] : nonredundant_slots(q.lang(), new_vars)) out.set(rel, inj, q.decide(rel, inj));
  return out;
}

std::map<Tuple, OrderedQfType> split_type(const NonRedundantQfType& q) {
  std::map<Tuple, OrderedQfType> parts;
  for (const auto& tau : permutations_of(q.vars())) {
    OrderedQfType p(q.lang(), q.vars());
    for (const auto& [rel, inc] : ordered_slots(q.lang(), q.vars()))
      p.set(rel, inc, q.decide(rel, select(tau, inc)));
    parts.emplace(tau, std::move(p));
  }
  return parts;
}

NonRedundantQfType merge_type(const Language& lang, int vars,
                              const std::map<Tuple, OrderedQfType>& parts) {
  auto perms = permutations_of(vars);
  if (parts.size() != perms.size()) throw Error("MissingPart", std::to_string(parts.size()));
  NonRedundantQfType q(lang, vars);
  std::map<std::pair<int, Tuple>, bool> seen;
  for (const auto& tau : perms) {
    auto it = parts.find(tau);
    if (it == parts.end()) throw Error("MissingPart", tuple_str(tau));
    const auto& p = it->second;
    if (p.vars() != vars) throw Error("BadSlot", "part arity mismatch");
    for (const auto& [rel, inc] : ordered_slots(lang, vars)) {
      Tuple target = select(tau, inc);
      bool v = p.decide(rel, inc);
      auto k = std::make_pair(rel, target);
      auto [pos, fresh] = seen.emplace(k, v);
      if (!fresh && pos->second != v)
        throw Error("InconsistentParts", lang.rel(rel).name + tuple_str(target));
      q.set(rel, target, v);
    }
  }
  return q;
}

NonRedundantQfType type_of_tuple(const WindowStructure& s, const Tuple& t) {
  if (!injective(t)) throw Error("RedundantTuple", tuple_str(t));
  for (int a : t)
    if (a < 0 || a >= s.window()) throw Error("ParameterOutOfWindow", tuple_str(t));
  NonRedundantQfType q(s.lang(), static_cast<int>(t.size()));
  for (const auto& [rel, inj] : nonredundant_slots(s.lang(), static_cast<int>(t.size()))) {
    Tuple args = select(t, inj);
    bool holds = s.mode() == Mode::general ? s.has_fact(rel, args) : s.relation_of(args) == rel;
    q.set(rel, inj, holds);
  }
  return q;
}

}  // namespace relmeas
