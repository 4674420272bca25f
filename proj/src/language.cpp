#include "relmeas/language.hpp"

#include <algorithm>

#include "relmeas/error.hpp"

namespace relmeas {

Language::Language(std::vector<Relation> rels) : rels_(std::move(rels)) {
  for (const auto& r : rels_) {
    if (r.arity < 1) throw Error("BadArity", r.name + " has arity " + std::to_string(r.arity));
    if (r.name.empty()) throw Error("BadRelation", "empty relation name");
    max_arity_ = std::max(max_arity_, r.arity);
  }
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (rels_[i].name == rels_[j].name)
        throw Error("DuplicateRelation", rels_[i].name);
  by_arity_.assign(max_arity_ + 1, {});
  for (int i = 0; i < size(); ++i) by_arity_[rels_[i].arity].push_back(i);
}

const std::vector<int>& Language::rels_of_arity(int arity) const {
  static const std::vector<int> empty;
  if (arity < 0 || arity >= static_cast<int>(by_arity_.size())) return empty;
  return by_arity_[arity];
}

int Language::id_of(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (rels_[i].name == name) return i;
  return -1;
}

int Language::require(const std::string& name) const {
  int id = id_of(name);
  if (id < 0) throw Error("UnknownRelation", name);
  return id;
}

bool disjoint_names(const Language& a, const Language& b) {
  for (const auto& r : b.relations())
    if (a.id_of(r.name) >= 0) return false;
  return true;
}

Language union_language(const Language& a, const Language& b) {
  if (!disjoint_names(a, b)) throw Error("DuplicateRelation", "language union with clashing names");
  std::vector<Relation> rels = a.relations();
  rels.insert(rels.end(), b.relations().begin(), b.relations().end());
  return Language(std::move(rels));
}

}  // namespace relmeas
