#pragma once

#include <string>
#include <vector>

namespace relmeas {

struct Relation {
  std::string name;
  int arity = 0;

  bool operator==(const Relation&) const = default;
};

// A finite relational signature. Declaration order is the language order used
// by every enumeration downstream, so it is part of the identity.
class Language {
 public:
  Language() = default;
  explicit Language(std::vector<Relation> rels);

  int size() const { return static_cast<int>(rels_.size()); }
  const Relation& rel(int id) const { return rels_.at(id); }
  const std::vector<Relation>& relations() const { return rels_; }

  // Largest declared arity; 0 for the empty language.
  int max_arity() const { return max_arity_; }

  // Ids of relations with the given arity, in declaration order.
  const std::vector<int>& rels_of_arity(int arity) const;

  // -1 if absent.
  int id_of(const std::string& name) const;
  int require(const std::string& name) const;

  bool operator==(const Language&) const = default;

 private:
  std::vector<Relation> rels_;
  std::vector<std::vector<int>> by_arity_;
  int max_arity_ = 0;
};

// True when no relation name occurs in both.
bool disjoint_names(const Language& a, const Language& b);

// Concatenation, a's relations first. Throws on name clash.
Language union_language(const Language& a, const Language& b);

}  // namespace relmeas
