#pragma once

#include <map>
#include <vector>

#include "relmeas/structure.hpp"

namespace relmeas {

// Slot lists for complete quantifier-free decisions on n variables, truncated
// at the language's max arity. Ordered types decide strictly increasing
// argument tuples only; non-redundant types decide every injective tuple.
std::vector<std::pair<int, Tuple>> ordered_slots(const Language& lang, int vars);
std::vector<std::pair<int, Tuple>> nonredundant_slots(const Language& lang, int vars);

class OrderedQfType {
 public:
  OrderedQfType() = default;
  OrderedQfType(Language lang, int vars);

  const Language& lang() const { return lang_; }
  int vars() const { return vars_; }

  bool decide(int rel, const Tuple& increasing) const;
  void set(int rel, const Tuple& increasing, bool value);

  // The decision on the full tuple (0..vars-1) for a relation of that arity;
  // this is the slice samplers read.
  bool top(int rel) const;
  void set_top(int rel, bool value);

  const std::vector<bool>& bits() const { return bits_; }
  std::string key() const;
  bool operator==(const OrderedQfType& o) const { return key() == o.key(); }
  bool operator<(const OrderedQfType& o) const { return key() < o.key(); }

 private:
  int slot(int rel, const Tuple& increasing) const;
  Language lang_;
  int vars_ = 0;
  std::vector<bool> bits_;
};

class NonRedundantQfType {
 public:
  NonRedundantQfType() = default;
  NonRedundantQfType(Language lang, int vars);

  const Language& lang() const { return lang_; }
  int vars() const { return vars_; }

  bool decide(int rel, const Tuple& injective) const;
  void set(int rel, const Tuple& injective, bool value);

  const std::vector<bool>& bits() const { return bits_; }
  std::string key() const;
  bool operator==(const NonRedundantQfType& o) const { return key() == o.key(); }
  bool operator<(const NonRedundantQfType& o) const { return key() < o.key(); }

 private:
  int slot(int rel, const Tuple& injective) const;
  Language lang_;
  int vars_ = 0;
  std::vector<bool> bits_;
};

// All 2^slots ordered types, language order major, earlier slots flip slowest.
std::vector<OrderedQfType> enumerate_ordered_types(const Language& lang, int vars);

// All 2^slots non-redundant types, same bit convention.
std::vector<NonRedundantQfType> enumerate_nonredundant_types(const Language& lang, int vars);

// Variable i becomes perm[i].
NonRedundantQfType relabel_type(const NonRedundantQfType& q, const Tuple& perm);

// Decisions on the initial segment of variables.
NonRedundantQfType restrict_type(const NonRedundantQfType& q, int new_vars);

// The decomposition of a non-redundant type into one ordered type per window
// permutation: part[tau].decide(R, j) = q.decide(R, tau o j).
std::map<Tuple, OrderedQfType> split_type(const NonRedundantQfType& q);

// Inverse of split_type. Throws MissingPart / InconsistentParts.
NonRedundantQfType merge_type(const Language& lang, int vars,
                              const std::map<Tuple, OrderedQfType>& parts);

// Complete decisions of an injective tuple inside a structure.
NonRedundantQfType type_of_tuple(const WindowStructure& s, const Tuple& t);

}  // namespace relmeas
