#pragma once

#include <vector>

#include "relmeas/structure.hpp"

namespace relmeas {

// The definable expansion that trades argument repetition for extra symbols:
// each relation P and repetition pattern (an equivalence on argument slots,
// encoded as a restricted-growth string like "010") yields a relation P#s
// whose arity is the number of classes. A fact P(t) with pattern s holds iff
// P#s holds of t's distinct entries in first-occurrence order.
class NrExpansion {
 public:
  explicit NrExpansion(const Language& source);

  const Language& source() const { return source_; }
  const Language& expanded() const { return expanded_; }

  // Expanded relation id for (source rel, pattern); throws on bad pattern.
  int target_rel(int src_rel, const std::string& pattern) const;

  // Raw facts may repeat arguments; the result is a non-redundant structure
  // over the expanded language.
  WindowStructure expand_facts(int window, const std::vector<Fact>& raw) const;

  // Inverse: recovers the raw facts (sorted) from an expanded structure.
  std::vector<Fact> contract(const WindowStructure& s) const;

  static std::string pattern_of(const Tuple& t);
  static Tuple distinct_first_occurrence(const Tuple& t);

 private:
  Language source_;
  Language expanded_;
  std::vector<std::vector<std::pair<std::string, int>>> patterns_;  // per source rel
};

}  // namespace relmeas
