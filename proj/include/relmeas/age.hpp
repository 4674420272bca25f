#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relmeas/structure.hpp"

namespace relmeas {

// A hereditary class of finite structures up to isomorphism, cut off at
// size_bound. Members are stored as canonical forms, general mode.
class Age {
 public:
  Age() = default;
  Age(Language lang, int size_bound);

  const Language& lang() const { return lang_; }
  int size_bound() const { return size_bound_; }
  const std::vector<WindowStructure>& members() const { return members_; }
  std::vector<const WindowStructure*> members_of_size(int m) const;

  // Inserts the canonical form if new; returns whether it was new.
  bool insert(const WindowStructure& s);
  bool contains(const WindowStructure& s) const;

 private:
  Language lang_;
  int size_bound_ = 0;
  std::vector<WindowStructure> members_;
  std::set<std::string> keys_;
};

// All induced substructures of the generators up to size_bound. The result is
// closed under induced substructures by construction.
Age age_of(const std::vector<WindowStructure>& generators, int size_bound);

struct AgeProperties {
  bool hp = false;
  bool jep = false;
  bool sap = false;
  std::string hp_witness;   // set when the property fails
  std::string jep_witness;
  std::string sap_witness;
};

// Bounded exhaustive checks: verdicts mean "no counterexample within
// size_bound", with the witness identifying the first failure found.
AgeProperties check_age_properties(const Age& age);

// Strong amalgamation at the age's bound; equivalent to definable-closure
// triviality for the ultrahomogeneous limit. witness (when non-trivial)
// names the amalgamation instance every solution of which merges points.
std::pair<bool, std::string> has_trivial_dcl(const Age& age);

}  // namespace relmeas
