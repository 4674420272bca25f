#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "relmeas/age.hpp"
#include "relmeas/structure.hpp"

namespace relmeas {

// One symbol of a canonical presentation. `rep` is a canonical-mode coloring
// on `arity` points over the presentation's own language whose full-subset
// fact is (this relation, identity); it fixes the argument convention. `auts`
// is the group of position permutations under which incidence tuples are
// equivalent, and `reorder` maps each position permutation d to the relation
// realized by a d-reordered tuple.
struct PresRelation {
  std::string name;
  int arity = 0;
  WindowStructure rep;
  std::vector<Tuple> auts;
  std::map<Tuple, int> reorder;
  // Labeled diagram over the source language the symbol came from; window 0
  // for symbols introduced by free completion.
  WindowStructure base;
};

// A compatible collection on n points: a coloring of all proper subsets that
// glues correctly. `parts[i]` is the relation on the face omitting point i.
struct CompatibleCollection {
  WindowStructure boundary;
  std::vector<int> parts;
};

struct FreenessReport {
  bool free = true;
  int arity = 0;           // arity of the failing boundary, if any
  std::string witness;     // face description of a boundary with no extension
};

class CanonicalPresentation {
 public:
  CanonicalPresentation() = default;

  const Language& lang() const { return lang_; }
  int max_arity() const { return max_arity_; }
  int size() const { return static_cast<int>(rels_.size()); }
  const PresRelation& rel(int id) const;
  int id_of(const std::string& name) const;
  std::vector<int> rels_of_arity(int arity) const;

  // Construction, one relation at a time in language order.
  void add_relation(PresRelation r);
  void rename_relation(int id, const std::string& name);

  // Members are the representative colorings, one per relation.
  WindowStructure member(int rel_id) const { return rel(rel_id).rep; }

  // Incidence normalization: replaces each fact's tuple by the least
  // equivalent one under the relation's aut group.
  Fact normalize_fact(const Fact& f) const;
  void normalize(WindowStructure& s) const;
  WindowStructure canon_coloring(const WindowStructure& s) const;
  WindowStructure relabeled_coloring(const WindowStructure& s, const Tuple& perm) const;
  std::vector<Tuple> coloring_auts(const WindowStructure& s) const;

  // True when every fact agrees with its relation's representative on all
  // proper sub-subsets.
  bool glues(const WindowStructure& s, std::string* why = nullptr) const;
  // Same agreement test for one candidate fact against s's colors.
  bool fact_fits(const WindowStructure& s, const Fact& f) const;

  // The coloring induced on a point subset, relabeled to 0..|subset|-1 in
  // increasing order; covers the proper faces only.
  WindowStructure boundary_at(const WindowStructure& s, const Tuple& subset) const;

  // Relation realized by an arbitrary ordering of a colored subset.
  int relation_at(const WindowStructure& s, const Tuple& ordered) const;

  // Pullback coloring of an injective tuple: the labeled type it realizes.
  WindowStructure labeled_type(const WindowStructure& s, const Tuple& t) const;
  std::vector<WindowStructure> labeled_types_of_size(int m) const;

  // restrict(R, I): the relation on the sub-face of R's representative at
  // index positions I.
  int restrict_relation(int rel_id, const Tuple& index_set) const;
  std::vector<std::tuple<int, Tuple, int>> restriction_table() const;

  // All proper-subset colorings on n points, up to isomorphism.
  std::vector<CompatibleCollection> enumerate_compatible(int n) const;
  // Top relations (with an aligning incidence) extending a boundary.
  std::vector<int> extensions_of(const WindowStructure& boundary) const;

  FreenessReport freeness() const;

  std::string describe() const;

 private:
  friend CanonicalPresentation free_completion(const CanonicalPresentation&, int);
  std::vector<WindowStructure> raw_boundaries(int n) const;

  Language lang_;
  int max_arity_ = 0;
  std::vector<PresRelation> rels_;
  std::map<std::string, int> by_name_;
};

// Canonical presentation of an ultrahomogeneous age: one relation per
// isomorphism class of members, arities 1..bound.
CanonicalPresentation canonicalize(const Age& age, int bound);

// Canonical presentation of a single finite structure: one relation per
// automorphism orbit of injective tuples, arities 1..bound.
CanonicalPresentation canonicalize(const WindowStructure& s, int bound);

// Adds a fresh relation for every boundary class with no extension, stage by
// stage up to max_arity, so the result is free.
CanonicalPresentation free_completion(const CanonicalPresentation& p, int max_arity);

// Relation-symbol embedding witnessing that every member of `sub` lifts
// uniquely to a member of `super`; empty when there is none.
// Rewrites a coloring's relation ids through rel_map and renormalizes the
// facts in the target presentation.
WindowStructure translate_coloring(const CanonicalPresentation& target, const WindowStructure& s,
                                   const std::map<int, int>& rel_map);

// All relation maps sub -> super carrying each representative to an equally
// symmetric coloring of super, up to the limit; order is deterministic.
std::vector<std::map<int, int>> sub_presentation_embeddings(const CanonicalPresentation& sub,
                                                            const CanonicalPresentation& super,
                                                            std::size_t limit = 64);

std::optional<std::map<int, int>> sub_presentation_embedding(
    const CanonicalPresentation& sub, const CanonicalPresentation& super);

}  // namespace relmeas
