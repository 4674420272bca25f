#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "relmeas/language.hpp"
#include "relmeas/util.hpp"

namespace relmeas {

struct Fact {
  int rel = -1;
  Tuple args;

  auto operator<=>(const Fact&) const = default;
};

enum class Mode { general, canonical };

// A finite structure on the window {0..window-1}. General mode holds an
// arbitrary set of non-redundant facts. Canonical mode colors every nonempty
// subset of size <= language max arity with exactly one relation of that
// size; the stored args fix in which argument order the subset presents it.
class WindowStructure {
 public:
  WindowStructure() = default;
  WindowStructure(Language lang, int window, Mode mode);

  const Language& lang() const { return lang_; }
  int window() const { return window_; }
  Mode mode() const { return mode_; }

  // General mode.
  void add_fact(int rel, const Tuple& args);
  void add_fact(const std::string& rel, const Tuple& args);
  bool has_fact(int rel, const Tuple& args) const;
  const std::set<Fact>& facts() const { return facts_; }

  // Canonical mode.
  void set_color(const Tuple& subset, int rel, const Tuple& args);
  const Fact& color(const Tuple& subset) const;
  int color_rel(const Tuple& subset) const;
  const std::map<Tuple, Fact>& colors() const { return colors_; }
  // Throws MissingColor/ExtraColor/BadArity on an incomplete coloring.
  void validate_canonical() const;

  // Both modes: the relation the structure asserts of an injective tuple, or
  // -1 (general mode may assert none; canonical mode always resolves through
  // the subset color).
  int relation_of(const Tuple& t) const;

  // Induced substructure on the listed elements, relabeled to 0..|t|-1 in
  // tuple order. t must be injective.
  WindowStructure substructure(const Tuple& t) const;

  // Element i becomes perm[i].
  WindowStructure relabeled(const Tuple& perm) const;

  // Lexicographically minimal relabeling over all window permutations.
  WindowStructure canonical_form() const;

  std::string key() const;  // deterministic serialization, used for ordering

  bool operator==(const WindowStructure& o) const { return key() == o.key(); }
  bool operator<(const WindowStructure& o) const { return key() < o.key(); }

 private:
  Language lang_;
  int window_ = 0;
  Mode mode_ = Mode::general;
  std::set<Fact> facts_;
  std::map<Tuple, Fact> colors_;
};

bool isomorphic(const WindowStructure& a, const WindowStructure& b);

// All injective maps t: a.window -> b.window with substructure(b, t) == a.
// Both must be general mode over the same language.
std::vector<Tuple> embeddings(const WindowStructure& a, const WindowStructure& b);

// Point permutations fixing the structure.
std::vector<Tuple> automorphisms(const WindowStructure& s);

struct Literal {
  std::string rel;
  Tuple args;
  bool positive = true;

  auto operator<=>(const Literal&) const = default;
};

// Quantifier-free window events: a disjunction of conjunctions of literals.
// The empty conjunction is true, the empty disjunction is false.
class QfFormula {
 public:
  QfFormula() = default;

  static QfFormula conj(std::vector<Literal> lits);
  static QfFormula atom(const std::string& rel, const Tuple& args, bool positive = true);

  QfFormula& add_disjunct(std::vector<Literal> lits);
  const std::vector<std::vector<Literal>>& disjuncts() const { return disjuncts_; }

  QfFormula relabeled(const Tuple& perm) const;
  int max_param() const;  // -1 when there are none

 private:
  std::vector<std::vector<Literal>> disjuncts_;
};

// Throws UnknownRelation / ParameterOutOfWindow / BadArity. Positive atoms on
// non-injective tuples are false, negated ones true.
bool eval(const WindowStructure& s, const QfFormula& f);
bool eval_literal(const WindowStructure& s, const Literal& lit);

}  // namespace relmeas
