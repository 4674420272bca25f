#pragma once

#include <functional>
#include <map>
#include <memory>
#include <vector>

#include "relmeas/canonical.hpp"
#include "relmeas/gamma.hpp"
#include "relmeas/measure.hpp"
#include "relmeas/qftype.hpp"

namespace relmeas {

// Coordinate access for one tuple: the uniform value attached to the SET of
// entries at the index positions I (I = {} addresses the global coordinate).
using CoordFn = std::function<Rat(const Tuple&)>;

// A piecewise-constant function [0,1]^P(vars) -> ordered qf types over lang:
// per subset coordinate an ascending cut list in (0,1), and a value per grid
// cell. Unset cells give the all-negative type. Cell indices follow coords()
// order: the empty set first, then nonempty subsets by size and lex.
struct StepFunction {
  Language lang;
  int vars = 0;
  std::map<Tuple, std::vector<Rat>> cut_lists;
  std::map<std::vector<int>, OrderedQfType> values;

  StepFunction() = default;
  StepFunction(Language lang, int vars);

  std::vector<Tuple> coords() const;
  void set_cuts(const Tuple& subset, std::vector<Rat> cut_points);
  void set_value(const std::vector<int>& cell, OrderedQfType value);
  std::vector<int> cell_at(const CoordFn& coord) const;
  OrderedQfType eval(const CoordFn& coord) const;
};

// A family of step functions f_n, n = 1..horizon, from [0,1]^P(n) to ordered
// qf types. Sampling reads only the full-tuple decisions of each value; the
// cut lists expose the grid on which every f_n is constant, per subset size.
class Recipe {
 public:
  virtual ~Recipe() = default;

  const Language& lang() const { return lang_; }
  int horizon() const { return horizon_; }

  virtual OrderedQfType eval(int n, const CoordFn& coord) const = 0;
  virtual std::vector<Rat> cuts(int subset_size) const = 0;

 protected:
  Recipe(Language lang, int horizon);
  Language lang_;
  int horizon_ = 0;
};

// Explicit grids, one step function per window size.
class TableRecipe : public Recipe {
 public:
  TableRecipe(Language lang, int horizon);

  void set_cuts(int n, const Tuple& subset, std::vector<Rat> cut_points);
  void set_value(int n, const std::vector<int>& cell, OrderedQfType value);
  // Coordinate order used by set_value cell vectors.
  std::vector<Tuple> coords_of(int n) const;
  const StepFunction& fn(int n) const;
  StepFunction& fn(int n);

  OrderedQfType eval(int n, const CoordFn& coord) const override;
  std::vector<Rat> cuts(int subset_size) const override;

 private:
  std::vector<StepFunction> fns_;
};

// The staged uniform-extension recipe of a free presentation: each subset in
// turn is colored by an extension of its boundary, chosen by the interval
// code of the subset's own coordinate. Requires freeness.
class UniformExtensionRecipe : public Recipe {
 public:
  UniformExtensionRecipe(CanonicalPresentation pres, int horizon);

  const CanonicalPresentation& presentation() const { return pres_; }

  OrderedQfType eval(int n, const CoordFn& coord) const override;
  std::vector<Rat> cuts(int subset_size) const override;

  // The full staged coloring of 0..n-1, not just the top decision.
  WindowStructure eval_coloring(int n, const CoordFn& coord) const;

 private:
  CanonicalPresentation pres_;
  std::vector<std::set<int>> counts_;  // realized extension-list sizes per arity
  // Extension lists per arity, keyed by boundary signature; filled at
  // construction so sampling never re-derives them.
  std::vector<std::map<std::string, std::vector<int>>> ext_table_;
};

// Free-completes the presentation and returns the uniform-extension recipe of
// the completion.
UniformExtensionRecipe extend_to_free(const CanonicalPresentation& pres, int max_arity);

// Step functions indexed by the labeled types of a base presentation, giving
// expansions by a disjoint extra language: the diagram of a tuple is read
// from the function of the tuple's type. Every function defaults to the
// constant all-negative type.
class AutRecipe {
 public:
  AutRecipe() = default;
  AutRecipe(CanonicalPresentation base, Language extra, int horizon);

  const CanonicalPresentation& base() const { return base_; }
  const Language& extra() const { return extra_; }
  int horizon() const { return horizon_; }

  StepFunction& at(const WindowStructure& type);
  const StepFunction& at(const WindowStructure& type) const;
  std::vector<WindowStructure> types_of_size(int m) const;

  OrderedQfType eval(const WindowStructure& type, const CoordFn& coord) const;

 private:
  CanonicalPresentation base_;
  Language extra_;
  int horizon_ = 0;
  std::map<std::string, std::pair<WindowStructure, StepFunction>> fns_;
};

// Copies each type's function onto the translated type of the completion;
// types of the completion with no preimage keep the constant all-negative
// default. The completion must be free and contain the recipe's base.
AutRecipe extend_to_free(const AutRecipe& f, const CanonicalPresentation& completion);

// Deterministic uniform coordinates: one dyadic value per point set, indexed
// by (seed, set) only, so draws agree across orderings and thread counts.
class UniformArray {
 public:
  explicit UniformArray(uint64_t seed) : seed_(seed) {}
  Rat zeta(const Tuple& set) const;

 private:
  uint64_t seed_;
};

// The product cell of coordinate space a labeled type occupies under the
// staged recipe, one interval per subset of its window.
struct Region {
  int window = 0;
  std::map<Tuple, std::pair<Rat, Rat>> cells;

  Rat volume() const;
  // The affine rescaling of one coordinate into its interval.
  Rat transform(const Tuple& set, const Rat& y) const;
};

Region region_of_type(const UniformExtensionRecipe& r, const WindowStructure& type);

// One draw on the window; general mode over the recipe's language. A pin
// remaps the coordinates inside its region, so the sampled structure extends
// the pinned type.
WindowStructure sample_structure(const Recipe& r, int window, uint64_t seed,
                                 const Region* pin = nullptr);

// Staged draw of a full coloring; canonical mode over the presentation.
WindowStructure sample_coloring(const UniformExtensionRecipe& r, int window, uint64_t seed,
                                const Region* pin = nullptr);

// One expansion draw over a fixed realization of the base on the window (a
// canonical coloring); general mode over the extra language.
WindowStructure sample_expansion(const AutRecipe& f, const WindowStructure& base_realization,
                                 uint64_t seed);

// Exact distribution of the complete diagram of a window draw, computed by
// enumerating the refined product grid; keys are diagram keys.
std::map<std::string, Rat> pushforward_diagrams(const Recipe& r, int window,
                                                long long cell_cap = 1000000);

// Exact distribution over labeled types per window size, from the product of
// per-subset extension counts; with a pin, the law conditioned on its type.
WindowMeasure pushforward_measure(const UniformExtensionRecipe& r, int horizon,
                                  const Region* pin = nullptr);

// Exact conditional law of the expansion diagram per labeled type.
ColoringKernel pushforward_kernel(const AutRecipe& f, int horizon, long long cell_cap = 1000000);

// Splits a joint recipe over base+extra into per-type expansion functions by
// rescaling each type's coordinate region to the unit cube. The joint
// recipe's base-language top decisions must agree with the uniform-extension
// recipe on every cell of the common grid refinement.
AutRecipe conditional_recipe(const UniformExtensionRecipe& cm, const TableRecipe& joint,
                             long long cell_cap = 1000000);

// Rewrites the staged uniform-extension recipe as explicit step functions on
// the grid induced by its extension counts; evaluation agrees everywhere.
TableRecipe materialized_table(const UniformExtensionRecipe& r, long long cell_cap = 1000000);

}  // namespace relmeas
