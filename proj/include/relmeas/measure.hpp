#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "relmeas/canonical.hpp"
#include "relmeas/qftype.hpp"
#include "relmeas/rational.hpp"

namespace relmeas {

struct MeasureReport {
  bool ok = true;
  std::string what;  // first violation found, with the offending atom
};

// One atom of window size m: a labeled base type (a coloring over the
// presentation, incidence-normalized) together with a complete diagram over
// the extra language. Measures and kernels are tables of atom values.
struct Atom {
  WindowStructure type;
  NonRedundantQfType extra;
};

// An exchangeable-by-intention probability assignment on windows 1..horizon:
// for each size, a value per atom. check() verifies it is a projective
// invariant probability table; nothing is assumed before that.
class WindowMeasure {
 public:
  WindowMeasure() = default;
  WindowMeasure(CanonicalPresentation base, Language extra, int horizon);

  const CanonicalPresentation& base() const { return base_; }
  const Language& extra() const { return extra_; }
  int horizon() const { return horizon_; }

  void set_value(const WindowStructure& type, const NonRedundantQfType& extra_diag, const Rat& v);
  Rat value(const WindowStructure& type, const NonRedundantQfType& extra_diag) const;
  Rat type_mass(const WindowStructure& type) const;
  std::vector<Atom> atoms(int m) const;

  // Total mass one per size, marginal consistency dropping the last point,
  // and permutation invariance.
  MeasureReport check() const;

  WindowMeasure restricted(int new_horizon) const;

  // Probability of a quantifier-free event, read off the smallest window
  // containing its parameters. Relation names resolve in the base
  // presentation first, then in the extra language.
  Rat event_probability(const QfFormula& f) const;

 private:
  friend WindowMeasure merge_measures(const class ColoringKernel&, const WindowMeasure&);
  friend std::pair<class ColoringKernel, WindowMeasure> decompose_measure(const WindowMeasure&);

  CanonicalPresentation base_;
  Language extra_;
  int horizon_ = 0;
  // size -> type key -> (type, diagram key -> (diagram, value))
  std::map<int, std::map<std::string, std::pair<WindowStructure,
      std::map<std::string, std::pair<NonRedundantQfType, Rat>>>>> tables_;
};

// Conditional law of the extra diagram given the labeled base type. Types
// that carried no mass in a decomposition get the all-negative point mass and
// are listed in defaulted().
class ColoringKernel {
 public:
  ColoringKernel() = default;
  ColoringKernel(CanonicalPresentation base, Language extra, int horizon);

  const CanonicalPresentation& base() const { return base_; }
  const Language& extra() const { return extra_; }
  int horizon() const { return horizon_; }

  void set_value(const WindowStructure& type, const NonRedundantQfType& extra_diag, const Rat& v);
  Rat value(const WindowStructure& type, const NonRedundantQfType& extra_diag) const;
  const std::set<std::string>& defaulted() const { return defaulted_; }
  void mark_defaulted(const WindowStructure& type);

  // Each row a probability distribution; invariance between rows whose types
  // are related by a permutation, skipping defaulted rows.
  MeasureReport check() const;

 private:
  friend WindowMeasure merge_measures(const ColoringKernel&, const WindowMeasure&);
  friend std::pair<ColoringKernel, WindowMeasure> decompose_measure(const WindowMeasure&);

  CanonicalPresentation base_;
  Language extra_;
  int horizon_ = 0;
  std::map<int, std::map<std::string, std::pair<WindowStructure,
      std::map<std::string, std::pair<NonRedundantQfType, Rat>>>>> tables_;
  std::set<std::string> defaulted_;
};

// merged(p, D) = nu(p) * mu(p | D-row); nu must have no extra language.
WindowMeasure merge_measures(const ColoringKernel& mu, const WindowMeasure& nu);

// Inverse of merge: nu(p) = sum_D eta(p, D), mu(p)(D) = eta(p, D) / nu(p).
// Zero-mass types get the all-negative point mass and are marked defaulted;
// merge_measures(decompose_measure(eta)) == eta holds exactly regardless.
std::pair<ColoringKernel, WindowMeasure> decompose_measure(const WindowMeasure& eta);

// The factored computation of an event probability under the merge, without
// materializing the merged table; the returned text shows the sum of
// nu-times-kernel products over the contributing atoms.
std::string describe_merge(const ColoringKernel& mu, const WindowMeasure& nu, const QfFormula& f,
                           Rat* out_value = nullptr);

// One value of the event assignment feeding kernel_from_events: a labeled
// base type, a conjunction of extra-language literals (a partial diagram),
// and its probability.
struct EventValue {
  WindowStructure type;
  std::vector<Literal> event;
  Rat value;
};

// Builds the conditional coloring law from probabilities of all partial
// events per labeled type. Validates non-negativity, unit mass on the empty
// event, additivity of every one-literal refinement, and permutation
// invariance, then reads the complete rows off. Throws NegativeMass /
// TotalMass / AdditivityViolation / NotInvariant / MissingEvent, each with a
// witness.
ColoringKernel kernel_from_events(const CanonicalPresentation& base, const Language& extra,
                                  int horizon, const std::vector<EventValue>& events);

// Transfers kernel rows from the types of `from`'s base onto the types of
// `target` along presentation embeddings target -> base. Every embedding must
// yield the same table (NotWellDefined otherwise, NoEmbedding when none).
ColoringKernel restrict_kernel(const ColoringKernel& from, const CanonicalPresentation& target);

// Same transfer for a base measure (extra language empty); additionally the
// transferred types must carry full mass (NotConcentrated otherwise).
WindowMeasure restrict_base_measure(const WindowMeasure& from,
                                    const CanonicalPresentation& target);

// Pair colors drawn independently per 2-subset; requires a single unary class
// and face-determined colors above arity 2 (the builder validates itself).
WindowMeasure independent_binary_measure(const CanonicalPresentation& pres, int horizon,
                                         const std::map<int, Rat>& pair_probs);

// Extra unary relations decided independently per (relation, point).
ColoringKernel independent_unary_kernel(const CanonicalPresentation& pres, int horizon,
                                        const Language& extra,
                                        const std::map<int, Rat>& prob_true);

// Satisfaction of a formula by one atom; base names resolve through the
// presentation so argument order matters exactly when the class is asymmetric.
bool atom_sat(const CanonicalPresentation& pres, const WindowStructure& type,
              const NonRedundantQfType& extra_diag, const QfFormula& f);

}  // namespace relmeas
