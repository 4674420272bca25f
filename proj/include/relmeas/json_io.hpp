#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "relmeas/age.hpp"
#include "relmeas/canonical.hpp"
#include "relmeas/measure.hpp"
#include "relmeas/recipe.hpp"

namespace relmeas {

using Json = nlohmann::ordered_json;

// File round trip. Anything wrong with the bytes or their shape throws
// Error("Schema", ...) with the offending field or file quoted.
Json load_json(const std::string& path);
void save_json(const std::string& path, const Json& j);

Json language_json(const Language& l);
Language language_of_json(const Json& j);

Json structure_json(const WindowStructure& s);
WindowStructure structure_of_json(const Json& j);

Json age_json(const Age& a);
Age age_of_json(const Json& j);

// Types serialize as complete signed atom lists and carry no language of
// their own; the caller supplies it.
Json ordered_type_json(const OrderedQfType& q);
OrderedQfType ordered_type_of_json(const Json& j, const Language& lang);
Json nr_type_json(const NonRedundantQfType& q);
NonRedundantQfType nr_type_of_json(const Json& j, const Language& lang);

// A presentation is stored as its class names plus the age its classes came
// from and the restriction table. Loading re-canonicalizes the age (and
// free-completes when the stored language is larger), renames by position,
// then checks the stored table against the rebuilt one. Saving runs the same
// rebuild, so presentations that did not come from an age this way refuse to
// serialize rather than writing something unloadable.
Json presentation_json(const CanonicalPresentation& p);
CanonicalPresentation presentation_of_json(const Json& j);

// Measures and kernels share one table layout, told apart by "kind".
// base_ref is written inline; on read it may instead be a path, resolved
// against ref_dir when relative.
Json measure_json(const WindowMeasure& m);
WindowMeasure measure_of_json(const Json& j, const std::string& ref_dir = "");
Json kernel_json(const ColoringKernel& k);
ColoringKernel kernel_of_json(const Json& j, const std::string& ref_dir = "");

// Recipe files: kind "sym" for explicit per-arity tables, kind "aut" for
// per-type expansion functions over a base presentation.
Json table_recipe_json(const TableRecipe& r);
TableRecipe table_recipe_of_json(const Json& j);
Json aut_recipe_json(const AutRecipe& f);
AutRecipe aut_recipe_of_json(const Json& j, const std::string& ref_dir = "");

// Input to kernel_from_events: partial-diagram probabilities per labeled type.
struct EventsFile {
  CanonicalPresentation base;
  Language extra;
  int horizon = 0;
  std::vector<EventValue> events;
};

Json events_json(const CanonicalPresentation& base, const Language& extra, int horizon,
                 const std::vector<EventValue>& events);
EventsFile events_of_json(const Json& j, const std::string& ref_dir = "");

// "E(0,1) & !Red(1) | E*(0,1)": disjuncts split on |, literals on &.
QfFormula parse_formula(const std::string& text);

}  // namespace relmeas
