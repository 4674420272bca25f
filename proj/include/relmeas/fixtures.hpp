#pragma once

#include <utility>
#include <vector>

#include "relmeas/age.hpp"
#include "relmeas/canonical.hpp"

namespace relmeas {

// Stock inputs: graphs (symmetric E, stored as facts both ways), triangle-free
// graphs, disjoint unions of successor paths, and bare sets.
Language graph_language();
Language succ_language();

WindowStructure graph_of(int n, const std::vector<std::pair<int, int>>& edges);
std::vector<WindowStructure> all_graphs(int n);
bool has_triangle(const WindowStructure& g);

Age graph_age(int bound);
Age triangle_free_age(int bound);
Age succ_path_age(int bound);
Age pure_set_age(int bound);

// Presentations with the binary classes renamed E (adjacent) and E* (not).
CanonicalPresentation graph_presentation(int bound);
CanonicalPresentation triangle_free_presentation(int bound);
CanonicalPresentation pure_set_presentation(int bound);

}  // namespace relmeas
