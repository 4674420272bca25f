#include "relmeas/fixtures.hpp"

namespace relmeas {

Language graph_language() { return Language({{"E", 2}}); }
Language succ_language() { return Language({{"S", 2}}); }

WindowStructure graph_of(int n, const std::vector<std::pair<int, int>>& edges) {
  WindowStructure g(graph_language(), n, Mode::general);
  for (auto [a, b] : edges) {
    g.add_fact(0, {a, b});
    g.add_fact(0, {b, a});
  }
  return g;
}

std::vector<WindowStructure> all_graphs(int n) {
  std::vector<Tuple> pairs = subsets_of_size(n, 2);
  std::vector<WindowStructure> out;
  for (uint64_t mask = 0; mask < (1ULL << pairs.size()); ++mask) {
    std::vector<std::pair<int, int>> edges;
    for (size_t i = 0; i < pairs.size(); ++i)
      if (mask >> i & 1) edges.emplace_back(pairs[i][0], pairs[i][1]);
    out.push_back(graph_of(n, edges));
  }
  return out;
}

bool has_triangle(const WindowStructure& g) {
  for (const auto& t : subsets_of_size(g.window(), 3))
    if (g.has_fact(0, {t[0], t[1]}) && g.has_fact(0, {t[1], t[2]}) && g.has_fact(0, {t[0], t[2]}))
      return true;
  return false;
}

Age graph_age(int bound) { return age_of(all_graphs(bound), bound); }

Age triangle_free_age(int bound) {
  std::vector<WindowStructure> gens;
  for (const auto& g : all_graphs(bound))
    if (!has_triangle(g)) gens.push_back(g);
  return age_of(gens, bound);
}

Age succ_path_age(int bound) {
  Language lang = succ_language();
  std::vector<Tuple> arcs = injective_tuples(bound, 2);
  std::vector<WindowStructure> gens;
  for (uint64_t mask = 0; mask < (1ULL << arcs.size()); ++mask) {
    WindowStructure g(lang, bound, Mode::general);
    std::vector<int> outd(bound, 0), ind(bound, 0);
    bool ok = true;
    for (size_t i = 0; i < arcs.size() && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      g.add_fact(0, arcs[i]);
      if (++outd[arcs[i][0]] > 1 || ++ind[arcs[i][1]] > 1) ok = false;
    }
    if (!ok) continue;
    // reject cycles: follow successors from every point
    for (int v = 0; v < bound && ok; ++v) {
      int cur = v;
      for (int steps = 0; steps <= bound; ++steps) {
        int next = -1;
        for (int w = 0; w < bound; ++w)
          if (w != cur && g.has_fact(0, {cur, w})) next = w;
        if (next < 0) break;
        cur = next;
        if (cur == v) {
          ok = false;
          break;
        }
      }
    }
    if (ok) gens.push_back(g);
  }
  return age_of(gens, bound);
}

Age pure_set_age(int bound) {
  WindowStructure bare(Language(std::vector<Relation>{}), bound, Mode::general);
  return age_of({bare}, bound);
}

namespace {

CanonicalPresentation rename_binary(CanonicalPresentation pres) {
  for (int id : pres.rels_of_arity(1)) pres.rename_relation(id, "U");
  for (int id : pres.rels_of_arity(2)) {
    bool edge = !pres.rel(id).base.facts().empty();
    pres.rename_relation(id, edge ? "E" : "E*");
  }
  return pres;
}

}  // namespace

CanonicalPresentation graph_presentation(int bound) {
  return rename_binary(canonicalize(graph_age(bound), bound));
}

CanonicalPresentation triangle_free_presentation(int bound) {
  return rename_binary(canonicalize(triangle_free_age(bound), bound));
}

CanonicalPresentation pure_set_presentation(int bound) {
  return canonicalize(pure_set_age(bound), bound);
}

}  // namespace relmeas
