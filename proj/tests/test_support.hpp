#pragma once

// Shared fixtures for the test binaries: scratch directories, a CLI driver,
// and seeded random generators for recipes and measures.

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "relmeas/fixtures.hpp"
#include "relmeas/json_io.hpp"

#ifdef RELMEAS_CLI_PATH
#include <sys/wait.h>
#endif

namespace relmeas::testing {

inline std::filesystem::path fresh_dir(const std::string& tag) {
  auto dir = std::filesystem::temp_directory_path() / ("relmeas_" + tag);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

#ifdef RELMEAS_CLI_PATH

struct CliResult {
  int status = -1;
  std::string out;
};

inline CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(RELMEAS_CLI_PATH) + " " + args + " 2>&1";
  CliResult r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  std::array<char, 4096> buf;
  size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  int rc = pclose(p);
  if (WIFEXITED(rc)) r.status = WEXITSTATUS(rc);
  return r;
}

#endif

// Expansion recipe with cuts drawn from a fixed rational pool and uniformly
// random cell values, one independent step function per labeled type.
inline AutRecipe random_aut_recipe(const CanonicalPresentation& base, const Language& extra,
                                   int horizon, uint64_t seed) {
  static const Rat pool[] = {Rat(1, 4), Rat(1, 3), Rat(1, 2), Rat(2, 3), Rat(3, 4)};
  std::mt19937_64 rng(seed);
  AutRecipe f(base, extra, horizon);
  for (int m = 1; m <= horizon; ++m) {
    for (const WindowStructure& t : f.types_of_size(m)) {
      StepFunction& sf = f.at(t);
      std::vector<Tuple> coords = sf.coords();
      std::vector<int> radix;
      for (const Tuple& c : coords) {
        bool cut = rng() % 2 == 0;
        if (cut) sf.set_cuts(c, {pool[rng() % 5]});
        radix.push_back(cut ? 2 : 1);
      }
      std::vector<int> cell(coords.size(), 0);
      while (true) {
        OrderedQfType v(extra, m);
        for (const auto& [rel, inc] : ordered_slots(extra, m))
          if (rng() % 2 == 0) v.set(rel, inc, true);
        sf.set_value(cell, v);
        size_t d = 0;
        for (; d < cell.size(); ++d) {
          if (cell[d] + 1 < radix[d]) {
            ++cell[d];
            break;
          }
          cell[d] = 0;
        }
        if (d == cell.size()) break;
      }
    }
  }
  return f;
}

// Exchangeable graph law at horizon 3 with strictly positive mass on every
// labeled diagram: per-orbit masses at three points, pair marginal built in.
inline WindowMeasure random_graph_measure(const CanonicalPresentation& rado, uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return static_cast<int>(lo + rng() % (hi - lo + 1)); };
  int e = rado.lang().require("E");
  Language none{std::vector<Relation>{}};
  while (true) {
    Rat t(pick(1, 6), 24);
    Rat d(pick(1, 4), 24);
    Rat o(pick(1, 4), 24);
    Rat z = 1 - t - 3 * d - 3 * o;
    if (!(z > 0)) continue;
    Rat p = t + 2 * d + o;
    if (!(p > 0 && p < 1)) continue;

    WindowMeasure nu(rado, none, 3);
    nu.set_value(rado.labeled_types_of_size(1).front(), NonRedundantQfType(none, 1), Rat(1));
    for (const WindowStructure& ty : rado.labeled_types_of_size(2))
      nu.set_value(ty, NonRedundantQfType(none, 2), ty.color_rel({0, 1}) == e ? p : 1 - p);
    for (const WindowStructure& ty : rado.labeled_types_of_size(3)) {
      int edges = 0;
      for (const Tuple& pair : subsets_of_size(3, 2))
        if (ty.color_rel(pair) == e) ++edges;
      Rat mass = edges == 3 ? t : edges == 2 ? d : edges == 1 ? o : z;
      nu.set_value(ty, NonRedundantQfType(none, 3), mass);
    }
    return nu;
  }
}

inline Language red_language() { return Language({{"Red", 1}}); }

// iid Red(1/3) expansion: every step function cuts each singleton coordinate
// at 1/3 and paints Red on the low cell.
inline AutRecipe iid_red_recipe(const CanonicalPresentation& pres, int horizon) {
  AutRecipe f(pres, red_language(), horizon);
  for (int m = 1; m <= horizon; ++m) {
    for (const auto& t : f.types_of_size(m)) {
      StepFunction& fn = f.at(t);
      for (int i = 0; i < m; ++i) fn.set_cuts({i}, {Rat(1, 3)});
      auto coords = fn.coords();
      std::vector<std::vector<int>> cells{{}};
      for (const auto& sub : coords) {
        int n = sub.size() == 1 ? 2 : 1;
        std::vector<std::vector<int>> next;
        for (const auto& c : cells)
          for (int k = 0; k < n; ++k) {
            auto cc = c;
            cc.push_back(k);
            next.push_back(cc);
          }
        cells = next;
      }
      for (const auto& c : cells) {
        OrderedQfType q(red_language(), m);
        for (size_t i = 0; i < coords.size(); ++i)
          if (coords[i].size() == 1) q.set(0, coords[i], c[i] == 0);
        fn.set_value(c, q);
      }
    }
  }
  return f;
}

// Joint table over base classes plus Red: the uniform-extension grid refined
// by a 1/3 cut per singleton, base decisions copied from the staged recipe at
// cell midpoints, Red painted on the low singleton cells.
inline TableRecipe joint_iid_table(const UniformExtensionRecipe& cm, int horizon) {
  const auto& pres = cm.presentation();
  Language joint_lang = union_language(pres.lang(), red_language());
  int red_id = pres.lang().size();
  TableRecipe joint(joint_lang, horizon);
  for (int n = 1; n <= horizon; ++n) {
    StepFunction& fn = joint.fn(n);
    for (const auto& sub : fn.coords()) {
      std::set<Rat> cs;
      if (!sub.empty()) {
        auto base = cm.cuts(static_cast<int>(sub.size()));
        cs.insert(base.begin(), base.end());
      }
      if (sub.size() == 1) cs.insert(Rat(1, 3));
      if (!cs.empty()) fn.set_cuts(sub, {cs.begin(), cs.end()});
    }
    auto coords = fn.coords();
    std::vector<std::vector<Rat>> bounds;
    for (const auto& sub : coords) {
      std::vector<Rat> b{Rat(0)};
      auto it = fn.cut_lists.find(sub);
      if (it != fn.cut_lists.end()) b.insert(b.end(), it->second.begin(), it->second.end());
      b.push_back(Rat(1));
      bounds.push_back(b);
    }
    std::vector<size_t> idx(coords.size(), 0);
    while (true) {
      std::map<Tuple, Rat> mid;
      std::vector<int> cell;
      for (size_t i = 0; i < coords.size(); ++i) {
        mid[coords[i]] = Rat((bounds[i][idx[i]] + bounds[i][idx[i] + 1]) / 2);
        cell.push_back(static_cast<int>(idx[i]));
      }
      OrderedQfType bq = cm.eval(n, [&](const Tuple& s) { return mid.at(s); });
      OrderedQfType q(joint_lang, n);
      for (const auto& [rel, inc] : ordered_slots(pres.lang(), n))
        q.set(rel, inc, bq.decide(rel, inc));
      for (size_t i = 0; i < coords.size(); ++i)
        if (coords[i].size() == 1) q.set(red_id, coords[i], mid.at(coords[i]) < Rat(1, 3));
      joint.set_value(n, cell, q);
      size_t d = 0;
      for (; d < idx.size(); ++d) {
        if (idx[d] + 2 < bounds[d].size()) {
          ++idx[d];
          break;
        }
        idx[d] = 0;
      }
      if (d == idx.size()) break;
    }
  }
  return joint;
}

// Probabilities of every partial Red-assignment under iid Red(1/3), the input
// format of kernel_from_events and `measure build`.
inline std::vector<EventValue> iid_red_events(const CanonicalPresentation& base, int horizon) {
  std::vector<EventValue> out;
  for (int m = 1; m <= horizon; ++m) {
    for (const auto& type : base.labeled_types_of_size(m)) {
      std::vector<int> state(m, 0);
      while (true) {
        EventValue ev{type, {}, Rat(1)};
        for (int i = 0; i < m; ++i) {
          if (state[i] == 1) {
            ev.event.push_back({"Red", {i}, true});
            ev.value *= Rat(1, 3);
          } else if (state[i] == 2) {
            ev.event.push_back({"Red", {i}, false});
            ev.value *= Rat(2, 3);
          }
        }
        out.push_back(std::move(ev));
        int i = 0;
        while (i < m && state[i] == 2) state[i++] = 0;
        if (i == m) break;
        ++state[i];
      }
    }
  }
  return out;
}

// The age of every fully symmetric structure on `bound` points, one generator
// per subset of (relation, point-set) incidence slots.
inline Age full_age(const Language& lang, int bound) {
  std::vector<std::pair<int, Tuple>> slots;
  for (int r = 0; r < lang.size(); ++r)
    for (const auto& s : subsets_of_size(bound, lang.rel(r).arity)) slots.push_back({r, s});
  std::vector<WindowStructure> gens;
  for (uint64_t mask = 0; mask < (uint64_t(1) << slots.size()); ++mask) {
    WindowStructure s(lang, bound, Mode::general);
    for (size_t i = 0; i < slots.size(); ++i)
      if (mask >> i & 1) {
        Tuple t = slots[i].second;
        do s.add_fact(slots[i].first, t);
        while (std::next_permutation(t.begin(), t.end()));
      }
    gens.push_back(s);
  }
  return age_of(gens, bound);
}

}  // namespace relmeas::testing
