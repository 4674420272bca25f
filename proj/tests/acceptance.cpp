// Acceptance gate: twelve end-to-end checks, one pass/fail line each.
// Exact-arithmetic checks compare rationals; the single statistical check
// pins its significance level in code.

#include <chrono>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "relmeas/error.hpp"
#include "relmeas/fixtures.hpp"
#include "relmeas/json_io.hpp"
#include "relmeas/recipe.hpp"
#include "relmeas/stats.hpp"
#include "test_support.hpp"

using namespace relmeas;
using namespace relmeas::testing;

namespace {

std::string fail(const std::string& msg) { return msg; }

// 1. The CLI freeness check: the graph presentation is free up to arity 4;
// the triangle-free presentation is stuck at the all-edges boundary.
std::string freeness_verdicts() {
  auto d = fresh_dir("acc_free");
  save_json((d / "g4.json").string(), presentation_json(graph_presentation(4)));
  auto ok = run_cli("canon free-check " + (d / "g4.json").string());
  if (ok.status != 0) return fail("graph free-check exited " + std::to_string(ok.status));
  if (ok.out != "free up to arity 4\n") return fail("graph verdict: " + ok.out);

  save_json((d / "tf.json").string(), presentation_json(triangle_free_presentation(3)));
  auto stuck = run_cli("canon free-check " + (d / "tf.json").string());
  if (stuck.status != 3) return fail("triangle-free free-check exited " + std::to_string(stuck.status));
  if (stuck.out.find("<E,E,E>") == std::string::npos) return fail("witness: " + stuck.out);
  return "";
}

// 2. Free completion of the triangle-free presentation: four ternary classes
// (three realized, one fresh), a relabeling of the graph presentation both
// ways, a fixpoint, and one extension per compatible boundary.
std::string free_completion_shape() {
  auto tf = triangle_free_presentation(3);
  auto ftf = free_completion(tf, 3);
  if (ftf.rels_of_arity(3).size() != 4) return fail("ternary class count");
  int fresh = 0;
  for (int id : ftf.rels_of_arity(3))
    if (ftf.rel(id).base.window() == 0) ++fresh;
  if (fresh != 1) return fail("fresh class count " + std::to_string(fresh));

  auto g = graph_presentation(3);
  if (!sub_presentation_embedding(ftf, g)) return fail("completion does not embed into graphs");
  if (!sub_presentation_embedding(g, ftf)) return fail("graphs do not embed into the completion");
  if (free_completion(ftf, 3).describe() != ftf.describe()) return fail("not a fixpoint");

  auto ccs = ftf.enumerate_compatible(3);
  if (ccs.size() != 4) return fail("compatible boundary count " + std::to_string(ccs.size()));
  for (const auto& cc : ccs)
    if (ftf.extensions_of(cc.boundary).size() != 1)
      return fail("a boundary without a unique extension");
  return "";
}

// 3. Minimality of the completion: it embeds into every free presentation of
// the pool that contains the triangle-free presentation.
std::string completion_minimality() {
  auto tf = triangle_free_presentation(3);
  auto ftf = free_completion(tf, 3);
  std::vector<std::pair<std::string, CanonicalPresentation>> pool;
  pool.emplace_back("completion", ftf);
  pool.emplace_back("graphs", canonicalize(full_age(Language({{"E", 2}}), 3), 3));
  pool.emplace_back("flagged graphs",
                    canonicalize(full_age(Language({{"P", 1}, {"E", 2}}), 3), 3));
  pool.emplace_back("graphs with a 3-hyperedge",
                    canonicalize(full_age(Language({{"E", 2}, {"H", 3}}), 3), 3));
  pool.emplace_back("doubled graphs",
                    canonicalize(full_age(Language({{"E", 2}, {"F", 2}}), 3), 3));

  int qualified = 0;
  for (const auto& [name, N] : pool) {
    if (!N.freeness().free) continue;
    if (!sub_presentation_embedding(tf, N)) continue;
    ++qualified;
    if (!sub_presentation_embedding(ftf, N))
      return fail("completion does not embed into " + name);
  }
  if (qualified < 4) return fail("pool too thin: " + std::to_string(qualified));
  return "";
}

// 4. Strong amalgamation: graphs and triangle-free graphs have trivial
// definable closure at bound 5; successor paths fail at bound 3 with the
// forced-identification witness.
std::string definable_closure() {
  if (!has_trivial_dcl(graph_age(5)).first) return fail("graphs at bound 5");
  if (!has_trivial_dcl(triangle_free_age(5)).first) return fail("triangle-free at bound 5");
  auto [ok, wit] = has_trivial_dcl(succ_path_age(3));
  if (ok) return fail("successor paths claim trivial dcl");
  if (wit.find("identifies points outside the base") == std::string::npos)
    return fail("witness: " + wit);
  return "";
}

// 5. The uniform graph recipe at window 3: exactly 1/8 per labeled diagram,
// and 10^5 seeded draws pass chi-square at significance 10^-3.
std::string uniform_window_law() {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  auto law = pushforward_diagrams(r, 3);
  if (law.size() != 8) return fail("diagram count " + std::to_string(law.size()));
  for (const auto& [key, p] : law)
    if (p != Rat(1, 8)) return fail(key + " has " + rat_str(p));

  const int draws = 100000;
  const int threads = 8;
  int e = g.id_of("E");
  std::vector<std::map<std::string, int>> parts(threads);
  std::vector<std::thread> workers;
  for (int t = 0; t < threads; ++t)
    workers.emplace_back([&, t] {
      for (int s = t; s < draws; s += threads) {
        auto w = sample_structure(r, 3, s);
        std::string k;
        k += w.has_fact(e, {0, 1}) ? '1' : '0';
        k += w.has_fact(e, {0, 2}) ? '1' : '0';
        k += w.has_fact(e, {1, 2}) ? '1' : '0';
        ++parts[t][k];
      }
    });
  for (auto& w : workers) w.join();
  std::map<std::string, int> observed;
  std::map<std::string, Rat> probs;
  for (int bits = 0; bits < 8; ++bits) {
    std::string k{char('0' + (bits >> 2 & 1)), char('0' + (bits >> 1 & 1)),
                  char('0' + (bits & 1))};
    probs[k] = Rat(1, 8);
    for (const auto& part : parts) {
      auto it = part.find(k);
      observed[k] += it == part.end() ? 0 : it->second;
    }
  }
  double stat = chi_square_statistic(observed, probs, draws);
  double crit = chi_square_critical(7, 0.001);
  if (!(stat < crit)) {
    std::ostringstream os;
    os << "chi-square " << stat << " >= " << crit;
    return fail(os.str());
  }
  return "";
}

// 6. Regions: preimage volumes of 100 random rational boxes scale by the
// region volume, exactly, for every labeled type of size <= 3; dropping the
// last point of a type drops the matching coordinates of its region.
std::string region_volume_scaling() {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  std::mt19937_64 rng(2024);
  for (int m = 1; m <= 3; ++m) {
    for (const auto& type : g.labeled_types_of_size(m)) {
      Region reg = region_of_type(r, type);
      for (int box = 0; box < 100; ++box) {
        Rat box_volume(1), preimage_volume(1);
        for (const auto& [sub, iv] : reg.cells) {
          int k1 = int(rng() % 64), k2 = int(rng() % 64);
          if (k1 > k2) std::swap(k1, k2);
          ++k2;
          Rat width = iv.second - iv.first;
          Rat a = Rat(iv.first + Rat(k1, 64) * width);
          Rat b = Rat(iv.first + Rat(k2, 64) * width);
          if (reg.transform(sub, Rat(k1, 64)) != a) return fail("transform mismatch");
          box_volume = Rat(box_volume * (b - a));
          preimage_volume = Rat(preimage_volume * Rat(k2 - k1, 64));
        }
        if (box_volume != Rat(preimage_volume * reg.volume()))
          return fail("volume scaling at a type of size " + std::to_string(m));
      }
      if (m > 1) {
        Tuple head(m - 1);
        for (int i = 0; i < m - 1; ++i) head[i] = i;
        Region lower = region_of_type(r, type.substructure(head));
        for (const auto& [sub, iv] : lower.cells)
          if (reg.cells.at(sub) != iv) return fail("nesting at size " + std::to_string(m));
        for (const auto& [sub, iv] : reg.cells)
          if ((sub.empty() || sub.back() < m - 1) && !lower.cells.count(sub))
            return fail("lower region dropped a coordinate");
      }
    }
  }
  return "";
}

// 7. Merge calculus: marginals of the merge, the factored event computation
// with its 1/9 spot value, and exact decompose/merge round trips for ten
// random positive laws.
std::string merge_calculus() {
  auto g = graph_presentation(3);
  auto mu = independent_unary_kernel(g, 3, red_language(), {{0, Rat(1, 3)}});
  auto nu = independent_binary_measure(
      g, 3, {{g.id_of("E"), Rat(1, 2)}, {g.id_of("E*"), Rat(1, 2)}});
  auto eta = merge_measures(mu, nu);
  if (!eta.check().ok) return fail("merge fails check");

  NonRedundantQfType none1(nu.extra(), 1);
  for (int m = 1; m <= 3; ++m)
    for (const auto& a : eta.atoms(m)) {
      NonRedundantQfType none(nu.extra(), m);
      if (eta.type_mass(a.type) != nu.value(a.type, none)) return fail("base marginal");
      Rat mass = nu.value(a.type, none);
      if (eta.value(a.type, a.extra) != Rat(mass * mu.value(a.type, a.extra)))
        return fail("kernel factor");
    }

  for (int m = 1; m <= 3; ++m)
    for (const auto& a : eta.atoms(m)) {
      std::vector<Literal> lits;
      for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
          bool e = a.type.color_rel({i, j}) == g.id_of("E");
          lits.push_back({e ? "E" : "E*", {i, j}, true});
        }
      for (int i = 0; i < m; ++i) lits.push_back({"Red", {i}, a.extra.decide(0, {i})});
      auto f = QfFormula::conj(lits);
      Rat shown;
      describe_merge(mu, nu, f, &shown);
      if (shown != eta.event_probability(f)) return fail("describe_merge at an atom");
    }
  QfFormula mixed = QfFormula::conj({{"Red", {0}, true}, {"E", {0, 1}, true}});
  mixed.add_disjunct({{"Red", {1}, true}, {"E*", {0, 1}, true}});
  Rat v;
  describe_merge(mu, nu, mixed, &v);
  if (v != eta.event_probability(mixed)) return fail("describe_merge on a disjunction");
  describe_merge(mu, nu, QfFormula::conj({{"Red", {0}, true}, {"Red", {1}, true}}), &v);
  if (v != Rat(1, 9)) return fail("spot value " + rat_str(v));

  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto rmu = pushforward_kernel(random_aut_recipe(g, red_language(), 3, seed), 3);
    auto rnu = random_graph_measure(g, seed + 100);
    auto reta = merge_measures(rmu, rnu);
    auto [mu2, nu2] = decompose_measure(reta);
    if (kernel_json(mu2) != kernel_json(rmu) || measure_json(nu2) != measure_json(rnu))
      return fail("decompose(merge) at seed " + std::to_string(seed));
    if (measure_json(merge_measures(mu2, nu2)) != measure_json(reta))
      return fail("merge(decompose) at seed " + std::to_string(seed));
  }
  return "";
}

// 8. Invariance of expansion pushforwards over the triangle-free base, and
// detection of a planted asymmetric row.
std::string expansion_invariance() {
  auto tf = triangle_free_presentation(3);
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto k = pushforward_kernel(random_aut_recipe(tf, red_language(), 3, seed), 3);
    auto rep = k.check();
    if (!rep.ok) return fail("seed " + std::to_string(seed) + ": " + rep.what);
  }

  auto k = independent_unary_kernel(tf, 2, red_language(), {{0, Rat(1, 3)}});
  WindowStructure edge;
  for (const auto& t : tf.labeled_types_of_size(2))
    if (t.color_rel({0, 1}) == tf.id_of("E")) edge = t;
  auto diags = enumerate_nonredundant_types(red_language(), 2);
  for (const auto& d : diags) {
    if (d.decide(0, {0}) && !d.decide(0, {1}))
      k.set_value(edge, d, Rat(k.value(edge, d) + Rat(1, 8)));
    if (!d.decide(0, {0}) && d.decide(0, {1}))
      k.set_value(edge, d, Rat(k.value(edge, d) - Rat(1, 8)));
  }
  auto rep = k.check();
  if (rep.ok) return fail("planted asymmetry not caught");
  if (rep.what.find("not invariant") == std::string::npos) return fail("witness: " + rep.what);
  return "";
}

// 9. Extending an expansion recipe to the free completion and restricting the
// pushforward recovers it; splitting the joint uniform-plus-coloring table
// recovers the coloring kernel.
std::string free_extension_round_trip() {
  auto tf = triangle_free_presentation(3);
  auto comp = free_completion(tf, 3);
  for (unsigned seed = 1; seed <= 10; ++seed) {
    auto f = random_aut_recipe(tf, red_language(), 3, seed);
    auto lifted = extend_to_free(f, comp);
    auto back = restrict_kernel(pushforward_kernel(lifted, 3), tf);
    if (kernel_json(back) != kernel_json(pushforward_kernel(f, 3)))
      return fail("round trip at seed " + std::to_string(seed));
  }

  auto g = graph_presentation(3);
  UniformExtensionRecipe cm(g, 3);
  auto cond = conditional_recipe(cm, joint_iid_table(cm, 3));
  auto want = independent_unary_kernel(g, 3, red_language(), {{0, Rat(1, 3)}});
  if (kernel_json(pushforward_kernel(cond, 3)) != kernel_json(want))
    return fail("conditional recipe does not reproduce the coloring kernel");
  return "";
}

// 10. Type machinery: split/merge is a bijection on all non-redundant graph
// types up to three variables, with counts checked against the slot oracle,
// and the interval codes follow their boundary conventions.
std::string type_machinery() {
  Language gl = graph_language();
  for (int n = 2; n <= 3; ++n) {
    auto types = enumerate_nonredundant_types(gl, n);
    size_t expect = size_t(1) << (n * (n - 1));
    if (types.size() != expect)
      return fail(std::to_string(n) + " vars: " + std::to_string(types.size()) + " types");
    std::set<std::string> seen;
    for (const auto& q : types) {
      auto parts = split_type(q);
      if (!(merge_type(gl, n, parts) == q)) return fail("split/merge at " + q.key());
      std::ostringstream os;
      for (const auto& [perm, part] : parts) os << tuple_str(perm) << part.key() << ";";
      if (!seen.insert(os.str()).second) return fail("split collision at " + q.key());
    }
  }

  auto fin = IntervalCode<int>::finite_list({10, 20, 30});
  if (gamma_eval(fin, Rat(1)) != 10) return fail("gamma(1) is not the first item");
  if (gamma_eval(fin, Rat(3, 10)) != 10) return fail("finite interval at 3/10");
  if (gamma_eval(fin, Rat(99, 100)) != 30) return fail("finite interval at 99/100");
  auto inf = IntervalCode<int>::infinite_list([](int i) { return i; });
  if (gamma_eval(inf, Rat(1)) != 0) return fail("infinite interval at 1");
  if (gamma_eval(inf, Rat(3, 4)) != 2) return fail("infinite interval at 3/4");
  if (gamma_eval(inf, Rat(5, 7)) != 1) return fail("infinite interval at 5/7");
  return "";
}

// 11. Building a kernel from partial-event probabilities accepts the iid
// assignment and rejects planted negative mass, broken additivity, and a
// permutation-asymmetric assignment, each with a witness.
std::string event_table_validation() {
  auto g = graph_presentation(2);
  auto events = iid_red_events(g, 2);
  auto k = kernel_from_events(g, red_language(), 2, events);
  if (!k.check().ok) return fail("iid assignment rejected");
  if (kernel_json(k) != kernel_json(independent_unary_kernel(g, 2, red_language(), {{0, Rat(1, 3)}})))
    return fail("iid assignment read off wrong");

  auto expect_kind = [&](std::vector<EventValue> evs, const std::string& kind) -> std::string {
    try {
      kernel_from_events(g, red_language(), 2, evs);
      return "no " + kind + " error";
    } catch (const Error& e) {
      if (std::string(e.kind()) != kind) return std::string("wrong kind: ") + e.what();
      if (std::string(e.what()).size() <= kind.size() + 2) return kind + " has no witness";
      return "";
    }
  };
  auto edit = [&](const std::vector<Literal>& lits, const Rat& v) {
    auto evs = iid_red_events(g, 2);
    for (auto& ev : evs)
      if (ev.type.window() == 2 && ev.type.color_rel({0, 1}) == g.id_of("E") && ev.event == lits)
        ev.value = v;
    return evs;
  };

  std::string r = expect_kind(edit({{"Red", {0}, true}}, Rat(-1, 3)), "NegativeMass");
  if (!r.empty()) return fail(r);
  r = expect_kind(edit({{"Red", {0}, true}}, Rat(1, 2)), "AdditivityViolation");
  if (!r.empty()) return fail(r);

  auto evs = iid_red_events(g, 2);
  for (auto& ev : evs) {
    if (ev.type.window() != 2 || ev.type.color_rel({0, 1}) != g.id_of("E")) continue;
    Rat v(1);
    for (const auto& lit : ev.event) {
      Rat p = lit.args[0] == 0 ? Rat(1, 4) : Rat(1, 3);
      v = Rat(v * (lit.positive ? p : Rat(1 - p)));
    }
    ev.value = v;
  }
  r = expect_kind(evs, "NotInvariant");
  if (!r.empty()) return fail(r);
  return "";
}

// 12. The sampling command is byte-deterministic across runs and thread
// counts.
std::string sampler_determinism() {
  auto d = fresh_dir("acc_sample");
  save_json((d / "gp.json").string(), presentation_json(graph_presentation(3)));
  auto er = run_cli("recipe erdos-renyi " + (d / "gp.json").string() + " -o " +
                    (d / "er.json").string());
  if (er.status != 0) return fail("erdos-renyi exited " + std::to_string(er.status));

  std::string base_args = "recipe sample " + (d / "er.json").string() +
                          " --window 3 --count 200 --seed 11";
  auto one = run_cli(base_args + " --threads 1");
  auto again = run_cli(base_args + " --threads 1");
  auto eight = run_cli(base_args + " --threads 8");
  if (one.status != 0) return fail("sample exited " + std::to_string(one.status));
  if (one.out != again.out) return fail("two runs differ");
  if (one.out != eight.out) return fail("thread counts differ");
  return "";
}

}  // namespace

int main() {
  std::vector<std::pair<std::string, std::function<std::string()>>> criteria = {
      {"freeness verdicts", freeness_verdicts},
      {"free completion shape", free_completion_shape},
      {"completion minimality", completion_minimality},
      {"definable closure", definable_closure},
      {"uniform window law", uniform_window_law},
      {"region volume scaling", region_volume_scaling},
      {"merge calculus", merge_calculus},
      {"expansion invariance", expansion_invariance},
      {"free extension round trip", free_extension_round_trip},
      {"type machinery", type_machinery},
      {"event table validation", event_table_validation},
      {"sampler determinism", sampler_determinism},
  };

  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    std::string witness;
    auto t0 = std::chrono::steady_clock::now();
    try {
      witness = criteria[i].second();
    } catch (const std::exception& e) {
      witness = std::string("threw ") + e.what();
    }
    auto secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ostringstream line;
    line << "criterion " << i + 1 << " ";
    if (witness.empty()) {
      line << "pass " << criteria[i].first;
    } else {
      line << "FAIL " << criteria[i].first << ": " << witness;
      ++failed;
    }
    line.setf(std::ios::fixed);
    line.precision(1);
    line << " (" << secs << "s)";
    std::cout << line.str() << "\n";
  }
  if (failed != 0) std::cout << failed << " criteria failed\n";
  return failed == 0 ? 0 : 1;
}
