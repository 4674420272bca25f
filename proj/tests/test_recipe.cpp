#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <map>
#include <set>
#include <string>
#include <vector>

#include "relmeas/error.hpp"
#include "relmeas/fixtures.hpp"
#include "relmeas/json_io.hpp"
#include "relmeas/recipe.hpp"
#include "test_support.hpp"

using namespace relmeas;
using namespace relmeas::testing;

namespace {

CoordFn const_coord(const Rat& y) {
  return [y](const Tuple&) { return y; };
}

}  // namespace

TEST_CASE("step function grid validation") {
  StepFunction fn(red_language(), 2);
  CHECK(fn.coords() == std::vector<Tuple>{{}, {0}, {1}, {0, 1}});

  CHECK_THROWS_WITH_AS(fn.set_cuts({0, 2}, {Rat(1, 2)}), doctest::Contains("BadSubset"), Error);
  CHECK_THROWS_WITH_AS(fn.set_cuts({0}, {Rat(1, 2), Rat(1, 3)}), doctest::Contains("BadCut"),
                       Error);
  CHECK_THROWS_WITH_AS(fn.set_cuts({0}, {Rat(0)}), doctest::Contains("BadCut"), Error);
  fn.set_cuts({0}, {Rat(1, 3), Rat(2, 3)});

  CHECK_THROWS_WITH_AS(fn.set_value({0, 0}, OrderedQfType(red_language(), 2)),
                       doctest::Contains("BadCell"), Error);
  CHECK_THROWS_WITH_AS(fn.set_value({0, 3, 0, 0}, OrderedQfType(red_language(), 2)),
                       doctest::Contains("BadCell"), Error);
  CHECK_THROWS_WITH_AS(fn.set_value({0, 0, 0, 0}, OrderedQfType(red_language(), 1)),
                       doctest::Contains("BadValue"), Error);

  OrderedQfType low(red_language(), 2);
  low.set(0, {0}, true);
  fn.set_value({0, 0, 0, 0}, low);
  CHECK(fn.cell_at(const_coord(Rat(1, 4))) == std::vector<int>{0, 0, 0, 0});
  CHECK(fn.cell_at(const_coord(Rat(1, 2))) == std::vector<int>{0, 1, 0, 0});
  CHECK(fn.eval(const_coord(Rat(1, 4))) == low);
  CHECK(fn.eval(const_coord(Rat(1, 2))) == OrderedQfType(red_language(), 2));
  CHECK_THROWS_WITH_AS(fn.eval(const_coord(Rat(2))), doctest::Contains("OutOfDomain"), Error);
}

TEST_CASE("table recipe unions cut lists per subset size") {
  TableRecipe t(red_language(), 3);
  t.set_cuts(2, {0, 1}, {Rat(1, 3)});
  t.set_cuts(3, {0, 1}, {Rat(1, 2)});
  t.set_cuts(3, {2}, {Rat(1, 5)});
  CHECK(t.cuts(2) == std::vector<Rat>{Rat(1, 3), Rat(1, 2)});
  CHECK(t.cuts(1) == std::vector<Rat>{Rat(1, 5)});
  CHECK(t.cuts(3).empty());
  CHECK_THROWS_WITH_AS(t.eval(4, const_coord(Rat(1, 2))), doctest::Contains("OutOfHorizon"),
                       Error);
}

TEST_CASE("uniform extension recipe of the graph presentation") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  CHECK(r.cuts(1).empty());
  CHECK(r.cuts(2) == std::vector<Rat>{Rat(1, 2)});
  CHECK(r.cuts(3).empty());

  auto diag3 = pushforward_diagrams(r, 3);
  CHECK(diag3.size() == 8);
  for (const auto& [k, v] : diag3) CHECK(v == Rat(1, 8));
  auto diag2 = pushforward_diagrams(r, 2);
  CHECK(diag2.size() == 2);
  for (const auto& [k, v] : diag2) CHECK(v == Rat(1, 2));

  auto nu = pushforward_measure(r, 3);
  CHECK(nu.check().ok);
  for (const auto& a : nu.atoms(3)) CHECK(nu.value(a.type, a.extra) == Rat(1, 8));

  auto colored = r.eval_coloring(3, const_coord(Rat(1, 4)));
  CHECK_NOTHROW(colored.validate_canonical());
  CHECK(colored.color_rel({0, 1}) == colored.color_rel({1, 2}));

  CHECK_THROWS_WITH_AS(UniformExtensionRecipe(triangle_free_presentation(3), 3),
                       doctest::Contains("NotFree"), Error);
}

TEST_CASE("regions locate types and rescale coordinates") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  auto types = g.labeled_types_of_size(3);
  WindowStructure triangle;
  for (const auto& t : types)
    if (t.color_rel({0, 1}) == g.id_of("E") && t.color_rel({0, 2}) == g.id_of("E") &&
        t.color_rel({1, 2}) == g.id_of("E"))
      triangle = t;

  Region reg = region_of_type(r, triangle);
  CHECK(reg.window == 3);
  CHECK(reg.volume() == Rat(1, 8));
  for (const auto& [sub, iv] : reg.cells) {
    if (sub.size() == 2) {
      CHECK(iv.first == Rat(1, 2));
      CHECK(iv.second == Rat(1));
    } else {
      CHECK(iv.first == Rat(0));
      CHECK(iv.second == Rat(1));
    }
  }
  CHECK(reg.transform({0, 1}, Rat(1, 2)) == Rat(3, 4));
  CHECK(reg.transform({0}, Rat(1, 2)) == Rat(1, 2));

  Region edge = region_of_type(r, triangle.substructure({0, 1}));
  for (const auto& [sub, iv] : edge.cells) CHECK(reg.cells.at(sub) == iv);

  for (uint64_t s : {1u, 2u, 3u, 4u}) {
    auto pinned = sample_coloring(r, 3, s, &reg);
    CHECK(pinned.color_rel({0, 1}) == g.id_of("E"));
    CHECK(pinned.color_rel({0, 2}) == g.id_of("E"));
    CHECK(pinned.color_rel({1, 2}) == g.id_of("E"));
    auto drawn = sample_structure(r, 3, s, &reg);
    CHECK(drawn.has_fact(drawn.lang().id_of("E"), {0, 1}));
    CHECK(drawn.has_fact(drawn.lang().id_of("E"), {1, 2}));
  }

  auto conditioned = pushforward_measure(r, 3, &reg);
  CHECK(conditioned.check().ok);
  NonRedundantQfType none(conditioned.extra(), 3);
  CHECK(conditioned.value(triangle, none) == Rat(1));
}

TEST_CASE("window sampling is deterministic in the seed") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  auto a = sample_structure(r, 3, 7);
  auto b = sample_structure(r, 3, 7);
  CHECK(a.key() == b.key());
  auto c = sample_structure(r, 3, 8);
  bool same = a.key() == c.key();
  auto d = sample_structure(r, 3, 9);
  same = same && a.key() == d.key();
  CHECK_FALSE(same);

  int edges = 0;
  for (int s = 0; s < 400; ++s) {
    auto e = sample_structure(r, 2, 1000 + s);
    if (e.has_fact(e.lang().id_of("E"), {0, 1})) ++edges;
  }
  CHECK(edges > 140);
  CHECK(edges < 260);

  auto big = sample_coloring(r, 6, 99);
  CHECK(big.window() == 6);
  CHECK_NOTHROW(big.validate_canonical());
  CHECK(sample_coloring(r, 6, 99) == big);
}

TEST_CASE("expansion sampling follows the per-type functions") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe cm(g, 3);
  AutRecipe f = iid_red_recipe(g, 3);
  WindowStructure base = sample_coloring(cm, 6, 99);

  auto a = sample_expansion(f, base, 5);
  auto b = sample_expansion(f, base, 5);
  CHECK(a.facts() == b.facts());
  auto c = sample_expansion(f, base, 6);
  CHECK_FALSE(a.facts() == c.facts());

  int reds = 0, total = 0;
  for (int s = 0; s < 400; ++s) {
    auto e = sample_expansion(f, base, 1000 + s);
    for (int i = 0; i < 6; ++i, ++total)
      if (e.has_fact(0, {i})) ++reds;
  }
  double freq = double(reds) / total;
  CHECK(freq > 0.28);
  CHECK(freq < 0.39);
}

TEST_CASE("expansion pushforward matches the independent kernel") {
  auto g = graph_presentation(3);
  AutRecipe f = iid_red_recipe(g, 3);
  auto k = pushforward_kernel(f, 3);
  CHECK(k.check().ok);
  CHECK(kernel_json(k) ==
        kernel_json(independent_unary_kernel(g, 3, red_language(), {{0, Rat(1, 3)}})));

  for (unsigned seed : {21u, 22u, 23u}) {
    auto rf = random_aut_recipe(g, red_language(), 3, seed);
    CHECK(pushforward_kernel(rf, 3).check().ok);
  }
}

TEST_CASE("free extension of an expansion restricts back to itself") {
  auto tf = triangle_free_presentation(3);
  AutRecipe f = iid_red_recipe(tf, 3);
  auto comp = free_completion(tf, 3);
  AutRecipe lifted = extend_to_free(f, comp);
  CHECK(lifted.base().size() == 7);

  auto big = pushforward_kernel(lifted, 3);
  auto back = restrict_kernel(big, tf);
  CHECK(kernel_json(back) == kernel_json(pushforward_kernel(f, 3)));

  UniformExtensionRecipe staged = extend_to_free(tf, 3);
  CHECK(staged.presentation().describe() == comp.describe());
  CHECK(pushforward_measure(staged, 3).check().ok);
}

TEST_CASE("conditional recipe splits a joint table") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe cm(g, 3);
  TableRecipe joint = joint_iid_table(cm, 3);
  AutRecipe cond = conditional_recipe(cm, joint);
  auto k = pushforward_kernel(cond, 3);
  CHECK(kernel_json(k) ==
        kernel_json(independent_unary_kernel(g, 3, red_language(), {{0, Rat(1, 3)}})));

  TableRecipe bad = joint_iid_table(cm, 3);
  StepFunction& fn = bad.fn(2);
  auto cell = fn.cell_at(const_coord(Rat(1, 4)));
  OrderedQfType q = fn.eval(const_coord(Rat(1, 4)));
  q.set(g.id_of("E"), {0, 1}, !q.decide(g.id_of("E"), {0, 1}));
  q.set(g.id_of("E*"), {0, 1}, !q.decide(g.id_of("E*"), {0, 1}));
  fn.set_value(cell, q);
  CHECK_THROWS_WITH_AS(conditional_recipe(cm, bad), doctest::Contains("NotAgreeing"), Error);
}

TEST_CASE("materialized table agrees with the staged recipe") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  TableRecipe mat = materialized_table(r);
  for (int n = 1; n <= 3; ++n) CHECK(pushforward_diagrams(mat, n) == pushforward_diagrams(r, n));
  for (uint64_t s : {5u, 6u, 7u})
    CHECK(sample_structure(mat, 3, s).key() == sample_structure(r, 3, s).key());
}

TEST_CASE("coordinate array is deterministic and order-insensitive") {
  UniformArray u(42);
  CHECK(u.zeta({0, 2}) == u.zeta({0, 2}));
  CHECK(u.zeta({0, 2}) != u.zeta({1, 2}));
  CHECK(UniformArray(43).zeta({0, 2}) != u.zeta({0, 2}));
  Rat y = u.zeta({5});
  CHECK(y >= 0);
  CHECK(y <= 1);
}

TEST_CASE("recipe json round trips") {
  auto g = graph_presentation(3);
  UniformExtensionRecipe r(g, 3);
  TableRecipe mat = materialized_table(r);
  Json jt = table_recipe_json(mat);
  // Round trip through the schema and compare evaluation behavior.
  auto back = table_recipe_of_json(jt);
  for (int n = 1; n <= 3; ++n) CHECK(pushforward_diagrams(back, n) == pushforward_diagrams(mat, n));
  CHECK(table_recipe_json(back) == jt);

  AutRecipe f = iid_red_recipe(g, 2);
  Json ja = aut_recipe_json(f);
  auto fb = aut_recipe_of_json(ja);
  CHECK(kernel_json(pushforward_kernel(fb, 2)) == kernel_json(pushforward_kernel(f, 2)));
  CHECK(aut_recipe_json(fb) == ja);
}
