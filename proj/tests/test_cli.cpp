#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <sstream>
#include <string>

#include "relmeas/fixtures.hpp"
#include "relmeas/json_io.hpp"
#include "relmeas/measure.hpp"
#include "test_support.hpp"

using namespace relmeas;
using namespace relmeas::testing;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
}

CliResult run_cli_env(const std::string& env, const std::string& args) {
  return run_cli("2>/dev/null; " + env + " " + std::string(RELMEAS_CLI_PATH) + " " + args);
}

}  // namespace

TEST_CASE("free-check reports the arity bound or a stuck boundary") {
  auto d = fresh_dir("cli_free");
  auto g4 = run_cli("age make graphs --bound 4 -o " + (d / "g4.json").string());
  REQUIRE(g4.status == 0);
  REQUIRE(run_cli("canon build " + (d / "g4.json").string() + " -o " + (d / "g4p.json").string() +
                  " --max-arity 4")
              .status == 0);
  auto free4 = run_cli("canon free-check " + (d / "g4p.json").string());
  CHECK(free4.status == 0);
  CHECK(free4.out == "free up to arity 4\n");

  save_json((d / "tf.json").string(), presentation_json(triangle_free_presentation(3)));
  auto stuck = run_cli("canon free-check " + (d / "tf.json").string());
  CHECK(stuck.status == 3);
  CHECK(stuck.out == "not free: boundary <E,E,E> at arity 3 has no extension\n");

  auto done = run_cli("canon free-complete " + (d / "tf.json").string() + " -o " +
                      (d / "ftf.json").string());
  CHECK(done.status == 0);
  CHECK(done.out.find("classes 6 -> 7") != std::string::npos);
  CHECK(run_cli("canon free-check " + (d / "ftf.json").string()).status == 0);
}

TEST_CASE("age checks print one verdict per property") {
  auto d = fresh_dir("cli_age");
  REQUIRE(run_cli("age make succ-paths --bound 3 -o " + (d / "sp.json").string()).status == 0);
  auto r = run_cli("age check " + (d / "sp.json").string());
  CHECK(r.status == 3);
  CHECK(r.out.find("hereditary: holds") != std::string::npos);
  CHECK(r.out.find("joint embedding: holds") != std::string::npos);
  CHECK(r.out.find("amalgamation: fails") != std::string::npos);

  REQUIRE(run_cli("age make graphs --bound 3 -o " + (d / "g.json").string()).status == 0);
  auto ok = run_cli("age check " + (d / "g.json").string());
  CHECK(ok.status == 0);
  CHECK(ok.out.find("checked up to size 3") != std::string::npos);

  auto dcl = run_cli("canon dcl-check " + (d / "sp.json").string());
  CHECK(dcl.status == 3);
  CHECK(dcl.out.find("identifies points outside the base") != std::string::npos);
  CHECK(run_cli("canon dcl-check " + (d / "g.json").string()).status == 0);
}

TEST_CASE("exit codes separate schema, precondition, and property failures") {
  auto d = fresh_dir("cli_codes");
  CHECK(run_cli("lang check " + (d / "missing.json").string()).status == 1);
  spit(d / "garbage.json", "not json at all");
  CHECK(run_cli("lang check " + (d / "garbage.json").string()).status == 1);
  CHECK(run_cli("--help").status == 0);
  CHECK(run_cli("no-such-command").status == 2);

  save_json((d / "tfp.json").string(), presentation_json(triangle_free_presentation(3)));
  auto er = run_cli("recipe erdos-renyi " + (d / "tfp.json").string() + " -o " +
                    (d / "er.json").string());
  CHECK(er.status == 2);
  CHECK(er.out.find("NotFree") != std::string::npos);

  auto g = graph_presentation(3);
  auto fair = independent_binary_measure(
      g, 3, {{g.id_of("E"), Rat(1, 2)}, {g.id_of("E*"), Rat(1, 2)}});
  save_json((d / "fair.json").string(), measure_json(fair));
  save_json((d / "pure.json").string(), presentation_json(pure_set_presentation(3)));
  auto res = run_cli("measure restrict " + (d / "fair.json").string() + " --target " +
                     (d / "pure.json").string() + " -o " + (d / "out.json").string());
  CHECK(res.status == 3);
  CHECK(res.out.find("NotConcentrated") != std::string::npos);
  CHECK(res.out.find("mass 1/2 at size 2") != std::string::npos);
}

TEST_CASE("erdos-renyi pushforward lists the eight fair diagrams") {
  auto d = fresh_dir("cli_push");
  save_json((d / "gp.json").string(), presentation_json(graph_presentation(3)));
  REQUIRE(run_cli("recipe erdos-renyi " + (d / "gp.json").string() + " -o " +
                  (d / "er.json").string())
              .status == 0);
  auto push = run_cli("recipe pushforward " + (d / "er.json").string() + " --window 3");
  CHECK(push.status == 0);
  int rows = 0;
  std::istringstream lines(push.out);
  for (std::string line; std::getline(lines, line); ++rows)
    CHECK(line.substr(line.size() - 4) == " 1/8");
  CHECK(rows == 8);
}

TEST_CASE("sampling is byte-identical across runs and thread counts") {
  auto d = fresh_dir("cli_sample");
  save_json((d / "gp.json").string(), presentation_json(graph_presentation(3)));
  REQUIRE(run_cli("recipe erdos-renyi " + (d / "gp.json").string() + " -o " +
                  (d / "er.json").string())
              .status == 0);
  std::string er = (d / "er.json").string();
  REQUIRE(run_cli("recipe sample " + er + " --window 3 --count 64 --seed 5 -o " +
                  (d / "a.txt").string())
              .status == 0);
  REQUIRE(run_cli("recipe sample " + er + " --window 3 --count 64 --seed 5 -o " +
                  (d / "b.txt").string())
              .status == 0);
  REQUIRE(run_cli("recipe sample " + er + " --window 3 --count 64 --seed 5 --threads 8 -o " +
                  (d / "c.txt").string())
              .status == 0);
  REQUIRE(run_cli("recipe sample " + er + " --window 3 --count 64 --seed 6 -o " +
                  (d / "e.txt").string())
              .status == 0);
  auto a = slurp(d / "a.txt");
  CHECK(a == slurp(d / "b.txt"));
  CHECK(a == slurp(d / "c.txt"));
  CHECK(a != slurp(d / "e.txt"));
  CHECK(std::count(a.begin(), a.end(), '\n') == 64);
}

TEST_CASE("measure pipeline: build, merge, eval, decompose, round trip") {
  auto d = fresh_dir("cli_measure");
  auto g = graph_presentation(3);
  Language red({{"Red", 1}});
  save_json((d / "events.json").string(),
            events_json(g, red, 3, iid_red_events(g, 3)));
  auto built = run_cli("measure build " + (d / "events.json").string() + " -o " +
                       (d / "k.json").string());
  REQUIRE(built.status == 0);
  CHECK(run_cli("measure check " + (d / "k.json").string()).out == "ok\n");

  auto fair = independent_binary_measure(
      g, 3, {{g.id_of("E"), Rat(1, 2)}, {g.id_of("E*"), Rat(1, 2)}});
  save_json((d / "fair.json").string(), measure_json(fair));
  REQUIRE(run_cli("measure merge --kernel " + (d / "k.json").string() + " --base " +
                  (d / "fair.json").string() + " -o " + (d / "eta.json").string())
              .status == 0);
  CHECK(run_cli("measure check " + (d / "eta.json").string()).out == "ok\n");

  auto eval = run_cli("measure eval " + (d / "eta.json").string() +
                      " --event \"Red(0) & Red(1)\"");
  CHECK(eval.status == 0);
  CHECK(eval.out == "1/9\n");
  CHECK(run_cli("measure eval " + (d / "fair.json").string() + " --event \"E(0,1)\"").out ==
        "1/2\n");

  REQUIRE(run_cli("measure decompose " + (d / "eta.json").string() + " --out-kernel " +
                  (d / "k2.json").string() + " --out-base " + (d / "nu2.json").string())
              .status == 0);
  CHECK(slurp(d / "k2.json") == slurp(d / "k.json"));
  CHECK(slurp(d / "nu2.json") == slurp(d / "fair.json"));
  REQUIRE(run_cli("measure merge --kernel " + (d / "k2.json").string() + " --base " +
                  (d / "nu2.json").string() + " -o " + (d / "eta2.json").string())
              .status == 0);
  CHECK(slurp(d / "eta2.json") == slurp(d / "eta.json"));
}

TEST_CASE("verify runs the whole invariant suite") {
  auto r = run_cli("verify all");
  CHECK(r.status == 0);
  CHECK(r.out.find("all properties hold") != std::string::npos);
  CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("config file supplies defaults for unset options") {
  auto d = fresh_dir("cli_config");
  save_json((d / "gp.json").string(), presentation_json(graph_presentation(3)));
  REQUIRE(run_cli("recipe erdos-renyi " + (d / "gp.json").string() + " -o " +
                  (d / "er.json").string())
              .status == 0);
  spit(d / "cfg.json", "{\"seed\": 5, \"count\": 16}");

  auto from_env = run_cli_env("RELMEAS_CONFIG=" + (d / "cfg.json").string(),
                              "recipe sample " + (d / "er.json").string() + " --window 2");
  auto explicit_args = run_cli("recipe sample " + (d / "er.json").string() +
                               " --window 2 --seed 5 --count 16");
  CHECK(from_env.status == 0);
  CHECK(from_env.out == explicit_args.out);

  auto overridden = run_cli_env("RELMEAS_CONFIG=" + (d / "cfg.json").string(),
                                "recipe sample " + (d / "er.json").string() +
                                    " --window 2 --seed 7");
  CHECK(overridden.out != from_env.out);
}
