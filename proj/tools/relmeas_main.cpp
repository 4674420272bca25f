#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "relmeas/error.hpp"
#include "relmeas/fixtures.hpp"
#include "relmeas/gamma.hpp"
#include "relmeas/json_io.hpp"
#include "relmeas/stats.hpp"

namespace {

using namespace relmeas;

struct Config {
  int max_arity = 3;
  int horizon = 3;
  long long count = 100000;
  unsigned long long seed = 0;
  long long cell_cap = 1000000;
};

int config_int(const Json& j, const char* name, int fallback) {
  if (!j.contains(name)) return fallback;
  if (!j.at(name).is_number_integer()) throw Error("Schema", std::string(name) + " in config");
  return j.at(name).get<int>();
}

void apply_config_file(Config& cfg) {
  const char* path = std::getenv("RELMEAS_CONFIG");
  if (!path || !*path) return;
  Json j = load_json(path);
  if (!j.is_object()) throw Error("Schema", "config must be an object");
  cfg.max_arity = config_int(j, "max_arity", cfg.max_arity);
  cfg.horizon = config_int(j, "horizon", cfg.horizon);
  cfg.count = config_int(j, "count", static_cast<int>(cfg.count));
  cfg.seed = static_cast<unsigned long long>(config_int(j, "seed", static_cast<int>(cfg.seed)));
  cfg.cell_cap = config_int(j, "cell_cap", static_cast<int>(cfg.cell_cap));
}

std::string dir_of(const std::string& path) {
  return std::filesystem::path(path).parent_path().string();
}

// Failures of the property a command set out to check exit 3; malformed input
// exits 1; everything else that throws is a precondition violation, exit 2.
bool property_kind(const std::string& kind) {
  static const std::set<std::string> kinds = {
      "NotInvariant",       "NotWellDefined", "NotConcentrated", "NegativeMass",
      "AdditivityViolation", "TotalMass",      "MissingEvent",    "NotAgreeing"};
  return kinds.count(kind) > 0;
}

Age make_age(const std::string& kind, int bound) {
  if (kind == "graphs") return graph_age(bound);
  if (kind == "triangle-free") return triangle_free_age(bound);
  if (kind == "succ-paths") return succ_path_age(bound);
  if (kind == "pure-sets") return pure_set_age(bound);
  throw Error("Schema", "unknown age kind " + kind + " (graphs, triangle-free, succ-paths, pure-sets)");
}

int run_age_check(const std::string& path) {
  Age a = age_of_json(load_json(path));
  AgeProperties p = check_age_properties(a);
  auto line = [](const char* name, bool ok, const std::string& witness) {
    std::cout << name << ": " << (ok ? "holds" : "fails " + witness) << "\n";
  };
  line("hereditary", p.hp, p.hp_witness);
  line("joint embedding", p.jep, p.jep_witness);
  line("amalgamation", p.sap, p.sap_witness);
  std::cout << "checked up to size " << a.size_bound() << "\n";
  return p.hp && p.jep && p.sap ? 0 : 3;
}

int run_free_check(const std::string& path) {
  CanonicalPresentation p = presentation_of_json(load_json(path));
  FreenessReport r = p.freeness();
  if (r.free) {
    std::cout << "free up to arity " << p.max_arity() << "\n";
    return 0;
  }
  std::cout << "not free: boundary " << r.witness << " at arity " << r.arity
            << " has no extension\n";
  return 3;
}

int run_dcl_check(const std::string& path) {
  Age a = age_of_json(load_json(path));
  auto [trivial, witness] = has_trivial_dcl(a);
  if (trivial) {
    std::cout << "definable closure trivial up to size " << a.size_bound() << "\n";
    return 0;
  }
  std::cout << "definable closure nontrivial: " << witness << "\n";
  return 3;
}

int run_measure_check(const std::string& path) {
  Json j = load_json(path);
  MeasureReport r;
  if (j.is_object() && j.contains("kind") && j.at("kind") == "kernel")
    r = kernel_of_json(j, dir_of(path)).check();
  else
    r = measure_of_json(j, dir_of(path)).check();
  if (r.ok) {
    std::cout << "ok\n";
    return 0;
  }
  std::cout << r.what << "\n";
  return 3;
}

void run_measure_restrict(const std::string& path, const std::string& target_path,
                          const std::string& out) {
  Json j = load_json(path);
  CanonicalPresentation target = presentation_of_json(load_json(target_path));
  if (j.is_object() && j.contains("kind") && j.at("kind") == "kernel")
    save_json(out, kernel_json(restrict_kernel(kernel_of_json(j, dir_of(path)), target)));
  else
    save_json(out, measure_json(restrict_base_measure(measure_of_json(j, dir_of(path)), target)));
}

int run_sample(const std::string& path, int window, unsigned long long seed, long long count,
               int threads, const std::string& base_path, const std::string& out_path) {
  Json j = load_json(path);
  std::string kind = j.is_object() && j.contains("kind") && j.at("kind").is_string()
                         ? j.at("kind").get<std::string>()
                         : "";
  std::vector<std::string> lines(static_cast<size_t>(count));
  std::function<std::string(uint64_t)> draw;
  std::optional<TableRecipe> sym;
  AutRecipe aut;
  WindowStructure base;
  if (kind == "sym") {
    sym = table_recipe_of_json(j);
    draw = [&](uint64_t s) { return sample_structure(*sym, window, s).key(); };
  } else if (kind == "aut") {
    aut = aut_recipe_of_json(j, dir_of(path));
    if (base_path.empty())
      throw Error("BadWindow", "sampling an expansion needs --base with a realization file");
    base = structure_of_json(load_json(base_path));
    draw = [&](uint64_t s) { return sample_expansion(aut, base, s).key(); };
  } else {
    throw Error("Schema", "recipe kind must be sym or aut");
  }

  auto work = [&](long long lo, long long hi) {
    for (long long i = lo; i < hi; ++i) lines[static_cast<size_t>(i)] = draw(seed + static_cast<uint64_t>(i));
  };
  if (threads <= 1) {
    work(0, count);
  } else {
    std::vector<std::thread> pool;
    long long chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      long long lo = t * chunk;
      long long hi = std::min(count, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(work, lo, hi);
    }
    for (auto& th : pool) th.join();
  }

  if (out_path.empty()) {
    for (const std::string& l : lines) std::cout << l << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw Error("Schema", "cannot write " + out_path);
    for (const std::string& l : lines) out << l << "\n";
  }
  return 0;
}

int run_pushforward(const std::string& path, int window, long long cell_cap,
                    const std::string& out_path) {
  Json j = load_json(path);
  std::string kind = j.is_object() && j.contains("kind") && j.at("kind").is_string()
                         ? j.at("kind").get<std::string>()
                         : "";
  if (kind == "sym") {
    TableRecipe r = table_recipe_of_json(j);
    std::map<std::string, Rat> rows = pushforward_diagrams(r, window, cell_cap);
    std::ostringstream os;
    for (const auto& [key, p] : rows) os << key << " " << rat_str(p) << "\n";
    if (out_path.empty()) {
      std::cout << os.str();
    } else {
      std::ofstream out(out_path);
      if (!out) throw Error("Schema", "cannot write " + out_path);
      out << os.str();
    }
    return 0;
  }
  if (kind == "aut") {
    AutRecipe f = aut_recipe_of_json(j, dir_of(path));
    Json kj = kernel_json(pushforward_kernel(f, window, cell_cap));
    if (out_path.empty())
      std::cout << kj.dump(2) << "\n";
    else
      save_json(out_path, kj);
    return 0;
  }
  throw Error("Schema", "recipe kind must be sym or aut");
}

int run_compose_region(const std::string& pres_path, int horizon, const std::string& type_path,
                       int window, unsigned long long seed, long long count) {
  CanonicalPresentation pres = presentation_of_json(load_json(pres_path));
  UniformExtensionRecipe r(pres, horizon);
  WindowStructure type = structure_of_json(load_json(type_path));
  Region reg = region_of_type(r, type);
  for (const auto& [subset, cell] : reg.cells)
    std::cout << tuple_str(subset) << " [" << rat_str(cell.first) << ", " << rat_str(cell.second)
              << ")\n";
  std::cout << "volume " << rat_str(reg.volume()) << "\n";
  for (long long i = 0; i < count; ++i)
    std::cout << sample_coloring(r, window, seed + static_cast<uint64_t>(i), &reg).key() << "\n";
  return 0;
}

int run_verify() {
  int failed = 0;
  using R = std::pair<bool, std::string>;
  auto check = [&](const std::string& name, auto fn) {
    R r;
    try {
      r = fn();
    } catch (const Error& e) {
      r = {false, e.what()};
    }
    if (r.first) {
      std::cout << "ok " << name << "\n";
    } else {
      std::cout << "FAIL " << name << (r.second.empty() ? "" : ": " + r.second) << "\n";
      ++failed;
    }
  };

  check("split/merge bijection on two points", [] {
    Language gl = graph_language();
    for (const auto& q : enumerate_nonredundant_types(gl, 2))
      if (!(merge_type(gl, 2, split_type(q)) == q)) return R{false, q.key()};
    return R{true, ""};
  });
  check("interval code boundary conventions", [] {
    auto fin = IntervalCode<int>::finite_list({10, 20, 30});
    if (gamma_eval(fin, Rat(3, 10)) != 10) return R{false, "finite 3/10"};
    if (gamma_eval(fin, Rat(1)) != 10) return R{false, "y = 1"};
    auto inf = IntervalCode<int>::infinite_list([](int i) { return i; });
    if (gamma_eval(inf, Rat(3, 4)) != 2) return R{false, "dyadic 3/4"};
    return R{true, ""};
  });
  check("graph age amalgamates", [] {
    AgeProperties p = check_age_properties(graph_age(3));
    if (!p.hp) return R{false, p.hp_witness};
    if (!p.jep) return R{false, p.jep_witness};
    if (!p.sap) return R{false, p.sap_witness};
    return R{true, ""};
  });
  check("graph presentation is free", [] {
    FreenessReport r = graph_presentation(3).freeness();
    return R{r.free, r.witness};
  });
  check("triangle-free completion is free and stable", [] {
    auto tf = triangle_free_presentation(3);
    auto done = free_completion(tf, 3);
    if (!done.freeness().free) return R{false, done.freeness().witness};
    if (free_completion(done, 3).size() != done.size()) return R{false, "completion not a fixpoint"};
    return R{true, ""};
  });
  check("uniform pushforward is uniform on three points", [] {
    UniformExtensionRecipe cm(graph_presentation(3), 3);
    auto rows = pushforward_diagrams(cm, 3);
    if (rows.size() != 8) return R{false, std::to_string(rows.size()) + " diagrams"};
    for (const auto& [key, p] : rows)
      if (p != Rat(1, 8)) return R{false, key + " has " + rat_str(p)};
    return R{true, ""};
  });
  check("independent pair measure validates", [] {
    auto rado = graph_presentation(3);
    auto mu = independent_binary_measure(
        rado, 3, {{rado.lang().require("E"), Rat(1, 2)}, {rado.lang().require("E*"), Rat(1, 2)}});
    MeasureReport r = mu.check();
    if (!r.ok) return R{false, r.what};
    if (mu.event_probability(parse_formula("E(0,1)")) != Rat(1, 2)) return R{false, "P(E(0,1))"};
    return R{true, ""};
  });
  check("merge and decompose invert each other", [] {
    auto rado = graph_presentation(3);
    auto nu = independent_binary_measure(
        rado, 3, {{rado.lang().require("E"), Rat(1, 2)}, {rado.lang().require("E*"), Rat(1, 2)}});
    auto mu = independent_unary_kernel(rado, 3, Language({{"Red", 1}}), {{0, Rat(1, 3)}});
    WindowMeasure eta = merge_measures(mu, nu);
    auto [mu2, nu2] = decompose_measure(eta);
    if (measure_json(merge_measures(mu2, nu2)) != measure_json(eta)) return R{false, "round trip"};
    return R{true, ""};
  });
  check("restriction to the same presentation is the identity", [] {
    auto rado = graph_presentation(3);
    auto mu = independent_unary_kernel(rado, 3, Language({{"Red", 1}}), {{0, Rat(1, 3)}});
    if (kernel_json(restrict_kernel(mu, rado)) != kernel_json(mu)) return R{false, "kernel"};
    auto nu = independent_binary_measure(
        rado, 3, {{rado.lang().require("E"), Rat(1, 2)}, {rado.lang().require("E*"), Rat(1, 2)}});
    if (measure_json(restrict_base_measure(nu, rado)) != measure_json(nu)) return R{false, "measure"};
    return R{true, ""};
  });
  check("sampling is a function of the seed", [] {
    UniformExtensionRecipe cm(graph_presentation(3), 3);
    std::set<std::string> keys;
    for (uint64_t s = 0; s < 20; ++s) {
      if (sample_structure(cm, 4, s).key() != sample_structure(cm, 4, s).key())
        return R{false, "seed " + std::to_string(s)};
      keys.insert(sample_structure(cm, 4, s).key());
    }
    if (keys.size() < 2) return R{false, "twenty seeds gave one draw"};
    return R{true, ""};
  });

  std::cout << (failed == 0 ? "all properties hold" : std::to_string(failed) + " properties failed")
            << "\n";
  return failed == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  Config cfg;
  int rc = 0;
  try {
    apply_config_file(cfg);

    CLI::App app{"invariant measures on finite windows of relational structures"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--seed", cfg.seed, "sampling seed");
    app.add_option("--max-arity", cfg.max_arity, "canonical language arity bound");
    app.add_option("--horizon", cfg.horizon, "largest window size");
    app.add_option("--count", cfg.count, "number of draws");
    app.add_option("--cell-cap", cfg.cell_cap, "grid enumeration limit");

    std::string in, in2, out, out2, target, kind, event, base_path;
    int window = 0;
    int threads = 1;
    int bound = 0;
    bool have_window = false;

    auto* lang = app.add_subcommand("lang", "language files");
    lang->fallthrough();
    auto* lang_check = lang->add_subcommand("check", "validate a language file");
    lang_check->fallthrough();
    lang_check->add_option("file", in)->required();
    lang_check->callback([&] {
      Language l = language_of_json(load_json(in));
      std::cout << "relations " << l.size() << ", max arity " << l.max_arity() << "\n";
    });

    auto* age = app.add_subcommand("age", "hereditary classes");
    age->fallthrough();
    auto* age_make = age->add_subcommand("make", "write a stock age file");
    age_make->fallthrough();
    age_make->add_option("kind", kind, "graphs | triangle-free | succ-paths | pure-sets")->required();
    age_make->add_option("--bound", bound, "largest member size (defaults to --horizon)");
    age_make->add_option("-o,--out", out)->required();
    age_make->callback([&] {
      save_json(out, age_json(make_age(kind, bound > 0 ? bound : cfg.horizon)));
    });
    auto* age_check = age->add_subcommand("check", "hereditary, joint embedding, amalgamation");
    age_check->fallthrough();
    age_check->add_option("file", in)->required();
    age_check->callback([&] { rc = run_age_check(in); });

    auto* canon = app.add_subcommand("canon", "canonical presentations");
    canon->fallthrough();
    auto* canon_build = canon->add_subcommand("build", "canonicalize an age file");
    canon_build->fallthrough();
    canon_build->add_option("file", in)->required();
    canon_build->add_option("-o,--out", out)->required();
    canon_build->callback([&] {
      CanonicalPresentation p = canonicalize(age_of_json(load_json(in)), cfg.max_arity);
      save_json(out, presentation_json(p));
      std::cout << "classes " << p.size() << ", max arity " << p.max_arity() << "\n";
    });
    auto* canon_free = canon->add_subcommand("free-check", "every boundary has an extension");
    canon_free->fallthrough();
    canon_free->add_option("file", in)->required();
    canon_free->callback([&] { rc = run_free_check(in); });
    auto* canon_complete = canon->add_subcommand("free-complete", "add classes until free");
    canon_complete->fallthrough();
    canon_complete->add_option("file", in)->required();
    canon_complete->add_option("-o,--out", out)->required();
    canon_complete->callback([&] {
      CanonicalPresentation p = presentation_of_json(load_json(in));
      CanonicalPresentation done = free_completion(p, cfg.max_arity);
      save_json(out, presentation_json(done));
      std::cout << "classes " << p.size() << " -> " << done.size() << "\n";
    });
    auto* canon_dcl = canon->add_subcommand("dcl-check", "strong amalgamation over every base");
    canon_dcl->fallthrough();
    canon_dcl->add_option("file", in)->required();
    canon_dcl->callback([&] { rc = run_dcl_check(in); });

    auto* measure = app.add_subcommand("measure", "window measures and kernels");
    measure->fallthrough();
    auto* m_build = measure->add_subcommand("build", "kernel from partial-event probabilities");
    m_build->fallthrough();
    m_build->add_option("file", in)->required();
    m_build->add_option("-o,--out", out)->required();
    m_build->callback([&] {
      EventsFile ev = events_of_json(load_json(in), dir_of(in));
      save_json(out, kernel_json(kernel_from_events(ev.base, ev.extra, ev.horizon, ev.events)));
    });
    auto* m_check = measure->add_subcommand("check", "projectivity, invariance, unit mass");
    m_check->fallthrough();
    m_check->add_option("file", in)->required();
    m_check->callback([&] { rc = run_measure_check(in); });
    auto* m_restrict = measure->add_subcommand("restrict", "transfer along a presentation embedding");
    m_restrict->fallthrough();
    m_restrict->add_option("file", in)->required();
    m_restrict->add_option("--target", target, "presentation file")->required();
    m_restrict->add_option("-o,--out", out)->required();
    m_restrict->callback([&] { run_measure_restrict(in, target, out); });
    auto* m_merge = measure->add_subcommand("merge", "base measure times coloring kernel");
    m_merge->fallthrough();
    m_merge->add_option("--kernel", in)->required();
    m_merge->add_option("--base", in2)->required();
    m_merge->add_option("-o,--out", out)->required();
    m_merge->callback([&] {
      ColoringKernel mu = kernel_of_json(load_json(in), dir_of(in));
      WindowMeasure nu = measure_of_json(load_json(in2), dir_of(in2));
      save_json(out, measure_json(merge_measures(mu, nu)));
    });
    auto* m_decompose = measure->add_subcommand("decompose", "split into kernel and base marginal");
    m_decompose->fallthrough();
    m_decompose->add_option("file", in)->required();
    m_decompose->add_option("--out-kernel", out)->required();
    m_decompose->add_option("--out-base", out2)->required();
    m_decompose->callback([&] {
      WindowMeasure eta = measure_of_json(load_json(in), dir_of(in));
      auto [mu, nu] = decompose_measure(eta);
      save_json(out, kernel_json(mu));
      save_json(out2, measure_json(nu));
    });
    auto* m_eval = measure->add_subcommand("eval", "probability of a quantifier-free event");
    m_eval->fallthrough();
    m_eval->add_option("file", in)->required();
    m_eval->add_option("--event", event, "e.g. \"E(0,1) & !Red(1)\"")->required();
    m_eval->callback([&] {
      WindowMeasure m = measure_of_json(load_json(in), dir_of(in));
      std::cout << rat_str(m.event_probability(parse_formula(event))) << "\n";
    });

    auto* recipe = app.add_subcommand("recipe", "step-function recipes and samplers");
    recipe->fallthrough();
    auto* r_sample = recipe->add_subcommand("sample", "seeded window draws, one key per line");
    r_sample->fallthrough();
    r_sample->add_option("file", in)->required();
    r_sample->add_option("--window", window)->required();
    r_sample->add_option("--threads", threads);
    r_sample->add_option("--base", base_path, "base realization for expansion recipes");
    r_sample->add_option("-o,--out", out);
    r_sample->callback([&] {
      rc = run_sample(in, window, cfg.seed, cfg.count, threads, base_path, out);
    });
    auto* r_push = recipe->add_subcommand("pushforward", "exact law of the window diagram");
    r_push->fallthrough();
    r_push->add_option("file", in)->required();
    r_push->add_option("--window", window)->required();
    r_push->add_option("-o,--out", out);
    r_push->callback([&] { rc = run_pushforward(in, window, cfg.cell_cap, out); });
    auto* r_er = recipe->add_subcommand("erdos-renyi", "uniform-extension recipe of a free presentation");
    r_er->fallthrough();
    r_er->add_option("file", in, "presentation file")->required();
    r_er->add_option("-o,--out", out)->required();
    r_er->callback([&] {
      CanonicalPresentation p = presentation_of_json(load_json(in));
      UniformExtensionRecipe cm(p, cfg.horizon);
      save_json(out, table_recipe_json(materialized_table(cm, cfg.cell_cap)));
    });
    auto* r_ext = recipe->add_subcommand("extend-free", "carry an expansion recipe to a free completion");
    r_ext->fallthrough();
    r_ext->add_option("file", in, "aut recipe file")->required();
    r_ext->add_option("--completion", target, "presentation file")->required();
    r_ext->add_option("-o,--out", out)->required();
    r_ext->callback([&] {
      AutRecipe f = aut_recipe_of_json(load_json(in), dir_of(in));
      CanonicalPresentation done = presentation_of_json(load_json(target));
      save_json(out, aut_recipe_json(extend_to_free(f, done)));
    });
    auto* r_region = recipe->add_subcommand("compose-region", "coordinate region of a labeled type");
    r_region->fallthrough();
    r_region->add_option("file", in, "presentation file")->required();
    r_region->add_option("--type", target, "labeled type file")->required();
    r_region->add_option("--window", window);
    r_region->callback([&] {
      have_window = r_region->count("--window") > 0;
      rc = run_compose_region(in, cfg.horizon, target, have_window ? window : 0, cfg.seed,
                              have_window ? cfg.count : 0);
    });

    auto* verify = app.add_subcommand("verify", "invariant suite");
    verify->fallthrough();
    auto* v_all = verify->add_subcommand("all", "check every library invariant");
    v_all->fallthrough();
    v_all->callback([&] { rc = run_verify(); });

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
    return rc;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    if (e.kind() == "Schema" || e.kind() == "BadRational") return 1;
    return property_kind(e.kind()) ? 3 : 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
