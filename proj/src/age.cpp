#include "relmeas/age.hpp"

#include <algorithm>
#include <sstream>

#include "relmeas/error.hpp"

namespace relmeas {

Age::Age(Language lang, int size_bound) : lang_(std::move(lang)), size_bound_(size_bound) {
  if (size_bound < 1) throw Error("BadBound", std::to_string(size_bound));
}

std::vector<const WindowStructure*> Age::members_of_size(int m) const {
  std::vector<const WindowStructure*> out;
  for (const auto& s : members_)
    if (s.window() == m) out.push_back(&s);
  return out;
}

bool Age::insert(const WindowStructure& s) {
  if (s.lang() != lang_) throw Error("LanguageMismatch", "age insert");
  if (s.window() < 1 || s.window() > size_bound_)
    throw Error("BadWindow", std::to_string(s.window()));
  WindowStructure c = s.canonical_form();
  if (!keys_.insert(c.key()).second) return false;
  members_.push_back(std::move(c));
  std::sort(members_.begin(), members_.end(), [](const auto& a, const auto& b) {
    return std::make_pair(a.window(), a.key()) < std::make_pair(b.window(), b.key());
  });
  return true;
}

bool Age::contains(const WindowStructure& s) const {
  if (s.window() < 1 || s.window() > size_bound_) return false;
  return keys_.count(s.canonical_form().key()) > 0;
}

Age age_of(const std::vector<WindowStructure>& generators, int size_bound) {
  if (generators.empty()) throw Error("EmptyAge", "no generators");
  Age age(generators.front().lang(), size_bound);
  for (const auto& g : generators) {
    if (g.mode() != Mode::general) throw Error("WrongMode", "age_of expects general mode");
    for (int m = 1; m <= std::min(size_bound, g.window()); ++m)
      for (const auto& sub : subsets_of_size(g.window(), m)) age.insert(g.substructure(sub));
  }
  return age;
}

namespace {

std::string member_desc(const WindowStructure& s) {
  std::ostringstream os;
  os << "size " << s.window() << " [";
  bool first = true;
  for (const auto& f : s.facts()) {
    if (!first) os << " ";
    first = false;
    os << s.lang().rel(f.rel).name << tuple_str(f.args);
  }
  os << "]";
  return os.str();
}

// Embeddings up to precomposition with automorphisms of a: one representative
// per coset, enough for amalgamation instances.
std::vector<Tuple> embeddings_mod_aut(const WindowStructure& a, const WindowStructure& b,
                                      const std::vector<Tuple>& auts_a) {
  std::vector<Tuple> out;
  std::set<std::string> seen;
  for (const auto& e : embeddings(a, b)) {
    std::string best;
    for (const auto& g : auts_a) {
      Tuple comp = compose(e, g);  // e o g
      std::string k = tuple_str(comp);
      if (best.empty() || k < best) best = k;
    }
    if (seen.insert(best).second) out.push_back(e);
  }
  return out;
}

// The amalgam of B and C over A glued along f, g with no facts between the
// two private sides. Points: B first, then C \ g(A).
WindowStructure free_amalgam(const WindowStructure& A, const WindowStructure& B,
                             const WindowStructure& C, const Tuple& f, const Tuple& g) {
  int b = B.window(), c = C.window(), a = A.window();
  std::vector<int> cmap(c, -1);  // C point -> amalgam point
  for (int i = 0; i < a; ++i) cmap[g[i]] = f[i];
  int next = b;
  for (int y = 0; y < c; ++y)
    if (cmap[y] < 0) cmap[y] = next++;
  WindowStructure D(B.lang(), b + c - a, Mode::general);
  for (const auto& fact : B.facts()) D.add_fact(fact.rel, fact.args);
  for (const auto& fact : C.facts()) {
    Tuple args;
    for (int y : fact.args) args.push_back(cmap[y]);
    if (!D.has_fact(fact.rel, args)) D.add_fact(fact.rel, args);
  }
  return D;
}

struct SapInstance {
  const WindowStructure* A;
  const WindowStructure* B;
  const WindowStructure* C;
  Tuple f, g;
};

// Exhaustive search for a strong amalgam: some member D with embeddings
// f': B -> D, g': C -> D agreeing over A whose images meet exactly in A.
bool strong_amalgam_exists(const Age& age, const SapInstance& in) {
  int target = in.B->window() + in.C->window() - in.A->window();
  WindowStructure fa = free_amalgam(*in.A, *in.B, *in.C, in.f, in.g);
  if (age.contains(fa)) return true;
  for (const auto& D : age.members()) {
    if (D.window() != target) continue;
    for (const auto& fp : embeddings(*in.B, D)) {
      for (const auto& gp : embeddings(*in.C, D)) {
        bool agree = true;
        for (int i = 0; i < in.A->window() && agree; ++i)
          agree = fp[in.f[i]] == gp[in.g[i]];
        if (!agree) continue;
        std::set<int> bimg(fp.begin(), fp.end());
        std::set<int> aimg;
        for (int i = 0; i < in.A->window(); ++i) aimg.insert(fp[in.f[i]]);
        bool strong = true;
        for (int y = 0; y < in.C->window() && strong; ++y)
          if (bimg.count(gp[y]) && !aimg.count(gp[y])) strong = false;
        if (strong) return true;
      }
    }
  }
  return false;
}

}  // namespace

AgeProperties check_age_properties(const Age& age) {
  AgeProperties out;

  out.hp = true;
  for (const auto& m : age.members()) {
    if (m.window() < 2) continue;
    for (int drop = 0; drop < m.window(); ++drop) {
      Tuple keep;
      for (int i = 0; i < m.window(); ++i)
        if (i != drop) keep.push_back(i);
      if (!age.contains(m.substructure(keep))) {
        out.hp = false;
        out.hp_witness = member_desc(m) + " minus point " + std::to_string(drop);
        break;
      }
    }
    if (!out.hp) break;
  }

  out.jep = true;
  const auto& mem = age.members();
  for (size_t i = 0; i < mem.size() && out.jep; ++i) {
    for (size_t j = i; j < mem.size() && out.jep; ++j) {
      if (mem[i].window() + mem[j].window() > age.size_bound()) continue;
      bool found = false;
      for (const auto& C : mem) {
        if (C.window() < std::max(mem[i].window(), mem[j].window())) continue;
        if (!embeddings(mem[i], C).empty() && !embeddings(mem[j], C).empty()) {
          found = true;
          break;
        }
      }
      if (!found) {
        out.jep = false;
        out.jep_witness = member_desc(mem[i]) + " and " + member_desc(mem[j]);
      }
    }
  }

  out.sap = true;
  std::vector<std::vector<Tuple>> auts;
  auts.reserve(mem.size());
  for (const auto& m : mem) auts.push_back(automorphisms(m));
  for (size_t ia = 0; ia < mem.size() && out.sap; ++ia) {
    for (size_t ib = 0; ib < mem.size() && out.sap; ++ib) {
      auto fs = embeddings_mod_aut(mem[ia], mem[ib], auts[ia]);
      if (fs.empty()) continue;
      for (size_t ic = ib; ic < mem.size() && out.sap; ++ic) {
        if (mem[ib].window() + mem[ic].window() - mem[ia].window() > age.size_bound()) continue;
        auto gs = embeddings_mod_aut(mem[ia], mem[ic], auts[ia]);
        for (const auto& f : fs) {
          for (const auto& g : gs) {
            SapInstance in{&mem[ia], &mem[ib], &mem[ic], f, g};
            if (!strong_amalgam_exists(age, in)) {
              out.sap = false;
              out.sap_witness = "base " + member_desc(mem[ia]) + " into " + member_desc(mem[ib]) +
                                " via " + tuple_str(f) + " and into " + member_desc(mem[ic]) +
                                " via " + tuple_str(g) +
                                "; every amalgam identifies points outside the base";
              break;
            }
          }
          if (!out.sap) break;
        }
      }
    }
  }

  return out;
}

std::pair<bool, std::string> has_trivial_dcl(const Age& age) {
  AgeProperties p = check_age_properties(age);
  return {p.sap, p.sap_witness};
}

}  // namespace relmeas
