#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace relmeas {

using Tuple = std::vector<int>;

inline bool injective(const Tuple& t) {
  for (size_t i = 0; i < t.size(); ++i)
    for (size_t j = i + 1; j < t.size(); ++j)
      if (t[i] == t[j]) return false;
  return true;
}

inline Tuple sorted_set(const Tuple& t) {
  Tuple s = t;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

// All subsets of {0..n-1} of the given size, lexicographic.
std::vector<Tuple> subsets_of_size(int n, int k);

// All nonempty subsets of {0..n-1} of size <= max_size, by size then lex.
std::vector<Tuple> subsets_up_to(int n, int max_size);

// All injective k-tuples over {0..n-1}, lexicographic.
std::vector<Tuple> injective_tuples(int n, int k);

// All strictly increasing k-tuples over {0..n-1} (= subsets_of_size).
inline std::vector<Tuple> increasing_tuples(int n, int k) { return subsets_of_size(n, k); }

std::vector<Tuple> permutations_of(int n);

inline Tuple identity_perm(int n) {
  Tuple p(n);
  std::iota(p.begin(), p.end(), 0);
  return p;
}

inline Tuple compose(const Tuple& f, const Tuple& g) {  // (f.g)(i) = f[g[i]]
  Tuple r(g.size());
  for (size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
  return r;
}

inline Tuple inverse_perm(const Tuple& p) {
  Tuple r(p.size());
  for (size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
  return r;
}

// Entries of t at the index positions in ix.
inline Tuple select(const Tuple& t, const Tuple& ix) {
  Tuple r;
  r.reserve(ix.size());
  for (int i : ix) r.push_back(t.at(i));
  return r;
}

std::string tuple_str(const Tuple& t);

// splitmix64; the deterministic scalar mixer behind seeded draws.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace relmeas
