#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "afplab/errors.hpp"

namespace afplab {

// ---------------------------------------------------------------------------
// Catalog of concrete finitely generated groups, all with exact integer
// arithmetic on canonical payloads:
//   Zd         integer vectors of length dim
//   Free       reduced words over signed letters {±1, ..., ±rank}
//   Heisenberg integer triples (a, b, c) with (a,b,c)(a',b',c') =
//              (a+a', b+b', c+c'+a*b')
//   Sym        permutations of {0..n-1} as image sequences
//   Cyclic     residue vectors modulo a list of moduli
// ---------------------------------------------------------------------------

enum class GroupKind { Zd, Free, Heisenberg, Sym, Cyclic };

struct Group {
  GroupKind kind = GroupKind::Zd;
  int param = 1;                    // dim (Zd), rank (Free), n (Sym)
  std::vector<long long> moduli;    // Cyclic only

  bool operator==(const Group&) const = default;

  int payload_size() const {
    switch (kind) {
      case GroupKind::Zd: return param;
      case GroupKind::Free: return -1;  // variable length
      case GroupKind::Heisenberg: return 3;
      case GroupKind::Sym: return param;
      case GroupKind::Cyclic: return static_cast<int>(moduli.size());
    }
    return -1;
  }

  bool is_finite() const {
    return kind == GroupKind::Sym || kind == GroupKind::Cyclic;
  }

  std::string name() const {
    switch (kind) {
      case GroupKind::Zd: return "Z^" + std::to_string(param);
      case GroupKind::Free: return "F" + std::to_string(param);
      case GroupKind::Heisenberg: return "H3(Z)";
      case GroupKind::Sym: return "Sym(" + std::to_string(param) + ")";
      case GroupKind::Cyclic: {
        std::string s = "Z/(";
        for (size_t i = 0; i < moduli.size(); ++i)
          s += (i ? "," : "") + std::to_string(moduli[i]);
        return s + ")";
      }
    }
    return "?";
  }
};

using Payload = std::vector<long long>;

struct GroupElement {
  Group group;
  Payload payload;

  bool operator==(const GroupElement& o) const {
    return group == o.group && payload == o.payload;
  }
};

struct PayloadHash {
  size_t operator()(const Payload& p) const {
    size_t h = 1469598103934665603ull;
    for (long long v : p) {
      h ^= static_cast<size_t>(v) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }
};

// -------------------------- canonical ordering -----------------------------

// Free letters ordered a < a^-1 < b < b^-1 < ...
inline int letter_rank(long long l) {
  return static_cast<int>(2 * (std::llabs(l) - 1) + (l < 0 ? 1 : 0));
}

/// Deterministic total order on canonical payloads within one group:
/// free words by (length, letter-rank lex); fixed-size payloads by plain lex.
inline bool payload_less(const Group& g, const Payload& a, const Payload& b) {
  if (g.kind == GroupKind::Free) {
    if (a.size() != b.size()) return a.size() < b.size();
    for (size_t i = 0; i < a.size(); ++i)
      if (a[i] != b[i]) return letter_rank(a[i]) < letter_rank(b[i]);
    return false;
  }
  return a < b;
}

inline bool element_less(const GroupElement& a, const GroupElement& b) {
  return payload_less(a.group, a.payload, b.payload);
}

// ------------------------------ group law ----------------------------------

inline void check_same_group(const GroupElement& a, const GroupElement& b) {
  if (!(a.group == b.group))
    throw domain_error("group mismatch: " + a.group.name() + " vs " +
                       b.group.name());
}

inline GroupElement identity(const Group& g) {
  switch (g.kind) {
    case GroupKind::Free: return {g, {}};
    case GroupKind::Sym: {
      Payload p(g.param);
      std::iota(p.begin(), p.end(), 0);
      return {g, p};
    }
    default: return {g, Payload(g.payload_size(), 0)};
  }
}

inline Payload reduce_free_word(const Payload& w) {
  Payload out;
  out.reserve(w.size());
  for (long long l : w) {
    if (!out.empty() && out.back() == -l)
      out.pop_back();
    else
      out.push_back(l);
  }
  return out;
}

inline GroupElement canonical(const GroupElement& e) {
  GroupElement r = e;
  switch (e.group.kind) {
    case GroupKind::Free:
      r.payload = reduce_free_word(e.payload);
      break;
    case GroupKind::Cyclic:
      for (size_t i = 0; i < r.payload.size(); ++i) {
        long long m = e.group.moduli[i];
        r.payload[i] = ((r.payload[i] % m) + m) % m;
      }
      break;
    default: break;
  }
  return r;
}

inline GroupElement mul(const GroupElement& a, const GroupElement& b) {
  check_same_group(a, b);
  const Group& g = a.group;
  switch (g.kind) {
    case GroupKind::Zd: {
      Payload p(a.payload);
      for (int i = 0; i < g.param; ++i) p[i] += b.payload[i];
      return {g, p};
    }
    case GroupKind::Cyclic: {
      Payload p(a.payload);
      for (size_t i = 0; i < p.size(); ++i)
        p[i] = (p[i] + b.payload[i]) % g.moduli[i];
      return {g, p};
    }
    case GroupKind::Heisenberg: {
      long long x = a.payload[0], y = a.payload[1], z = a.payload[2];
      long long u = b.payload[0], v = b.payload[1], w = b.payload[2];
      return {g, {x + u, y + v, z + w + x * v}};
    }
    case GroupKind::Sym: {
      Payload p(g.param);
      for (int i = 0; i < g.param; ++i) p[i] = a.payload[b.payload[i]];
      return {g, p};
    }
    case GroupKind::Free: {
      Payload p(a.payload);
      for (long long l : b.payload) {
        if (!p.empty() && p.back() == -l)
          p.pop_back();
        else
          p.push_back(l);
      }
      return {g, p};
    }
  }
  throw domain_error("unknown group kind");
}

inline GroupElement inv(const GroupElement& a) {
  const Group& g = a.group;
  switch (g.kind) {
    case GroupKind::Zd: {
      Payload p(a.payload);
      for (auto& v : p) v = -v;
      return {g, p};
    }
    case GroupKind::Cyclic: {
      Payload p(a.payload);
      for (size_t i = 0; i < p.size(); ++i)
        p[i] = (g.moduli[i] - p[i]) % g.moduli[i];
      return {g, p};
    }
    case GroupKind::Heisenberg: {
      long long x = a.payload[0], y = a.payload[1], z = a.payload[2];
      return {g, {-x, -y, x * y - z}};
    }
    case GroupKind::Sym: {
      Payload p(g.param);
      for (int i = 0; i < g.param; ++i) p[a.payload[i]] = i;
      return {g, p};
    }
    case GroupKind::Free: {
      Payload p(a.payload.rbegin(), a.payload.rend());
      for (auto& l : p) l = -l;
      return {g, p};
    }
  }
  throw domain_error("unknown group kind");
}

inline bool is_identity(const GroupElement& e) {
  return e == identity(e.group);
}

inline std::string to_string(const GroupElement& e) {
  if (e.group.kind == GroupKind::Free) {
    if (e.payload.empty()) return "e";
    std::string s;
    for (long long l : e.payload) {
      s += static_cast<char>('a' + std::llabs(l) - 1);
      if (l < 0) s += "^-1";
    }
    return s;
  }
  std::string s = "(";
  for (size_t i = 0; i < e.payload.size(); ++i)
    s += (i ? "," : "") + std::to_string(e.payload[i]);
  return s + ")";
}

// ---------------------------- generating sets ------------------------------

struct GeneratingSet {
  std::vector<GroupElement> generators;
  bool symmetric = false;
};

/// Validated construction: nonempty, no identity generator, and closure under
/// inverse when the symmetric flag is set.
inline GeneratingSet make_generating_set(std::vector<GroupElement> gens,
                                         bool symmetric) {
  if (gens.empty()) throw domain_error("generating set is empty");
  for (auto& g : gens) {
    g = canonical(g);
    if (is_identity(g))
      throw domain_error("generating set contains the identity");
  }
  if (symmetric) {
    for (const auto& g : gens) {
      GroupElement gi = canonical(inv(g));
      if (std::none_of(gens.begin(), gens.end(),
                       [&](const GroupElement& h) { return h == gi; }))
        throw domain_error("generating set flagged symmetric but not closed "
                           "under inverse: missing inverse of " + to_string(g));
    }
  }
  return {std::move(gens), symmetric};
}

/// Standard positive generators of a catalog group: coordinate steps for
/// Zd/Cyclic, letters for free groups, x,y for Heisenberg, adjacent
/// transpositions for Sym(n).
inline std::vector<GroupElement> standard_generators(const Group& g) {
  std::vector<GroupElement> out;
  switch (g.kind) {
    case GroupKind::Zd:
      for (int i = 0; i < g.param; ++i) {
        Payload p(g.param, 0);
        p[i] = 1;
        out.push_back({g, p});
      }
      break;
    case GroupKind::Cyclic:
      for (size_t i = 0; i < g.moduli.size(); ++i) {
        Payload p(g.moduli.size(), 0);
        if (g.moduli[i] > 1) {
          p[i] = 1;
          out.push_back({g, p});
        }
      }
      break;
    case GroupKind::Free:
      for (int i = 1; i <= g.param; ++i) out.push_back({g, {i}});
      break;
    case GroupKind::Heisenberg:
      out.push_back({g, {1, 0, 0}});
      out.push_back({g, {0, 1, 0}});
      break;
    case GroupKind::Sym:
      for (int i = 0; i + 1 < g.param; ++i) {
        GroupElement t = identity(g);
        std::swap(t.payload[i], t.payload[i + 1]);
        out.push_back(t);
      }
      break;
  }
  if (out.empty()) throw domain_error("group has no standard generators");
  return out;
}

/// Symmetric closure of the standard generators, duplicates removed.
inline GeneratingSet standard_symmetric_gens(const Group& g) {
  std::vector<GroupElement> gens = standard_generators(g);
  std::vector<GroupElement> all = gens;
  for (const auto& s : gens) {
    GroupElement si = canonical(inv(s));
    if (std::none_of(all.begin(), all.end(),
                     [&](const GroupElement& h) { return h == si; }))
      all.push_back(si);
  }
  return make_generating_set(std::move(all), true);
}

// ------------------------------ factoring ----------------------------------

/// Express g as a word in the standard positive generators; the result is a
/// sequence of signed 1-based generator indices (negative = inverse).
/// Invariant: multiplying the corresponding generators recovers g exactly.
inline std::vector<int> factor(const GroupElement& e) {
  const Group& g = e.group;
  std::vector<int> word;
  auto repeat = [&word](int idx, long long count) {
    int s = count >= 0 ? idx : -idx;
    for (long long j = 0; j < std::llabs(count); ++j) word.push_back(s);
  };
  switch (g.kind) {
    case GroupKind::Zd:
    case GroupKind::Cyclic:
      for (size_t i = 0; i < e.payload.size(); ++i)
        repeat(static_cast<int>(i) + 1, e.payload[i]);
      return word;
    case GroupKind::Free:
      for (long long l : e.payload)
        word.push_back(static_cast<int>(l));
      return word;
    case GroupKind::Heisenberg: {
      // (a,b,c) = x^a y^b [x,y]^(c-ab), with [x,y] = x y x^-1 y^-1.
      long long a = e.payload[0], b = e.payload[1], c = e.payload[2];
      repeat(1, a);
      repeat(2, b);
      long long k = c - a * b;
      for (long long j = 0; j < std::llabs(k); ++j) {
        if (k > 0) {
          word.insert(word.end(), {1, 2, -1, -2});
        } else {
          word.insert(word.end(), {2, 1, -2, -1});
        }
      }
      return word;
    }
    case GroupKind::Sym: {
      // Bubble-sort the image sequence back to identity; the recorded
      // adjacent swaps, reversed, express the permutation.
      Payload p = e.payload;
      std::vector<int> swaps;
      for (int i = 0; i < g.param; ++i) {
        for (int j = 0; j + 1 < g.param; ++j) {
          if (p[j] > p[j + 1]) {
            std::swap(p[j], p[j + 1]);
            swaps.push_back(j + 1);
          }
        }
      }
      return {swaps.rbegin(), swaps.rend()};
    }
  }
  throw domain_error("unknown group kind");
}

// ------------------------------ ball enumeration ---------------------------

constexpr long long kDefaultBallCap = 1'000'000;

struct Ball {
  std::vector<GroupElement> elements;  // canonical order: (depth, payload lex)
  std::vector<int> depth;              // word length w.r.t. the generating set
};

/// Word-metric ball of the given radius: breadth-first closure under left
/// multiplication by the generators. Deterministic output order: by word
/// length, then lexicographic on canonical payload.
inline Ball ball(const Group& g, const GeneratingSet& gens, int radius,
                 long long cap = kDefaultBallCap) {
  if (radius < 0) throw domain_error("ball radius must be nonnegative");
  std::unordered_set<Payload, PayloadHash> seen;
  std::vector<Payload> level{identity(g).payload};
  seen.insert(level.front());

  Ball out;
  auto emit = [&](std::vector<Payload>& lv, int d) {
    std::sort(lv.begin(), lv.end(), [&](const Payload& a, const Payload& b) {
      return payload_less(g, a, b);
    });
    for (auto& p : lv) {
      out.elements.push_back({g, std::move(p)});
      out.depth.push_back(d);
    }
  };

  std::vector<GroupElement> steps = gens.generators;
  if (!gens.symmetric)
    for (const auto& s : gens.generators) steps.push_back(canonical(inv(s)));

  for (int d = 0; d <= radius; ++d) {
    std::vector<Payload> next;
    if (d < radius) {
      for (const auto& p : level) {
        GroupElement cur{g, p};
        for (const auto& s : steps) {
          Payload q = mul(s, cur).payload;
          if (seen.insert(q).second) next.push_back(std::move(q));
        }
        if (static_cast<long long>(seen.size()) > cap)
          throw resource_error("ball size cap exceeded (cap = " +
                               std::to_string(cap) + ")");
      }
    }
    emit(level, d);
    level = std::move(next);
    if (level.empty()) break;  // finite group exhausted
  }
  return out;
}

/// Enumerate a finite catalog group completely (balls until closure).
inline Ball whole_group(const Group& g, const GeneratingSet& gens,
                        long long cap = kDefaultBallCap) {
  if (!g.is_finite())
    throw domain_error("whole-group enumeration requires a finite group");
  Ball prev = ball(g, gens, 0, cap);
  for (int r = 1;; ++r) {
    Ball cur = ball(g, gens, r, cap);
    if (cur.elements.size() == prev.elements.size()) return prev;
    prev = std::move(cur);
  }
}

// ------------------------ free group <-> N bijection -----------------------

// Words ordered by length, ties broken lexicographically by letter rank;
// the identity gets index 0. Counts: 2k*(2k-1)^(L-1) words of length L >= 1.

inline unsigned long long word_index(const GroupElement& w) {
  if (w.group.kind != GroupKind::Free)
    throw domain_error("word_index requires a free-group element");
  const Payload word = reduce_free_word(w.payload);
  const unsigned long long k = static_cast<unsigned long long>(w.group.param);
  const unsigned long long L = word.size();
  unsigned long long base = 0, count = 1;  // count = #words of length l
  for (unsigned long long l = 0; l < L; ++l) {
    base += count;
    count = (l == 0) ? 2 * k : count * (2 * k - 1);
  }
  unsigned long long rank = 0;
  for (size_t j = 0; j < word.size(); ++j) {
    int r = letter_rank(word[j]);
    if (j > 0) {
      int forbidden = letter_rank(-word[j - 1]);
      if (r > forbidden) --r;
      rank = rank * (2 * k - 1) + static_cast<unsigned long long>(r);
    } else {
      rank = static_cast<unsigned long long>(r);
    }
  }
  return base + rank;
}

inline GroupElement index_word(const Group& g, unsigned long long n) {
  if (g.kind != GroupKind::Free)
    throw domain_error("index_word requires a free group");
  const unsigned long long k = static_cast<unsigned long long>(g.param);
  auto rank_letter = [](int r) -> long long {
    long long l = r / 2 + 1;
    return (r % 2) ? -l : l;
  };
  unsigned long long count = 1, L = 0;
  while (n >= count) {
    n -= count;
    ++L;
    count = (L == 1) ? 2 * k : count * (2 * k - 1);
  }
  Payload word(L);
  for (unsigned long long j = 0; j < L; ++j) {
    unsigned long long radix = (j == 0) ? 2 * k : 2 * k - 1;
    count /= radix;
    int r = static_cast<int>(n / count);
    n %= count;
    if (j > 0) {
      int forbidden = letter_rank(-word[j - 1]);
      if (r >= forbidden) ++r;
    }
    word[j] = rank_letter(r);
  }
  return {g, word};
}

}  // namespace afplab
