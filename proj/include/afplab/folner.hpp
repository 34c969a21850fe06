#pragma once

#include <boost/rational.hpp>
#include <unordered_set>
#include <vector>

#include "afplab/group.hpp"

namespace afplab {

using Rational = boost::rational<long long>;

// ---------------------------------------------------------------------------
// Finite Folner candidates and their exact boundary statistics: for a finite
// set F and group element g, the boundary ratio is |gF (sym.diff) F| / |F|,
// computed with integer counting. For good schedules on amenable catalog
// groups these ratios tend to zero; for free-group balls they do not.
// ---------------------------------------------------------------------------

struct FolnerSet {
  Group group;
  std::vector<GroupElement> elements;  // canonical order, no duplicates
};

inline FolnerSet make_folner_set(const Group& g,
                                 std::vector<GroupElement> elements) {
  if (elements.empty()) throw domain_error("Folner set is empty");
  for (auto& e : elements) e = canonical(e);
  std::sort(elements.begin(), elements.end(), element_less);
  elements.erase(std::unique(elements.begin(), elements.end()),
                 elements.end());
  return {g, std::move(elements)};
}

struct BoundaryRatio {
  long long set_size = 0;
  long long only_translated = 0;  // |gF \ F|
  long long only_original = 0;    // |F \ gF|
  long long sym_diff = 0;         // |gF (sym.diff.) F|
  Rational ratio{0, 1};           // sym_diff / set_size, exact
};

/// Exact rational boundary ratio, with both one-sided counts computed
/// independently (their equality is the split identity).
inline BoundaryRatio boundary_ratio(const FolnerSet& phi,
                                    const GroupElement& g) {
  if (phi.elements.empty()) throw domain_error("Folner set is empty");
  check_same_group(phi.elements.front(), g);

  std::unordered_set<Payload, PayloadHash> orig, translated;
  orig.reserve(phi.elements.size() * 2);
  translated.reserve(phi.elements.size() * 2);
  for (const auto& e : phi.elements) orig.insert(e.payload);
  for (const auto& e : phi.elements)
    translated.insert(canonical(mul(g, e)).payload);

  BoundaryRatio r;
  r.set_size = static_cast<long long>(phi.elements.size());
  for (const auto& p : translated)
    if (!orig.count(p)) ++r.only_translated;
  for (const auto& p : orig)
    if (!translated.count(p)) ++r.only_original;
  r.sym_diff = r.only_translated + r.only_original;
  r.ratio = Rational(r.sym_diff, r.set_size);
  return r;
}

// ------------------------------- schedules ---------------------------------

/// An N-indexed family of Folner candidates with strictly increasing size.
/// Box schedules (Zd and Heisenberg) have ratios O(1/side); ball schedules
/// exist for any catalog group but only decay on amenable ones.
struct FolnerSchedule {
  enum class Kind { Box, Ball, WholeGroup };

  Group group;
  GeneratingSet gens;
  Kind kind = Kind::Box;

  long long side(int index) const { return 1LL << index; }

  FolnerSet set_at(int index, long long cap = kDefaultBallCap) const {
    if (index < 0) throw domain_error("schedule index must be nonnegative");
    switch (kind) {
      case Kind::Box: {
        long long n = side(index);
        std::vector<GroupElement> els;
        if (group.kind == GroupKind::Zd) {
          long long total = 1;
          for (int i = 0; i < group.param; ++i) {
            total *= n;
            if (total > cap)
              throw resource_error("box size cap exceeded (cap = " +
                                   std::to_string(cap) + ")");
          }
          Payload p(group.param, 0);
          els.reserve(total);
          for (long long t = 0; t < total; ++t) {
            long long v = t;
            for (int i = 0; i < group.param; ++i) {
              p[i] = v % n;
              v /= n;
            }
            els.push_back({group, p});
          }
        } else if (group.kind == GroupKind::Heisenberg) {
          // height n^2 in the center coordinate keeps ratios O(1/n)
          if (n * n * n * n > cap)
            throw resource_error("box size cap exceeded (cap = " +
                                 std::to_string(cap) + ")");
          for (long long a = 0; a < n; ++a)
            for (long long b = 0; b < n; ++b)
              for (long long c = 0; c < n * n; ++c)
                els.push_back({group, {a, b, c}});
        } else {
          throw domain_error("box schedule supports only Z^d and H3(Z)");
        }
        return make_folner_set(group, std::move(els));
      }
      case Kind::Ball:
        return make_folner_set(group,
                               ball(group, gens, index, cap).elements);
      case Kind::WholeGroup:
        return make_folner_set(group, whole_group(group, gens, cap).elements);
    }
    throw domain_error("unknown schedule kind");
  }
};

inline FolnerSchedule box_schedule(const Group& g) {
  if (g.kind != GroupKind::Zd && g.kind != GroupKind::Heisenberg)
    throw domain_error("box schedule supports only Z^d and H3(Z)");
  return {g, standard_symmetric_gens(g), FolnerSchedule::Kind::Box};
}

inline FolnerSchedule ball_schedule(const Group& g, const GeneratingSet& gens) {
  return {g, gens, FolnerSchedule::Kind::Ball};
}

inline FolnerSchedule whole_group_schedule(const Group& g) {
  if (!g.is_finite())
    throw domain_error("whole-group schedule requires a finite group");
  return {g, standard_symmetric_gens(g), FolnerSchedule::Kind::WholeGroup};
}

// ------------------------------ ratio profile ------------------------------

struct RatioRow {
  int index;
  long long set_size;
  std::string generator;
  Rational ratio;
};

inline std::vector<RatioRow> ratio_profile(const FolnerSchedule& schedule,
                                           const std::vector<GroupElement>& gens,
                                           int max_index,
                                           long long cap = kDefaultBallCap) {
  std::vector<RatioRow> rows;
  for (int i = 0; i <= max_index; ++i) {
    FolnerSet phi = schedule.set_at(i, cap);
    for (const auto& g : gens) {
      BoundaryRatio br = boundary_ratio(phi, g);
      rows.push_back({i, br.set_size, to_string(g), br.ratio});
    }
  }
  return rows;
}

}  // namespace afplab
