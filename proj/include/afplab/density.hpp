#pragma once

#include <cmath>
#include <vector>

#include "afplab/folner.hpp"
#include "afplab/group.hpp"

namespace afplab {

// ---------------------------------------------------------------------------
// Finitely supported nonnegative functions on a group: the l^p objects of
// Reiter's condition, and (for p = 1) literal points of prob(N) under the
// word-index relabeling. Translation is exact sparse relabeling, so
// ||g.f||_p = ||f||_p holds to the bit.
// ---------------------------------------------------------------------------

struct GroupDensity {
  Group group;
  double p = 1;  // exponent, 1 or 2
  // sorted by canonical payload order; masses strictly positive
  std::vector<std::pair<GroupElement, double>> entries;

  double norm() const {
    if (p == 1) {
      double s = 0;
      for (const auto& [g, m] : entries) s += m;
      return s;
    }
    double s = 0;
    for (const auto& [g, m] : entries) s += m * m;
    return std::sqrt(s);
  }

  void normalize() {
    double n = norm();
    if (n <= 0) throw domain_error("cannot normalize the zero density");
    for (auto& [g, m] : entries) m /= n;
  }
};

inline GroupDensity make_density(
    const Group& group, double p,
    std::vector<std::pair<GroupElement, double>> entries) {
  if (p != 1 && p != 2) throw domain_error("density exponent must be 1 or 2");
  std::vector<std::pair<GroupElement, double>> kept;
  for (auto& [g, m] : entries) {
    if (m < 0) throw domain_error("negative mass on " + to_string(g));
    if (m > 0) kept.emplace_back(canonical(g), m);
  }
  std::sort(kept.begin(), kept.end(),
            [](const auto& a, const auto& b) {
              return element_less(a.first, b.first);
            });
  for (size_t i = 0; i + 1 < kept.size(); ++i)
    if (kept[i].first == kept[i + 1].first)
      throw domain_error("duplicate support element " +
                         to_string(kept[i].first));
  return {group, p, std::move(kept)};
}

inline GroupDensity point_mass(const GroupElement& g, double p = 1) {
  return make_density(g.group, p, {{g, 1.0}});
}

inline GroupDensity uniform_density(const Group& group,
                                    const std::vector<GroupElement>& support,
                                    double p = 1) {
  if (support.empty()) throw domain_error("uniform density on empty support");
  double mass = p == 1 ? 1.0 / static_cast<double>(support.size())
                       : 1.0 / std::sqrt(static_cast<double>(support.size()));
  std::vector<std::pair<GroupElement, double>> e;
  e.reserve(support.size());
  for (const auto& g : support) e.emplace_back(g, mass);
  return make_density(group, p, std::move(e));
}

/// Left regular representation: (g.f)(x) = f(g^-1 x), i.e. the support is
/// relabeled g.support with masses untouched.
inline GroupDensity translate(const GroupElement& g, const GroupDensity& f) {
  if (!(g.group == f.group)) throw domain_error("element from wrong group");
  std::vector<std::pair<GroupElement, double>> e;
  e.reserve(f.entries.size());
  for (const auto& [h, m] : f.entries)
    e.emplace_back(canonical(mul(g, h)), m);
  std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
    return element_less(a.first, b.first);
  });
  return {f.group, f.p, std::move(e)};
}

/// l^p distance over the union of supports (exact sparse merge, nothing is
/// clipped).
inline double lp_distance(const GroupDensity& a, const GroupDensity& b) {
  if (a.p != b.p) throw domain_error("density exponent mismatch");
  double acc = 0;
  auto add = [&](double d) { acc += a.p == 1 ? std::abs(d) : d * d; };
  size_t i = 0, j = 0;
  while (i < a.entries.size() || j < b.entries.size()) {
    if (j >= b.entries.size() ||
        (i < a.entries.size() &&
         element_less(a.entries[i].first, b.entries[j].first))) {
      add(a.entries[i++].second);
    } else if (i >= a.entries.size() ||
               element_less(b.entries[j].first, a.entries[i].first)) {
      add(-b.entries[j++].second);
    } else {
      add(a.entries[i++].second - b.entries[j++].second);
    }
  }
  return a.p == 1 ? acc : std::sqrt(acc);
}

/// max over the generators of ||g.f - f||_p.
inline double reiter_objective(const GroupDensity& f,
                               const std::vector<GroupElement>& gens) {
  double v = 0;
  for (const auto& g : gens) v = std::max(v, lp_distance(translate(g, f), f));
  return v;
}

}  // namespace afplab
