#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "afplab/density.hpp"
#include "afplab/simplex_lp.hpp"

namespace afplab {

// ---------------------------------------------------------------------------
// Reiter-condition experiments: minimize max_g ||g.f - f||_p over normalized
// nonnegative densities supported in a Cayley ball, estimate the Kesten
// spectral radius of the Markov averaging operator, and run the free-group
// counterexample against an amenable control.
//
// Translations are never clipped: differences are evaluated on ball(R+1), so
// mass leaking out of the support window counts toward the objective in full.
// ---------------------------------------------------------------------------

struct ReiterResult {
  GroupDensity density;
  double objective = 0;
  int radius = 0;
  int iterations = 0;
  std::string method;
  std::vector<double> trace;  // best objective per iteration
};

enum class ReiterMethod { Subgradient, Lp };

struct ReiterOptions {
  int iterations = 3000;
  double step0 = 1.0;  // subgradient step s_k = step0 / sqrt(k)
  long long cap = kDefaultBallCap;
  long long lp_support_cap = 10'000;
};

namespace detail {

/// Index tables for a ball pair B = ball(R) subset U = ball(R+1):
/// for each generator g and u in U, the B-index of g^-1 u (or -1).
/// B is the canonical-order prefix of U.
struct BallIndex {
  std::vector<GroupElement> inner;  // ball(R)
  std::vector<GroupElement> outer;  // ball(R+1)
  std::vector<std::vector<int>> pull;  // pull[g][u] = index_B(g^-1 u) or -1
};

inline BallIndex build_ball_index(const Group& group,
                                  const GeneratingSet& gens,
                                  const std::vector<GroupElement>& obj_gens,
                                  int radius, long long cap) {
  BallIndex bi;
  bi.inner = ball(group, gens, radius, cap).elements;
  bi.outer = ball(group, gens, radius + 1, cap).elements;
  std::unordered_map<Payload, int, PayloadHash> inner_idx;
  inner_idx.reserve(bi.inner.size() * 2);
  for (size_t i = 0; i < bi.inner.size(); ++i)
    inner_idx.emplace(bi.inner[i].payload, static_cast<int>(i));
  for (const auto& g : obj_gens) {
    GroupElement gi = canonical(inv(g));
    std::vector<int> t(bi.outer.size(), -1);
    for (size_t u = 0; u < bi.outer.size(); ++u) {
      auto it = inner_idx.find(canonical(mul(gi, bi.outer[u])).payload);
      if (it != inner_idx.end()) t[u] = it->second;
    }
    bi.pull.push_back(std::move(t));
  }
  return bi;
}

inline GroupDensity density_from_vector(const Group& group, double p,
                                        const std::vector<GroupElement>& supp,
                                        const std::vector<double>& mass) {
  std::vector<std::pair<GroupElement, double>> e;
  for (size_t i = 0; i < supp.size(); ++i)
    if (mass[i] > 1e-15) e.emplace_back(supp[i], mass[i]);
  GroupDensity d = make_density(group, p, std::move(e));
  d.normalize();
  return d;
}

}  // namespace detail

/// Projected subgradient / LP minimization of the Reiter objective over
/// densities supported in ball(R). An optional warm start (support must lie
/// in the ball) preserves monotonicity across nested radii.
inline ReiterResult reiter_minimize(
    const Group& group, const std::vector<GroupElement>& obj_gens, int radius,
    double p, ReiterMethod method, const ReiterOptions& opt = {},
    const std::optional<GroupDensity>& warm_start = std::nullopt) {
  if (p != 1 && p != 2) throw domain_error("p must be 1 or 2");
  if (method == ReiterMethod::Lp && p != 1)
    throw domain_error("the LP method requires p = 1");

  GeneratingSet gens = standard_symmetric_gens(group);
  detail::BallIndex bi =
      detail::build_ball_index(group, gens, obj_gens, radius, opt.cap);
  const int nf = static_cast<int>(bi.inner.size());
  const int nu = static_cast<int>(bi.outer.size());
  const int ng = static_cast<int>(obj_gens.size());

  ReiterResult res;
  res.radius = radius;

  if (method == ReiterMethod::Lp) {
    if (nf > opt.lp_support_cap)
      throw resource_error("LP support cap exceeded (cap = " +
                           std::to_string(opt.lp_support_cap) + ")");
    // vars: f (nf), t (1), y_{g,u} (ng*nu); minimize t
    LpProblem lp;
    lp.num_vars = nf + 1 + ng * nu;
    lp.objective.assign(lp.num_vars, 0.0);
    lp.objective[nf] = 1.0;
    for (int g = 0; g < ng; ++g) {
      LpRow sum_row;
      for (int u = 0; u < nu; ++u) {
        int y = nf + 1 + g * nu + u;
        // d = f(g^-1 u) - f(u); enforce y >= |d|
        std::vector<std::pair<int, double>> d;
        if (bi.pull[g][u] >= 0) d.emplace_back(bi.pull[g][u], 1.0);
        if (u < nf) d.emplace_back(u, -1.0);
        LpRow up;  // d - y <= 0
        up.coeffs = d;
        up.coeffs.emplace_back(y, -1.0);
        lp.rows.push_back(up);
        LpRow down;  // -d - y <= 0
        for (auto [j, v] : d) down.coeffs.emplace_back(j, -v);
        down.coeffs.emplace_back(y, -1.0);
        lp.rows.push_back(down);
        sum_row.coeffs.emplace_back(y, 1.0);
      }
      sum_row.coeffs.emplace_back(nf, -1.0);  // sum_u y <= t
      lp.rows.push_back(sum_row);
    }
    LpRow norm_row;  // sum f = 1
    for (int j = 0; j < nf; ++j) norm_row.coeffs.emplace_back(j, 1.0);
    norm_row.rel = LpRelation::Equal;
    norm_row.rhs = 1.0;
    lp.rows.push_back(norm_row);

    LpSolution sol = solve_lp(lp);
    if (sol.status != LpStatus::Optimal)
      throw numeric_error("minimax LP did not reach optimality");
    std::vector<double> f(sol.x.begin(), sol.x.begin() + nf);
    res.density = detail::density_from_vector(group, 1, bi.inner, f);
    res.objective = reiter_objective(res.density, obj_gens);
    res.method = "lp";
    res.iterations = 1;
    res.trace = {res.objective};
    return res;
  }

  // ---- projected subgradient, best-iterate tracking ----
  std::vector<double> f(nf, 0.0);
  if (warm_start) {
    std::unordered_map<Payload, int, PayloadHash> idx;
    for (int i = 0; i < nf; ++i) idx.emplace(bi.inner[i].payload, i);
    for (const auto& [g, m] : warm_start->entries) {
      auto it = idx.find(g.payload);
      if (it == idx.end())
        throw domain_error("warm start support outside ball(R)");
      f[it->second] = m;
    }
  } else {
    f.assign(nf, 1.0);
  }
  auto project = [&](std::vector<double>& v) {
    double s = 0;
    for (auto& x : v) {
      if (x < 0) x = 0;
      s += p == 1 ? x : x * x;
    }
    if (s <= 0) {
      v.assign(nf, 1.0);
      s = nf;  // both the l1 mass and the squared l2 mass of the ones vector
    }
    double scale = p == 1 ? 1.0 / s : 1.0 / std::sqrt(s);
    for (auto& x : v) x *= scale;
  };
  project(f);

  std::vector<double> best_f = f;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> d(nu), grad(nf);
  for (int k = 1; k <= opt.iterations; ++k) {
    double worst = -1;
    int worst_g = 0;
    std::vector<double> worst_d;
    for (int g = 0; g < ng; ++g) {
      double val = 0;
      for (int u = 0; u < nu; ++u) {
        double t = bi.pull[g][u] >= 0 ? f[bi.pull[g][u]] : 0.0;
        d[u] = t - (u < nf ? f[u] : 0.0);
        val += p == 1 ? std::abs(d[u]) : d[u] * d[u];
      }
      if (p == 2) val = std::sqrt(val);
      if (val > worst) {
        worst = val;
        worst_g = g;
        worst_d = d;
      }
    }
    if (worst < best) {
      best = worst;
      best_f = f;
    }
    res.trace.push_back(best);

    grad.assign(nf, 0.0);
    double scale = (p == 2 && worst > 0) ? 1.0 / worst : 1.0;
    for (int u = 0; u < nu; ++u) {
      double w = p == 1 ? (worst_d[u] > 0 ? 1.0 : (worst_d[u] < 0 ? -1.0 : 0.0))
                        : worst_d[u] * scale;
      int v = bi.pull[worst_g][u];
      if (v >= 0) grad[v] += w;
      if (u < nf) grad[u] -= w;
    }
    double step = opt.step0 / std::sqrt(static_cast<double>(k));
    for (int j = 0; j < nf; ++j) f[j] -= step * grad[j];
    project(f);
  }
  res.density = detail::density_from_vector(group, p, bi.inner, best_f);
  res.objective = reiter_objective(res.density, obj_gens);
  res.method = "subgradient";
  res.iterations = opt.iterations;
  return res;
}

// --------------------------- Kesten estimate -------------------------------

namespace kesten_detail {

// Free-group fast path: ball elements are indexed by the length-lex
// bijection with N, so no hash tables are needed even for ~10^6 elements.
inline double free_group_estimate(const Group& group, int radius, int iters,
                                  long long cap) {
  const unsigned long long k = static_cast<unsigned long long>(group.param);
  std::vector<unsigned long long> level_base{0};  // first index of length l
  unsigned long long count = 1, total = 1;
  for (int l = 1; l <= radius; ++l) {
    count = (l == 1) ? 2 * k : count * (2 * k - 1);
    level_base.push_back(total);
    total += count;
  }
  if (static_cast<long long>(total) > cap)
    throw resource_error("ball size cap exceeded (cap = " +
                         std::to_string(cap) + ")");
  const size_t n = static_cast<size_t>(total);
  const unsigned long long sphere_base =
      radius == 0 ? 0 : level_base[radius];

  // pull[s][i] = index of s^-1 w_i when still inside ball(R), else -1
  std::vector<std::vector<int64_t>> pull(2 * k);
  std::vector<GroupElement> letters;
  for (unsigned long long s = 0; s < 2 * k; ++s) {
    long long l = static_cast<long long>(s / 2 + 1);
    letters.push_back({group, {s % 2 ? l : -l}});  // s^-1 as an element
  }
  for (unsigned long long s = 0; s < 2 * k; ++s) {
    pull[s].resize(n, -1);
    for (size_t i = 0; i < n; ++i) {
      GroupElement w = index_word(group, i);
      GroupElement v = mul(letters[s], w);
      if (static_cast<int>(v.payload.size()) <= radius)
        pull[s][i] = static_cast<int64_t>(word_index(v));
    }
  }

  std::vector<double> f(n, 1.0 / std::sqrt(static_cast<double>(n)));
  std::vector<double> g(n);
  double estimate = 0;
  const double inv2k = 1.0 / static_cast<double>(2 * k);
  for (int it = 0; it < iters; ++it) {
    double inner2 = 0;
    for (size_t i = 0; i < n; ++i) {
      double acc = 0;
      for (unsigned long long s = 0; s < 2 * k; ++s)
        if (pull[s][i] >= 0) acc += f[pull[s][i]];
      g[i] = acc * inv2k;
      inner2 += g[i] * g[i];
    }
    // leaked mass on the sphere of radius R+1: each outside word is reached
    // from exactly one parent on sphere(R), with 2k-1 children per parent
    double leak = 0;
    for (size_t i = sphere_base; i < n; ++i) {
      double children = (i == 0) ? 2.0 * k : 2.0 * k - 1.0;
      leak += children * (f[i] * inv2k) * (f[i] * inv2k);
    }
    estimate = std::sqrt(inner2 + leak);
    double norm = std::sqrt(inner2);
    if (norm <= 0) throw numeric_error("Kesten iteration collapsed to zero");
    for (size_t i = 0; i < n; ++i) f[i] = g[i] / norm;
  }
  return estimate;
}

}  // namespace kesten_detail

/// Power-iteration estimate of the norm of the Markov averaging operator
/// M f = |S|^-1 sum_{s in S} s.f on densities supported in ball(R). The
/// reported value is ||M f|| with f the (normalized) iterate, so leaked mass
/// counts in full; the iterate itself is truncated back to the ball.
inline double kesten_estimate(const Group& group, const GeneratingSet& gens,
                              int radius, int iters = 200,
                              long long cap = kDefaultBallCap) {
  if (!gens.symmetric)
    throw domain_error("Kesten estimate requires a symmetric generating set");
  if (iters < 1) throw domain_error("at least one iteration is required");

  if (group.kind == GroupKind::Free) {
    GeneratingSet std_gens = standard_symmetric_gens(group);
    if (gens.generators.size() == std_gens.generators.size())
      return kesten_detail::free_group_estimate(group, radius, iters, cap);
  }

  detail::BallIndex bi = detail::build_ball_index(group, gens,
                                                  gens.generators, radius, cap);
  const int nf = static_cast<int>(bi.inner.size());
  const int nu = static_cast<int>(bi.outer.size());
  const double invs = 1.0 / static_cast<double>(gens.generators.size());

  std::vector<double> f(nf, 1.0 / std::sqrt(static_cast<double>(nf)));
  std::vector<double> g(nu);
  double estimate = 0;
  for (int it = 0; it < iters; ++it) {
    double total2 = 0, inner2 = 0;
    for (int u = 0; u < nu; ++u) {
      double acc = 0;
      for (size_t s = 0; s < bi.pull.size(); ++s)
        if (bi.pull[s][u] >= 0) acc += f[bi.pull[s][u]];
      g[u] = acc * invs;
      total2 += g[u] * g[u];
      if (u < nf) inner2 += g[u] * g[u];
    }
    estimate = std::sqrt(total2);
    double norm = std::sqrt(inner2);
    if (norm <= 0) throw numeric_error("Kesten iteration collapsed to zero");
    for (int u = 0; u < nf; ++u) f[u] = g[u] / norm;
  }
  return estimate;
}

// ------------------------- counterexample run ------------------------------

struct CounterexampleEntry {
  int radius = 0;
  double floor = 0;
  std::string method;
  int iterations = 0;
  long long support_size = 0;
  std::vector<double> trace;  // best objective per iteration
  // prob(N) view of the minimizing density: (word index, mass)
  std::vector<std::pair<unsigned long long, double>> prob_n_view;
};

struct CounterexampleReport {
  std::vector<CounterexampleEntry> free_group;
  CounterexampleEntry control;  // same experiment on Z^2
  double floor_threshold = 0.05;
  bool no_decay = false;        // all free-group floors above the threshold
  bool control_decays = false;  // control floor fell below 0.1
};

struct CounterexampleOptions {
  std::vector<int> radii{0, 1, 2, 3, 4, 5, 6};
  int control_radius = 20;
  double floor_threshold = 0.05;
  int lp_max_radius = 2;
  ReiterOptions reiter;
};

/// F2 acting on prob(N) by left multiplication (through the length-lex
/// identification of F2 with N), contrasted with the amenable Z^2 control.
inline CounterexampleReport counterexample_run(
    const CounterexampleOptions& opt = {}) {
  Group f2{GroupKind::Free, 2, {}};
  std::vector<GroupElement> f2_gens = standard_generators(f2);

  CounterexampleReport rep;
  rep.floor_threshold = opt.floor_threshold;
  rep.no_decay = true;

  for (int r : opt.radii) {
    // small radii are solved exactly by LP; larger ones by subgradient from
    // the uniform density, which lands on the LP value where both apply
    ReiterMethod method = r <= opt.lp_max_radius ? ReiterMethod::Lp
                                                 : ReiterMethod::Subgradient;
    ReiterResult res = reiter_minimize(f2, f2_gens, r, 1, method, opt.reiter);
    CounterexampleEntry e;
    e.radius = r;
    e.floor = res.objective;
    e.method = res.method;
    e.iterations = res.iterations;
    e.support_size = static_cast<long long>(res.density.entries.size());
    e.trace = res.trace;
    for (const auto& [g, m] : res.density.entries)
      e.prob_n_view.emplace_back(word_index(g), m);
    std::sort(e.prob_n_view.begin(), e.prob_n_view.end());
    if (e.floor <= opt.floor_threshold) rep.no_decay = false;
    rep.free_group.push_back(std::move(e));
  }

  Group z2{GroupKind::Zd, 2, {}};
  ReiterResult control = reiter_minimize(z2, standard_generators(z2),
                                         opt.control_radius, 1,
                                         ReiterMethod::Subgradient,
                                         opt.reiter);
  rep.control.radius = opt.control_radius;
  rep.control.floor = control.objective;
  rep.control.method = control.method;
  rep.control.iterations = control.iterations;
  rep.control.support_size =
      static_cast<long long>(control.density.entries.size());
  rep.control.trace = control.trace;
  rep.control_decays = control.objective < 0.1;
  return rep;
}

}  // namespace afplab
