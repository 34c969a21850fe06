#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "afplab/group.hpp"

namespace afplab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

constexpr double kMembershipTol = 1e-9;

// ------------------------------- seminorms ---------------------------------

/// Either an lp norm (p in {1, 2, inf}) or a functional-gap seminorm
/// x -> |<phi, x>|. Functional seminorms carry the exponent whose dual norm
/// bounds them against the matching lp displacement.
struct Seminorm {
  enum class Kind { Lp, Functional };
  Kind kind = Kind::Lp;
  double p = 2;  // for Lp; for Functional, the exponent of the paired norm
  Vec phi;

  double operator()(const Vec& x) const {
    if (kind == Kind::Functional) return std::abs(phi.dot(x));
    if (p == 1) return x.lpNorm<1>();
    if (p == 2) return x.norm();
    return x.lpNorm<Eigen::Infinity>();
  }

  static Seminorm lp(double p) { return {Kind::Lp, p, {}}; }
  static Seminorm functional(Vec phi, double paired_p) {
    return {Kind::Functional, paired_p, std::move(phi)};
  }

  /// Dual norm of phi w.r.t. the paired lp norm (Hoelder pairing).
  double dual_norm() const {
    if (kind != Kind::Functional) return 1.0;
    if (p == 1) return phi.lpNorm<Eigen::Infinity>();
    if (p == 2) return phi.norm();
    return phi.lpNorm<1>();
  }
};

// ------------------------------ convex sets --------------------------------

struct AffineFunction;  // fwd (embed.hpp)

/// Bounded convex model: probability simplex in l1, an lp ball, a product of
/// intervals, or an affine-embedded copy of one of those (used by the l2
/// embedding device). Membership is tested within an absolute tolerance.
struct ConvexSet {
  enum class Kind { Simplex, LpBall, Box, Embedded };

  Kind kind = Kind::Simplex;
  int dim = 1;  // ambient dimension of points

  double p = 2;        // LpBall exponent
  double radius = 1;   // LpBall radius
  Vec lo, hi;          // Box bounds

  // Embedded: z = fwd_mat * x + fwd_off maps domain points into this set;
  // rec_mat/rec_off recover the domain point from an image point.
  std::shared_ptr<const ConvexSet> domain;
  Mat fwd_mat, rec_mat;
  Vec fwd_off, rec_off;

  static ConvexSet simplex(int m) {
    ConvexSet s;
    s.kind = Kind::Simplex;
    s.dim = m;
    return s;
  }
  static ConvexSet lp_ball(int m, double p, double radius = 1.0) {
    ConvexSet s;
    s.kind = Kind::LpBall;
    s.dim = m;
    s.p = p;
    s.radius = radius;
    return s;
  }
  static ConvexSet box(Vec lo, Vec hi) {
    ConvexSet s;
    s.kind = Kind::Box;
    s.dim = static_cast<int>(lo.size());
    s.lo = std::move(lo);
    s.hi = std::move(hi);
    return s;
  }

  bool contains(const Vec& x, double tol = kMembershipTol) const {
    if (x.size() != dim) return false;
    switch (kind) {
      case Kind::Simplex:
        return x.minCoeff() >= -tol && std::abs(x.sum() - 1.0) <= tol;
      case Kind::LpBall: {
        double n = p == 1 ? x.lpNorm<1>()
                 : p == 2 ? x.norm()
                          : x.lpNorm<Eigen::Infinity>();
        return n <= radius * (1 + tol) + tol;
      }
      case Kind::Box:
        return (x - lo).minCoeff() >= -tol && (hi - x).minCoeff() >= -tol;
      case Kind::Embedded: {
        Vec y = rec_mat * x + rec_off;
        if (!domain->contains(y, tol * 10)) return false;
        return (fwd_mat * y + fwd_off - x).lpNorm<Eigen::Infinity>() <=
               tol * 10 * (1 + fwd_mat.lpNorm<Eigen::Infinity>());
      }
    }
    return false;
  }

  /// Pull a slightly-off point back onto the model (clip-and-renormalize for
  /// the simplex, radial scaling for balls, clamping for boxes).
  Vec project(const Vec& x) const {
    switch (kind) {
      case Kind::Simplex: {
        Vec y = x.cwiseMax(0.0);
        double s = y.sum();
        if (s <= 0) return Vec::Constant(dim, 1.0 / dim);
        return y / s;
      }
      case Kind::LpBall: {
        double n = p == 1 ? x.lpNorm<1>()
                 : p == 2 ? x.norm()
                          : x.lpNorm<Eigen::Infinity>();
        if (n <= radius) return x;
        return x * (radius / n);
      }
      case Kind::Box:
        return x.cwiseMax(lo).cwiseMin(hi);
      case Kind::Embedded: {
        Vec y = domain->project(rec_mat * x + rec_off);
        return fwd_mat * y + fwd_off;
      }
    }
    return x;
  }

  /// Extreme points (LpBall: the axis extreme points, a finite stand-in).
  std::vector<Vec> vertices() const {
    std::vector<Vec> out;
    switch (kind) {
      case Kind::Simplex:
        for (int i = 0; i < dim; ++i) {
          Vec v = Vec::Zero(dim);
          v[i] = 1;
          out.push_back(v);
        }
        break;
      case Kind::LpBall:
        for (int i = 0; i < dim; ++i) {
          Vec v = Vec::Zero(dim);
          v[i] = radius;
          out.push_back(v);
          v[i] = -radius;
          out.push_back(v);
        }
        break;
      case Kind::Box: {
        if (dim > 20)
          throw resource_error("box has too many vertices to enumerate");
        for (long long mask = 0; mask < (1LL << dim); ++mask) {
          Vec v(dim);
          for (int i = 0; i < dim; ++i)
            v[i] = (mask >> i) & 1 ? hi[i] : lo[i];
          out.push_back(v);
        }
        break;
      }
      case Kind::Embedded:
        for (const Vec& v : domain->vertices())
          out.push_back(fwd_mat * v + fwd_off);
        break;
    }
    return out;
  }

  /// Certified diameter (exact or upper bound) with respect to a seminorm.
  double diameter(const Seminorm& q) const {
    switch (kind) {
      case Kind::Simplex:
      case Kind::Box:
      case Kind::Embedded: {
        // norm is convex, so the diameter is attained at vertex pairs
        auto vs = vertices();
        double d = 0;
        for (size_t i = 0; i < vs.size(); ++i)
          for (size_t j = i + 1; j < vs.size(); ++j)
            d = std::max(d, q(vs[i] - vs[j]));
        return d;
      }
      case Kind::LpBall: {
        if (q.kind == Seminorm::Kind::Functional) {
          // sup over the ball of |<phi, .>| is radius times the dual norm
          double pd = p == 1 ? 1e18 : p == 2 ? 2.0 : 1.0;
          double n = pd >= 1e9 ? q.phi.lpNorm<Eigen::Infinity>()
                   : pd == 2  ? q.phi.norm()
                              : q.phi.lpNorm<1>();
          return 2 * radius * n;
        }
        return 2 * radius * norm_equivalence(p, q.p, dim);
      }
    }
    return 0;
  }

  /// Upper bound for ||x||_q / ||x||_p over nonzero x in R^m:
  /// 1 when q >= p, m^(1/q - 1/p) when q < p.
  static double norm_equivalence(double p_from, double q_to, int m) {
    auto recip = [](double e) { return e >= 1e9 ? 0.0 : 1.0 / e; };
    double d = recip(q_to) - recip(p_from);
    return d <= 0 ? 1.0 : std::pow(static_cast<double>(m), d);
  }

  /// Deterministic random interior point.
  Vec sample(std::mt19937_64& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    switch (kind) {
      case Kind::Simplex: {
        Vec v(dim);
        double s = 0;
        for (int i = 0; i < dim; ++i) {
          v[i] = -std::log(std::max(u(rng), 1e-300));
          s += v[i];
        }
        return v / s;
      }
      case Kind::LpBall: {
        Vec v(dim);
        std::normal_distribution<double> nd;
        for (int i = 0; i < dim; ++i) v[i] = nd(rng);
        double n = p == 1 ? v.lpNorm<1>()
                 : p == 2 ? v.norm()
                          : v.lpNorm<Eigen::Infinity>();
        double r = radius * std::pow(u(rng), 1.0 / dim);
        return v * (r / std::max(n, 1e-300));
      }
      case Kind::Box: {
        Vec v(dim);
        for (int i = 0; i < dim; ++i) v[i] = lo[i] + u(rng) * (hi[i] - lo[i]);
        return v;
      }
      case Kind::Embedded: {
        Vec y = domain->sample(rng);
        return fwd_mat * y + fwd_off;
      }
    }
    return Vec::Zero(dim);
  }
};

// ------------------------------ affine maps --------------------------------

/// Generator image: either a coordinate permutation (stored sparsely, scales
/// to large m) or a dense affine map x -> A x + b.
struct AffineMap {
  enum class Kind { Permutation, Dense };
  Kind kind = Kind::Dense;
  std::vector<int> source;  // Permutation: y[i] = x[source[i]]
  Mat A;
  Vec b;

  Vec apply(const Vec& x) const {
    if (kind == Kind::Permutation) {
      Vec y(x.size());
      for (size_t i = 0; i < source.size(); ++i) y[i] = x[source[i]];
      return y;
    }
    return A * x + b;
  }

  AffineMap inverse() const {
    if (kind == Kind::Permutation) {
      AffineMap m;
      m.kind = Kind::Permutation;
      m.source.resize(source.size());
      for (size_t i = 0; i < source.size(); ++i)
        m.source[source[i]] = static_cast<int>(i);
      return m;
    }
    AffineMap m;
    m.kind = Kind::Dense;
    m.A = A.partialPivLu().inverse();
    m.b = -m.A * b;
    return m;
  }

  Mat dense_matrix(int dim) const {
    if (kind == Kind::Dense) return A;
    Mat M = Mat::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) M(i, source[i]) = 1;
    return M;
  }
  Vec dense_offset(int dim) const {
    if (kind == Kind::Dense) return b;
    return Vec::Zero(dim);
  }

  /// Coordinate-permutation action sigma.(x_n) = (x_{sigma^-1(n)}).
  static AffineMap from_permutation(const GroupElement& sigma) {
    if (sigma.group.kind != GroupKind::Sym)
      throw domain_error("from_permutation requires a Sym element");
    GroupElement si = inv(sigma);
    AffineMap m;
    m.kind = Kind::Permutation;
    m.source.assign(si.payload.begin(), si.payload.end());
    return m;
  }

  static AffineMap rotation(double theta) {
    AffineMap m;
    m.kind = Kind::Dense;
    m.A = Mat(2, 2);
    m.A << std::cos(theta), -std::sin(theta), std::sin(theta),
        std::cos(theta);
    m.b = Vec::Zero(2);
    return m;
  }
};

// ------------------------------ group action -------------------------------

/// Affine action of a catalog group on a convex model, given by images of the
/// standard positive generators. Arbitrary elements act through their factor
/// word; well-definedness rests on the relation checks done at construction
/// time and in the test suite.
struct GroupAction {
  Group group;
  GeneratingSet gens;                  // symmetric closure of standard gens
  std::vector<AffineMap> images;       // parallel to standard_generators()
  std::vector<AffineMap> inverse_images;
  ConvexSet model;
  Seminorm norm = Seminorm::lp(2);

  Vec apply_letter(int signed_index, const Vec& x) const {
    int i = std::abs(signed_index) - 1;
    if (i < 0 || i >= static_cast<int>(images.size()))
      throw domain_error("unknown generator index " +
                         std::to_string(signed_index));
    return signed_index > 0 ? images[i].apply(x)
                            : inverse_images[i].apply(x);
  }

  Vec act_word(std::span<const int> word, const Vec& x) const {
    Vec y = x;
    for (auto it = word.rbegin(); it != word.rend(); ++it)
      y = apply_letter(*it, y);
    return y;
  }

  /// Membership is enforced on entry: points off by more than 10x the
  /// tolerance are rejected, smaller violations are projected back.
  Vec checked_point(const Vec& x) const {
    if (model.contains(x, kMembershipTol)) return x;
    if (model.contains(x, 10 * kMembershipTol)) return model.project(x);
    throw domain_error("point is not in the convex model");
  }

  Vec act(const GroupElement& g, const Vec& x) const {
    if (!(g.group == group)) throw domain_error("element from wrong group");
    return act_word(factor(g), checked_point(x));
  }
};

inline GroupAction make_action(const Group& group, ConvexSet model,
                               std::vector<AffineMap> images,
                               std::vector<AffineMap> inverse_images,
                               Seminorm norm = Seminorm::lp(2)) {
  GroupAction a;
  a.group = group;
  a.gens = standard_symmetric_gens(group);
  if (inverse_images.empty())
    for (const auto& m : images) inverse_images.push_back(m.inverse());
  if (inverse_images.size() != images.size())
    throw domain_error("one inverse map per generator image is required");
  a.inverse_images = std::move(inverse_images);
  a.images = std::move(images);
  a.model = std::move(model);
  a.norm = std::move(norm);
  if (a.images.size() != standard_generators(group).size())
    throw domain_error("one affine map per standard generator is required");
  return a;
}

inline GroupAction make_action(const Group& group, ConvexSet model,
                               std::vector<AffineMap> images,
                               Seminorm norm = Seminorm::lp(2)) {
  return make_action(group, std::move(model), std::move(images), {},
                     std::move(norm));
}

// --------------------------- catalog actions -------------------------------

/// Sym(n) permuting the coordinates of the simplex in R^n.
inline GroupAction coordinate_permutation_action(int n) {
  Group g{GroupKind::Sym, n, {}};
  std::vector<AffineMap> images;
  for (const auto& s : standard_generators(g))
    images.push_back(AffineMap::from_permutation(s));
  return make_action(g, ConvexSet::simplex(n), std::move(images),
                     Seminorm::lp(1));
}

/// Z^d acting on the unit disk by commuting rotations (one angle per
/// generator).
inline GroupAction rotation_action(const std::vector<double>& angles,
                                   double radius = 1.0) {
  Group g{GroupKind::Zd, static_cast<int>(angles.size()), {}};
  std::vector<AffineMap> images;
  for (double t : angles) images.push_back(AffineMap::rotation(t));
  return make_action(g, ConvexSet::lp_ball(2, 2, radius), std::move(images),
                     Seminorm::lp(2));
}

// ------------------------------ displacement -------------------------------

struct DisplacementValue {
  std::string generator;
  double value;
};

struct Displacement {
  std::vector<DisplacementValue> per_generator;
  double max = 0;
};

/// Strong displacement: max over generators of q(x - g.x).
inline Displacement displacement(const GroupAction& action, const Vec& x,
                                 const std::vector<GroupElement>& gens,
                                 const Seminorm& q) {
  Displacement d;
  Vec x0 = action.checked_point(x);
  for (const auto& g : gens) {
    double v = q(x0 - action.act(g, x0));
    d.per_generator.push_back({to_string(g), v});
    d.max = std::max(d.max, v);
  }
  return d;
}

inline Displacement displacement(const GroupAction& action, const Vec& x) {
  return displacement(action, x, action.gens.generators, action.norm);
}

/// Weak displacement: max over generators g and functionals phi of
/// |<phi, x - g.x>|; bounded by max dual norm times the strong displacement.
inline Displacement weak_displacement(const GroupAction& action, const Vec& x,
                                      const std::vector<GroupElement>& gens,
                                      const std::vector<Vec>& functionals) {
  if (functionals.empty()) throw domain_error("no test functionals given");
  Displacement d;
  Vec x0 = action.checked_point(x);
  for (const auto& g : gens) {
    Vec diff = x0 - action.act(g, x0);
    double v = 0;
    for (const auto& phi : functionals) v = std::max(v, std::abs(phi.dot(diff)));
    d.per_generator.push_back({to_string(g), v});
    d.max = std::max(d.max, v);
  }
  return d;
}

}  // namespace afplab
