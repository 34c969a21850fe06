#pragma once

#include <random>

#include "afplab/convex.hpp"

namespace afplab {

// ---------------------------------------------------------------------------
// The l2-embedding device: a family of affine functions f_n with sup-norm at
// most 1 on a compact convex domain, and the map T(x) = (f_n(x)/n) embedding
// the domain affinely into l2 (truncated to N coordinates). Actions on the
// domain conjugate to affine actions on the image.
// ---------------------------------------------------------------------------

struct AffineFunction {
  Vec coeff;
  double offset = 0;
  double operator()(const Vec& x) const { return coeff.dot(x) + offset; }
};

struct AffineFunctionFamily {
  ConvexSet domain;
  std::vector<AffineFunction> members;  // |f_n| <= 1 on the domain
};

/// Affine dimension of a model (the simplex in R^m has affine dimension m-1).
inline int affine_dimension(const ConvexSet& c) {
  return c.kind == ConvexSet::Kind::Simplex ? c.dim - 1 : c.dim;
}

/// Deterministic default family: the first affine-dimension coordinate
/// functionals rescaled to [-1, 1], the constant 1, then seeded pseudo-random
/// rational affine combinations, normalized to sup-norm <= 1 by vertex
/// evaluation.
inline AffineFunctionFamily default_family(const ConvexSet& domain, int n,
                                           unsigned long long seed = 0) {
  if (domain.kind != ConvexSet::Kind::Simplex &&
      domain.kind != ConvexSet::Kind::Box)
    throw domain_error("default_family requires a simplex or box domain");
  int d = affine_dimension(domain);
  if (n < d + 1)
    throw domain_error("family size must be at least dim + 1 = " +
                       std::to_string(d + 1));
  auto vertices = domain.vertices();
  auto normalized = [&](AffineFunction f) {
    double m = 0;
    for (const auto& v : vertices) m = std::max(m, std::abs(f(v)));
    if (m > 1.0) {
      f.coeff /= m;
      f.offset /= m;
    }
    return f;
  };

  AffineFunctionFamily fam;
  fam.domain = domain;
  for (int i = 0; i < d && static_cast<int>(fam.members.size()) < n; ++i) {
    AffineFunction f;
    f.coeff = Vec::Zero(domain.dim);
    if (domain.kind == ConvexSet::Kind::Simplex) {
      f.coeff[i] = 2.0;  // coordinate in [0,1] -> [-1,1]
      f.offset = -1.0;
    } else {
      double w = domain.hi[i] - domain.lo[i];
      f.coeff[i] = w > 0 ? 2.0 / w : 0.0;
      f.offset = w > 0 ? -(domain.hi[i] + domain.lo[i]) / w : 0.0;
    }
    fam.members.push_back(f);
  }
  if (static_cast<int>(fam.members.size()) < n)
    fam.members.push_back({Vec::Zero(domain.dim), 1.0});

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::uniform_int_distribution<int> num(-3, 3);
  std::uniform_int_distribution<int> den(1, 4);
  while (static_cast<int>(fam.members.size()) < n) {
    AffineFunction f;
    f.coeff = Vec::Zero(domain.dim);
    for (int i = 0; i < domain.dim; ++i)
      f.coeff[i] = static_cast<double>(num(rng)) / den(rng);
    f.offset = static_cast<double>(num(rng)) / den(rng);
    fam.members.push_back(normalized(f));
  }
  return fam;
}

/// T(x) = (f_n(x)/n), n = 1..N.
inline Vec embed(const AffineFunctionFamily& fam, const Vec& x) {
  if (!fam.domain.contains(x, kMembershipTol))
    throw domain_error("point is not in the embedding domain");
  Vec z(fam.members.size());
  for (size_t i = 0; i < fam.members.size(); ++i)
    z[static_cast<int>(i)] = fam.members[i](x) / static_cast<double>(i + 1);
  return z;
}

struct EmbeddingReport {
  bool separating = true;
  std::pair<int, int> witness{-1, -1};  // vertex pair not separated
  double affine_residual = 0;
  double injectivity_margin = 0;  // min pairwise distance of vertex images
  double modulus_forward = 0;     // max ||Tx - Ty|| / ||x - y||
  double modulus_inverse = 0;     // max ||x - y|| / ||Tx - Ty||
};

/// Check affineness, injectivity and empirical bi-continuity moduli of T.
inline EmbeddingReport verify_embedding(const AffineFunctionFamily& fam,
                                        int samples,
                                        unsigned long long seed = 0) {
  EmbeddingReport rep;
  auto vs = fam.domain.vertices();
  std::vector<Vec> images;
  for (const auto& v : vs) images.push_back(embed(fam, v));
  rep.injectivity_margin = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < vs.size(); ++i)
    for (size_t j = i + 1; j < vs.size(); ++j) {
      double d = (images[i] - images[j]).norm();
      if (d < rep.injectivity_margin) rep.injectivity_margin = d;
      if (d <= 1e-12 && (vs[i] - vs[j]).norm() > 1e-12) {
        rep.separating = false;
        rep.witness = {static_cast<int>(i), static_cast<int>(j)};
      }
    }
  if (!rep.separating) return rep;

  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Vec x = fam.domain.sample(rng);
    Vec y = fam.domain.sample(rng);
    double lambda = u(rng);
    Vec mid = lambda * x + (1 - lambda) * y;
    Vec tx = embed(fam, x), ty = embed(fam, y);
    rep.affine_residual =
        std::max(rep.affine_residual,
                 (embed(fam, mid) - (lambda * tx + (1 - lambda) * ty))
                     .lpNorm<Eigen::Infinity>());
    double dx = (x - y).norm(), dz = (tx - ty).norm();
    if (dx > 1e-9 && dz > 1e-15) {
      rep.modulus_forward = std::max(rep.modulus_forward, dz / dx);
      rep.modulus_inverse = std::max(rep.modulus_inverse, dx / dz);
    }
  }
  return rep;
}

/// The embedded copy T(Q) as a convex model, with affine recovery of domain
/// points from image points (constrained least squares, solved once).
inline ConvexSet embedded_model(const AffineFunctionFamily& fam) {
  const int m = fam.domain.dim;
  const int n = static_cast<int>(fam.members.size());
  Mat T(n, m);
  Vec t(n);
  for (int i = 0; i < n; ++i) {
    T.row(i) = fam.members[i].coeff / static_cast<double>(i + 1);
    t[i] = fam.members[i].offset / static_cast<double>(i + 1);
  }
  // minimize ||T x + t - z||^2 subject to the affine-hull constraint
  // (sum x = 1 for the simplex); KKT system solved symbolically in z.
  int nc = fam.domain.kind == ConvexSet::Kind::Simplex ? 1 : 0;
  Mat K(m + nc, m + nc);
  K.setZero();
  K.topLeftCorner(m, m) = T.transpose() * T;
  if (nc) {
    K.topRightCorner(m, 1) = Vec::Ones(m);
    K.bottomLeftCorner(1, m) = Vec::Ones(m).transpose();
  }
  Mat Kinv = K.fullPivLu().inverse();
  Mat P = Kinv.topLeftCorner(m, m);  // x = P (T' (z - t)) + P_c d
  Mat rec = P * T.transpose();
  Vec rec_off = -rec * t;
  if (nc) rec_off += Kinv.topRightCorner(m, 1) * 1.0;

  ConvexSet e;
  e.kind = ConvexSet::Kind::Embedded;
  e.dim = n;
  e.domain = std::make_shared<ConvexSet>(fam.domain);
  e.fwd_mat = T;
  e.fwd_off = t;
  e.rec_mat = rec;
  e.rec_off = rec_off;
  return e;
}

/// Push an action on the domain forward through T: the conjugated generator
/// images are dense affine maps on T(Q), with h.T(x) = T(h.x) by
/// construction.
inline GroupAction conjugated_action(const GroupAction& action,
                                     const AffineFunctionFamily& fam) {
  if (!(action.model.kind == fam.domain.kind &&
        action.model.dim == fam.domain.dim))
    throw domain_error("action model does not match the embedding domain");
  ConvexSet image = embedded_model(fam);
  const int m = fam.domain.dim;
  auto conjugate = [&](const AffineMap& g) {
    Mat A = g.dense_matrix(m);
    Vec b = g.dense_offset(m);
    AffineMap conj;
    conj.kind = AffineMap::Kind::Dense;
    conj.A = image.fwd_mat * A * image.rec_mat;
    conj.b = image.fwd_mat * (A * image.rec_off + b) + image.fwd_off;
    return conj;
  };
  std::vector<AffineMap> images, inverses;
  for (const auto& g : action.images) images.push_back(conjugate(g));
  // the conjugated maps are rank-deficient on the ambient space, so the
  // inverses must be conjugated from the domain-side inverses as well
  for (const auto& g : action.inverse_images) inverses.push_back(conjugate(g));
  return make_action(action.group, image, std::move(images),
                     std::move(inverses), Seminorm::lp(2));
}

}  // namespace afplab
