#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <numbers>

#include "afplab/reiter.hpp"

using Mat = Eigen::MatrixXd;

using namespace afplab;

TEST_CASE("translation is an exact isometry") {
  Group f{GroupKind::Free, 2, {}};
  Ball b = ball(f, standard_symmetric_gens(f), 2);
  GroupDensity d = uniform_density(f, b.elements, 1);
  GroupElement g{f, {1, 2, -1}};
  CHECK(translate(g, d).norm() == d.norm());
  GroupDensity d2 = uniform_density(f, b.elements, 2);
  CHECK(translate(g, d2).norm() == d2.norm());
  // round trip restores the original support exactly
  GroupDensity back = translate(inv(g), translate(g, d));
  CHECK(lp_distance(back, d) == 0.0);
}

TEST_CASE("lp distance merges disjoint and shared support correctly") {
  Group z{GroupKind::Zd, 1, {}};
  GroupDensity a = make_density(z, 1, {{{z, {0}}, 0.5}, {{z, {1}}, 0.5}});
  GroupDensity b = make_density(z, 1, {{{z, {1}}, 0.25}, {{z, {2}}, 0.75}});
  CHECK(lp_distance(a, b) == doctest::Approx(0.5 + 0.25 + 0.75));
  CHECK(reiter_objective(point_mass(GroupElement{z, {0}}),
                         {GroupElement{z, {1}}}) == doctest::Approx(2.0));
}

TEST_CASE("density validation") {
  Group z{GroupKind::Zd, 1, {}};
  CHECK_THROWS_AS(make_density(z, 3, {}), domain_error);
  CHECK_THROWS_AS(make_density(z, 1, {{{z, {0}}, -1.0}}), domain_error);
  CHECK_THROWS_AS(
      make_density(z, 1, {{{z, {0}}, 0.5}, {{z, {0}}, 0.5}}), domain_error);
  CHECK_THROWS_AS(uniform_density(z, {}, 1), domain_error);
}

TEST_CASE("free group l1 floors via LP") {
  Group f{GroupKind::Free, 2, {}};
  auto gens = standard_generators(f);
  ReiterResult r0 = reiter_minimize(f, gens, 0, 1, ReiterMethod::Lp);
  CHECK(r0.objective == doctest::Approx(2.0).epsilon(1e-12));
  ReiterResult r1 = reiter_minimize(f, gens, 1, 1, ReiterMethod::Lp);
  CHECK(r1.objective == doctest::Approx(1.2).epsilon(1e-9));
  ReiterResult r2 = reiter_minimize(f, gens, 2, 1, ReiterMethod::Lp);
  CHECK(r2.objective == doctest::Approx(18.0 / 17.0).epsilon(1e-9));
}

TEST_CASE("subgradient agrees with the LP on small radii") {
  Group f{GroupKind::Free, 2, {}};
  auto gens = standard_generators(f);
  ReiterOptions opt;
  opt.iterations = 3000;
  for (int R : {1, 2}) {
    double lp = reiter_minimize(f, gens, R, 1, ReiterMethod::Lp).objective;
    double sg =
        reiter_minimize(f, gens, R, 1, ReiterMethod::Subgradient, opt)
            .objective;
    CHECK(sg >= lp - 1e-12);  // LP value is a true lower bound
    CHECK(sg <= lp + 1e-3);
  }
}

TEST_CASE("reported objective is reproducible from the density") {
  Group z2{GroupKind::Zd, 2, {}};
  auto gens = standard_generators(z2);
  ReiterOptions opt;
  opt.iterations = 500;
  ReiterResult r =
      reiter_minimize(z2, gens, 4, 1, ReiterMethod::Subgradient, opt);
  CHECK(r.objective == doctest::Approx(reiter_objective(r.density, gens))
                           .epsilon(1e-12));
  CHECK(r.density.norm() == doctest::Approx(1.0).epsilon(1e-12));
  // trace is the running best, hence non-increasing
  for (size_t i = 1; i < r.trace.size(); ++i)
    CHECK(r.trace[i] <= r.trace[i - 1] + 1e-15);
}

TEST_CASE("l2 subgradient drives Z displacement down") {
  Group z{GroupKind::Zd, 1, {}};
  auto gens = standard_generators(z);
  ReiterOptions opt;
  opt.iterations = 1500;
  ReiterResult r =
      reiter_minimize(z, gens, 30, 2, ReiterMethod::Subgradient, opt);
  CHECK(r.objective < 0.3);
  CHECK(r.density.p == 2);
}

TEST_CASE("method preconditions") {
  Group f{GroupKind::Free, 2, {}};
  auto gens = standard_generators(f);
  CHECK_THROWS_AS(reiter_minimize(f, gens, 1, 2, ReiterMethod::Lp),
                  domain_error);
  CHECK_THROWS_AS(reiter_minimize(f, gens, 1, 3, ReiterMethod::Subgradient),
                  domain_error);
  ReiterOptions tight;
  tight.lp_support_cap = 3;
  CHECK_THROWS_AS(reiter_minimize(f, gens, 2, 1, ReiterMethod::Lp, tight),
                  resource_error);
}

TEST_CASE("Folner sets witness the Reiter condition") {
  // uniform density on Phi: ||g.f - f||_1 = |g Phi sym Phi| / |Phi| exactly
  const std::vector<Group> groups = {{GroupKind::Zd, 1, {}},
                                     {GroupKind::Zd, 2, {}},
                                     {GroupKind::Heisenberg, 0, {}}};
  for (const auto& g : groups) {
    FolnerSchedule sched = box_schedule(g);
    auto gens = standard_generators(g);
    for (int i = 1; i <= 3; ++i) {
      FolnerSet phi = sched.set_at(i);
      GroupDensity u = uniform_density(g, phi.elements, 1);
      for (const auto& gen : gens) {
        double obj = lp_distance(translate(gen, u), u);
        Rational ratio = boundary_ratio(phi, gen).ratio;
        CHECK(obj ==
              doctest::Approx(boost::rational_cast<double>(ratio))
                  .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Kesten estimate on Z dominates the truncated eigenvalue") {
  Group z{GroupKind::Zd, 1, {}};
  for (int R : {10, 40}) {
    // the gap above the truncated eigenvalue shrinks like 1/R^2, so the
    // power iteration needs a few thousand rounds at R = 40
    double est = kesten_estimate(z, standard_symmetric_gens(z), R, 4000);
    double lambda = std::cos(std::numbers::pi / (2.0 * R + 2.0));
    CHECK(est >= lambda - 1e-9);
    CHECK(est <= 1.0 + 1e-9);
  }
}

TEST_CASE("free-group Kesten estimate matches the radial reduction") {
  // on radial functions the truncated Markov operator of F2 is the
  // tridiagonal matrix with couplings 1/2 (level 0-1) and sqrt(3)/4 beyond
  const int R = 8;
  Mat T = Mat::Zero(R + 1, R + 1);
  for (int l = 0; l < R; ++l) {
    double c = l == 0 ? 0.5 : std::sqrt(3.0) / 4.0;
    T(l, l + 1) = T(l + 1, l) = c;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(T);
  double lambda = es.eigenvalues().maxCoeff();

  Group f{GroupKind::Free, 2, {}};
  double est = kesten_estimate(f, standard_symmetric_gens(f), R, 300);
  CHECK(est >= lambda - 1e-9);          // leak only adds mass
  CHECK(est <= std::sqrt(3.0) / 2.0 + 1e-9);  // true operator norm
  CHECK(est == doctest::Approx(lambda).epsilon(5e-3));
}

TEST_CASE("Kesten preconditions") {
  Group z{GroupKind::Zd, 1, {}};
  GeneratingSet asym{standard_generators(z), false};
  CHECK_THROWS_AS(kesten_estimate(z, asym, 3), domain_error);
  CHECK_THROWS_AS(kesten_estimate(z, standard_symmetric_gens(z), 3, 0),
                  domain_error);
}

TEST_CASE("counterexample run contrasts F2 with Z^2") {
  CounterexampleOptions opt;
  opt.radii = {0, 1, 2, 3};
  opt.control_radius = 12;
  opt.reiter.iterations = 1500;
  CounterexampleReport rep = counterexample_run(opt);
  REQUIRE(rep.free_group.size() == 4);
  CHECK(rep.free_group[0].floor == doctest::Approx(2.0));
  CHECK(rep.free_group[0].method == "lp");
  CHECK(rep.free_group[3].method == "subgradient");
  for (size_t i = 1; i < rep.free_group.size(); ++i)
    CHECK(rep.free_group[i].floor <= rep.free_group[i - 1].floor + 1e-9);
  CHECK(rep.no_decay);
  CHECK(rep.control.floor < rep.free_group.back().floor);
  // prob(N) view: indices are valid word indices of the support
  for (const auto& [n, m] : rep.free_group[1].prob_n_view) {
    CHECK(m > 0);
    CHECK(n < 5);  // support inside ball(1) = first five indices
  }
}
