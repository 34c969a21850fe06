// Acceptance gate: one line per criterion, nonzero exit if any fails.
// Tolerances are pinned here, not configurable.

#include <cstdio>
#include <filesystem>
#include <numbers>
#include <random>

#include "afplab/experiments.hpp"

using namespace afplab;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %2d %-28s %s\n", ok ? "PASS" : "FAIL", number, title,
              detail.c_str());
  if (!ok) ++failures;
}

std::string fmt(double v) { return format_float(v); }

// 1. exact boundary ratios on integer boxes
void criterion_folner_exactness() {
  Group z{GroupKind::Zd, 1, {}};
  FolnerSchedule sched = box_schedule(z);
  GroupElement one{z, {1}};
  bool ok = true;
  for (int i = 1; i <= 10; ++i) {
    long long n = sched.side(i);  // 2, 4, ..., 1024
    Rational r = boundary_ratio(sched.set_at(i), one).ratio;
    ok = ok && r == Rational(2, n);
  }
  Group z2{GroupKind::Zd, 2, {}};
  Rational r2 = boundary_ratio(box_schedule(z2).set_at(2),
                               GroupElement{z2, {1, 0}}).ratio;
  ok = ok && r2 == Rational(1, 2);
  report(1, "Folner exactness", ok,
         "Z box ratios 2/n for n=2..1024, Z^2 side-4 ratio " +
             std::to_string(r2.numerator()) + "/" +
             std::to_string(r2.denominator()));
}

// 2. |Phi \ gPhi| = |gPhi \ Phi| exactly on random samples
void criterion_split_identity() {
  const std::vector<Group> catalog = {
      {GroupKind::Zd, 1, {}},         {GroupKind::Zd, 2, {}},
      {GroupKind::Free, 2, {}},       {GroupKind::Heisenberg, 0, {}},
      {GroupKind::Sym, 4, {}},        {GroupKind::Cyclic, 0, {4, 9}},
  };
  std::mt19937_64 rng(2024);
  int checked = 0, violations = 0;
  while (checked < 100) {
    const Group& g = catalog[checked % catalog.size()];
    Ball b = ball(g, standard_symmetric_gens(g), 2);
    std::uniform_int_distribution<size_t> pick(0, b.elements.size() - 1);
    std::vector<GroupElement> subset;
    size_t want = 1 + pick(rng) % b.elements.size();
    for (size_t j = 0; j < want; ++j) subset.push_back(b.elements[pick(rng)]);
    BoundaryRatio br =
        boundary_ratio(make_folner_set(g, subset), b.elements[pick(rng)]);
    if (br.only_original != br.only_translated) ++violations;
    ++checked;
  }
  report(2, "split identity", violations == 0,
         "100 random samples, " + std::to_string(violations) + " violations");
}

// 3. decomposition residual and displacement bound
void criterion_decomposition() {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  double worst = 0;
  int cases = 0;

  auto push = [&](double r) {
    worst = std::max(worst, r);
    ++cases;
  };

  for (int t = 0; t < 20; ++t) {
    GroupAction rot = rotation_action({angle(rng)});
    FolnerSet phi = box_schedule(rot.group).set_at(3);
    push(verify_decomposition(rot, phi, rot.model.sample(rng),
                              GroupElement{rot.group, {1}}, rot.norm)
             .residual);
  }
  for (int t = 0; t < 15; ++t) {
    GroupAction rot = rotation_action({angle(rng), angle(rng)});
    FolnerSet phi = box_schedule(rot.group).set_at(2);
    push(verify_decomposition(rot, phi, rot.model.sample(rng),
                              GroupElement{rot.group, {0, 1}}, rot.norm)
             .residual);
  }
  GroupAction perm = coordinate_permutation_action(5);
  Ball b2 = ball(perm.group, standard_symmetric_gens(perm.group), 2);
  std::uniform_int_distribution<size_t> pick(0, b2.elements.size() - 1);
  for (int t = 0; t < 15; ++t) {
    FolnerSet phi = make_folner_set(perm.group, b2.elements);
    push(verify_decomposition(perm, phi, perm.model.sample(rng),
                              b2.elements[pick(rng)], perm.norm)
             .residual);
  }

  bool bound_ok = true;
  const double theta = 2.0 * std::numbers::pi * (std::sqrt(2.0) - 1.0);
  GroupAction rot = rotation_action({theta});
  Vec x0(2);
  x0 << 1, 0;
  AfpRunOptions opt;
  opt.max_index = 8;
  AveragingRun run = afp_run(rot, box_schedule(rot.group), x0, opt);
  for (const auto& rec : run.records)
    for (const auto& gr : rec.per_generator)
      bound_ok = bound_ok && gr.displacement <= gr.bound + 1e-9;

  report(3, "decomposition theorem", worst <= 1e-9 && bound_ok,
         std::to_string(cases) + " randomized cases, max residual " +
             fmt(worst) + ", bound " + (bound_ok ? "holds" : "VIOLATED"));
}

// 4. rotation averages decay at the closed-form geometric rate
void criterion_amenable_decay() {
  const double theta = 2.0 * std::numbers::pi * (std::sqrt(2.0) - 1.0);
  GroupAction rot = rotation_action({theta});
  Vec x0(2);
  x0 << 1, 0;
  AfpRunOptions opt;
  opt.max_index = 10;  // boxes n = 2^k up to 1024
  opt.epsilon = 1e-2;
  opt.verify = false;
  AveragingRun run = afp_run(rot, box_schedule(rot.group), x0, opt);
  double measured = run.records.back().max_displacement;
  double n = 1024;
  // |x_n - g.x_n| = 2 sin(theta/2) |sin(n theta/2)| / (n sin(theta/2))
  double oracle = 2.0 * std::abs(std::sin(n * theta / 2.0)) / n;
  double diam = rot.model.diameter(rot.norm);
  bool ok = measured <= 1.1 * oracle && oracle <= 1.1 * measured &&
            measured < 0.01 * diam;
  report(4, "amenable decay", ok,
         "n=1024 displacement " + fmt(measured) + " vs oracle " + fmt(oracle));
}

// 5. finite group: whole-group average is exactly invariant
void criterion_finite_fixed_point() {
  GroupAction perm = coordinate_permutation_action(3);
  AfpRunOptions opt;
  opt.epsilon = 1e-11;
  Vec x0(3);
  x0 << 1, 0, 0;
  AveragingRun run = afp_run(perm, whole_group_schedule(perm.group), x0, opt);
  report(5, "Sym(3) exact fixed point", run.final_displacement <= 1e-12,
         "displacement " + fmt(run.final_displacement));
}

// 6. free-group l1 floors stay up; amenable control comes down
void criterion_counterexample() {
  CounterexampleOptions opt;
  opt.reiter.cap = ball_cap_from_env(2'200'000);
  CounterexampleReport rep = counterexample_run(opt);
  double c0 = rep.free_group.front().floor;
  double c2 = 0, c6 = 0;
  bool monotone = true;
  for (size_t i = 0; i < rep.free_group.size(); ++i) {
    if (rep.free_group[i].radius == 2) c2 = rep.free_group[i].floor;
    if (rep.free_group[i].radius == 6) c6 = rep.free_group[i].floor;
    if (i > 0)
      monotone = monotone &&
                 rep.free_group[i].floor <= rep.free_group[i - 1].floor + 1e-9;
  }
  bool ok = c0 == 2.0 && c2 > 0.1 && monotone && c6 / c2 >= 0.5 &&
            rep.control.floor < 0.1;
  report(6, "counterexample floors", ok,
         "c0=" + fmt(c0) + " c2=" + fmt(c2) + " c6=" + fmt(c6) +
             " control=" + fmt(rep.control.floor));
}

// 7. spectral gap for F2, none for Z
void criterion_spectral_contrast() {
  long long cap = ball_cap_from_env(2'200'000);
  Group f2{GroupKind::Free, 2, {}};
  double ef = kesten_estimate(f2, standard_symmetric_gens(f2), 12, 60, cap);
  Group z{GroupKind::Zd, 1, {}};
  double ez = kesten_estimate(z, standard_symmetric_gens(z), 200, 400, cap);
  bool ok = ef >= 0.84 && ef <= 0.88 && ez > 0.99 && ef <= 1.0 + 1e-9 &&
            ez <= 1.0 + 1e-9;
  report(7, "spectral contrast", ok,
         "F2 R=12: " + fmt(ef) + ", Z R=200: " + fmt(ez));
}

// 8. uniform densities on Folner sets witness the Reiter condition
void criterion_reiter_folner_link() {
  const std::vector<Group> groups = {{GroupKind::Zd, 1, {}},
                                     {GroupKind::Zd, 2, {}},
                                     {GroupKind::Heisenberg, 0, {}}};
  bool ok = true;
  double worst_gap = 0;
  for (const auto& g : groups) {
    FolnerSchedule sched = box_schedule(g);
    auto gens = standard_generators(g);
    int top = g.kind == GroupKind::Heisenberg ? 4 : 5;  // cap on H3 box size
    for (int i = 0; i <= top; ++i) {
      FolnerSet phi = sched.set_at(i);
      GroupDensity u = uniform_density(g, phi.elements, 1);
      double obj = reiter_objective(u, gens);
      double max_ratio = 0;
      for (const auto& gen : gens)
        max_ratio = std::max(max_ratio, boost::rational_cast<double>(
                                            boundary_ratio(phi, gen).ratio));
      ok = ok && obj <= max_ratio + 1e-12;
      worst_gap = std::max(worst_gap, obj - max_ratio);
    }
  }
  report(8, "Reiter-Folner link", ok,
         "objective <= max boundary ratio, worst gap " + fmt(worst_gap));
}

// 9. the l2 embedding device
void criterion_embedding() {
  AffineFunctionFamily fam = default_family(ConvexSet::simplex(3), 10, 77);
  EmbeddingReport rep = verify_embedding(fam, 1000, 77);
  GroupAction perm = coordinate_permutation_action(3);
  GroupAction conj = conjugated_action(perm, fam);

  double comm = 0;
  bool disp_ok = true;
  std::mt19937_64 rng(78);
  Ball all = whole_group(perm.group, standard_symmetric_gens(perm.group));
  for (int t = 0; t < 100; ++t) {
    Vec x = perm.model.sample(rng);
    Vec z = embed(fam, x);
    for (const auto& g : all.elements)
      comm = std::max(comm,
                      (embed(fam, perm.act(g, x)) - conj.act(g, z))
                          .lpNorm<Eigen::Infinity>());
    for (const auto& g : perm.gens.generators) {
      double orig = (x - perm.act(g, x)).norm();
      double image = (z - conj.act(g, z)).norm();
      disp_ok = disp_ok &&
                image <= rep.modulus_forward * orig * (1 + 1e-3) + 1e-9;
    }
  }
  bool ok = rep.separating && rep.affine_residual <= 1e-12 && comm <= 1e-9 &&
            disp_ok;
  report(9, "l2 embedding", ok,
         "affine residual " + fmt(rep.affine_residual) + ", commutation " +
             fmt(comm));
}

// 10. the whole suite is a pure function of config + seed
void criterion_determinism() {
  fs::path base = fs::temp_directory_path() / "afplab_acceptance";
  fs::remove_all(base);
  fs::create_directories(base / "configs");

  write_text(base / "configs" / "profile.json",
             R"({"experiment":"folner_profile","group":{"group":"H3Z"},)"
             R"("schedule":"box","max_index":3,"seed":5})");
  write_text(base / "configs" / "afp.json",
             R"({"experiment":"afp_run","group":{"group":"Z","dim":1},)"
             R"("action":{"type":"rotation","angles":[0.77]},)"
             R"("schedule":"box","max_index":8,"seed":5})");
  write_text(base / "configs" / "reiter.json",
             R"({"experiment":"reiter","group":{"group":"F","rank":2},)"
             R"("radius":3,"p":1,"method":"subgradient","iterations":400,)"
             R"("seed":5})");
  write_text(base / "configs" / "embed.json",
             R"({"experiment":"embed","model":{"kind":"simplex","dim":4},)"
             R"("family_size":9,"samples":300,"seed":5})");
  write_text(base / "configs" / "manifest.json",
             R"({"configs":["profile.json","afp.json","reiter.json",)"
             R"("embed.json"]})");

  run_suite(base / "configs" / "manifest.json", base / "o1");
  run_suite(base / "configs" / "manifest.json", base / "o2");

  bool identical = true;
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(base / "o1")) {
    std::string name = entry.path().filename().string();
    if (name.ends_with(".meta.json")) continue;  // timestamps live here
    identical =
        identical && read_text(entry.path()) == read_text(base / "o2" / name);
    ++compared;
  }
  report(10, "determinism", identical && compared >= 9,
         std::to_string(compared) + " report files byte-compared");
}

}  // namespace

int main() {
  criterion_folner_exactness();
  criterion_split_identity();
  criterion_decomposition();
  criterion_amenable_decay();
  criterion_finite_fixed_point();
  criterion_counterexample();
  criterion_spectral_contrast();
  criterion_reiter_folner_link();
  criterion_embedding();
  criterion_determinism();
  if (failures) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
