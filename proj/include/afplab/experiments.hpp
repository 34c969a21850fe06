#pragma once

#include <cstdlib>
#include <ctime>
#include <optional>
#include <string>
#include <thread>

#include "afplab/average.hpp"
#include "afplab/embed.hpp"
#include "afplab/reiter.hpp"
#include "afplab/report.hpp"

namespace afplab {

// ---------------------------------------------------------------------------
// Batch experiment runner: JSON config in, JSON report (+ CSV traces) out.
// Configs are schema-checked strictly: unknown keys are rejected with the
// offending path, and a seed is mandatory. Reports carry no timestamps; the
// timestamp goes to a sidecar .meta.json so identical config + seed yields
// byte-identical reports.
// ---------------------------------------------------------------------------

namespace cfg {

inline void check_keys(const json& obj, const std::string& path,
                       std::initializer_list<const char*> required,
                       std::initializer_list<const char*> optional) {
  if (!obj.is_object())
    throw validation_error("expected an object at " + path);
  for (const char* k : required)
    if (!obj.contains(k))
      throw validation_error("missing key " + path + "/" + k);
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* r : required) known |= (k == r);
    for (const char* o : optional) known |= (k == o);
    if (!known) throw validation_error("unknown key " + path + "/" + k);
  }
}

template <typename T>
T get(const json& obj, const std::string& path, const char* key) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw validation_error("bad value at " + path + "/" + key);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& path, const char* key,
         T fallback) {
  if (!obj.contains(key)) return fallback;
  return get<T>(obj, path, key);
}

inline Group parse_group(const json& j, const std::string& path) {
  check_keys(j, path, {"group"}, {"dim", "rank", "n", "moduli"});
  std::string name = get<std::string>(j, path, "group");
  if (name == "Z") {
    int dim = get_or<int>(j, path, "dim", 1);
    if (dim < 1) throw validation_error("bad value at " + path + "/dim");
    return {GroupKind::Zd, dim, {}};
  }
  if (name == "F") {
    int rank = get<int>(j, path, "rank");
    if (rank < 1) throw validation_error("bad value at " + path + "/rank");
    return {GroupKind::Free, rank, {}};
  }
  if (name == "H3Z") return {GroupKind::Heisenberg, 0, {}};
  if (name == "Sym") {
    int n = get<int>(j, path, "n");
    if (n < 2) throw validation_error("bad value at " + path + "/n");
    return {GroupKind::Sym, n, {}};
  }
  if (name == "Zmod") {
    auto moduli = get<std::vector<long long>>(j, path, "moduli");
    if (moduli.empty()) throw validation_error("bad value at " + path +
                                               "/moduli");
    for (long long m : moduli)
      if (m < 2) throw validation_error("bad value at " + path + "/moduli");
    return {GroupKind::Cyclic, 0, moduli};
  }
  throw validation_error("unknown group name at " + path + "/group");
}

inline json group_json(const Group& g) {
  switch (g.kind) {
    case GroupKind::Zd: return {{"group", "Z"}, {"dim", g.param}};
    case GroupKind::Free: return {{"group", "F"}, {"rank", g.param}};
    case GroupKind::Heisenberg: return {{"group", "H3Z"}};
    case GroupKind::Sym: return {{"group", "Sym"}, {"n", g.param}};
    case GroupKind::Cyclic: return {{"group", "Zmod"}, {"moduli", g.moduli}};
  }
  return {};
}

inline FolnerSchedule parse_schedule(const std::string& kind, const Group& g,
                                     const std::string& path) {
  if (kind == "box") return box_schedule(g);
  if (kind == "ball") return ball_schedule(g, standard_symmetric_gens(g));
  if (kind == "whole_group") return whole_group_schedule(g);
  throw validation_error("unknown schedule kind at " + path + "/schedule");
}

inline GroupAction parse_action(const json& j, const Group& g,
                                const std::string& path) {
  check_keys(j, path, {"type"}, {"angles", "radius"});
  std::string type = get<std::string>(j, path, "type");
  if (type == "rotation") {
    if (g.kind != GroupKind::Zd)
      throw validation_error("rotation action requires a Z^d group (" + path +
                             ")");
    auto angles = get<std::vector<double>>(j, path, "angles");
    if (static_cast<int>(angles.size()) != g.param)
      throw validation_error("one angle per generator required at " + path +
                             "/angles");
    return rotation_action(angles, get_or<double>(j, path, "radius", 1.0));
  }
  if (type == "coordinate_permutation") {
    if (g.kind != GroupKind::Sym)
      throw validation_error("coordinate permutation requires Sym(n) (" +
                             path + ")");
    return coordinate_permutation_action(g.param);
  }
  throw validation_error("unknown action type at " + path + "/type");
}

}  // namespace cfg

struct ExperimentResult {
  json report;
  std::map<std::string, std::string> csv_files;  // suffix -> content
  bool pass = true;
  std::string verdict;
};

inline long long ball_cap_from_env(long long fallback = kDefaultBallCap) {
  if (const char* v = std::getenv("AFPLAB_BALL_CAP")) {
    try {
      return std::stoll(v);
    } catch (...) {
      throw validation_error("AFPLAB_BALL_CAP is not an integer");
    }
  }
  return fallback;
}

// ---------------------------- experiment kinds -----------------------------

namespace detail_exp {

inline ExperimentResult run_folner_profile(const json& c, long long cap) {
  cfg::check_keys(c, "", {"experiment", "group", "schedule", "max_index",
                          "seed"}, {});
  Group g = cfg::parse_group(c.at("group"), "/group");
  FolnerSchedule sched =
      cfg::parse_schedule(cfg::get<std::string>(c, "", "schedule"), g,
                          "");
  int max_index = cfg::get<int>(c, "", "max_index");
  auto rows = ratio_profile(sched, sched.gens.generators, max_index, cap);

  ExperimentResult res;
  res.csv_files["profile"] = ratio_profile_csv(rows);
  json jrows = json::array();
  for (const auto& r : rows)
    jrows.push_back({{"index", r.index},
                     {"set_size", r.set_size},
                     {"generator", r.generator},
                     {"ratio", rational_json(r.ratio)},
                     {"ratio_float",
                      boost::rational_cast<double>(r.ratio)}});
  res.report = {{"experiment", "folner_profile"},
                {"config_echo", c},
                {"rows", jrows}};
  res.verdict = "profile computed (" + std::to_string(rows.size()) + " rows)";
  return res;
}

inline ExperimentResult run_afp(const json& c, long long cap) {
  cfg::check_keys(c, "",
                  {"experiment", "group", "action", "schedule", "seed"},
                  {"max_index", "epsilon", "x0", "verify"});
  Group g = cfg::parse_group(c.at("group"), "/group");
  GroupAction action = cfg::parse_action(c.at("action"), g, "/action");
  FolnerSchedule sched = cfg::parse_schedule(
      cfg::get<std::string>(c, "", "schedule"), g, "");

  AfpRunOptions opt;
  opt.max_index = cfg::get_or<int>(c, "", "max_index", 12);
  opt.epsilon = cfg::get_or<double>(c, "", "epsilon", 1e-2);
  opt.verify = cfg::get_or<bool>(c, "", "verify", true);
  opt.cap = cap;

  Vec x0;
  if (c.contains("x0")) {
    auto v = cfg::get<std::vector<double>>(c, "", "x0");
    x0 = Eigen::Map<const Vec>(v.data(), static_cast<long>(v.size()));
  } else {
    x0 = action.model.vertices().front();
  }

  AveragingRun run = afp_run(action, sched, x0, opt);
  json records = json::array();
  for (const auto& rec : run.records) {
    json gens = json::array();
    for (const auto& gr : rec.per_generator)
      gens.push_back({{"label", gr.generator},
                      {"displacement", gr.displacement},
                      {"ratio", rational_json(gr.ratio)},
                      {"bound", gr.bound},
                      {"residual", gr.residual}});
    records.push_back({{"index", rec.index},
                       {"set_size", rec.set_size},
                       {"per_generator", gens},
                       {"max_displacement", rec.max_displacement}});
  }
  ExperimentResult res;
  res.report = {{"experiment", "afp_run"},
                {"config_echo", c},
                {"records", records},
                {"verdict",
                 json{{"success", run.success},
                      {"final_index", run.final_index},
                      {"final_displacement", run.final_displacement},
                      {"epsilon", run.epsilon}}}};
  res.verdict = run.success
                    ? "SUCCESS: displacement " +
                          format_float(run.final_displacement) +
                          " < epsilon at index " +
                          std::to_string(run.final_index)
                    : "no decay observed through index " +
                          std::to_string(run.final_index) +
                          " (displacement " +
                          format_float(run.final_displacement) + ")";
  // the run itself always "passes"; SUCCESS is a statement about the action
  std::string csv = "index,set_size,generator,displacement,ratio_float,bound,"
                    "residual\n";
  for (const auto& rec : run.records)
    for (const auto& gr : rec.per_generator)
      csv += std::to_string(rec.index) + "," + std::to_string(rec.set_size) +
             "," + gr.generator + "," + format_float(gr.displacement) + "," +
             format_float(boost::rational_cast<double>(gr.ratio)) + "," +
             format_float(gr.bound) + "," + format_float(gr.residual) + "\n";
  res.csv_files["records"] = csv;
  return res;
}

inline ExperimentResult run_reiter(const json& c, long long cap) {
  cfg::check_keys(c, "", {"experiment", "group", "radius", "p", "method",
                          "seed"},
                  {"iterations", "max_objective"});
  Group g = cfg::parse_group(c.at("group"), "/group");
  int radius = cfg::get<int>(c, "", "radius");
  double p = cfg::get<double>(c, "", "p");
  std::string method_name = cfg::get<std::string>(c, "", "method");
  ReiterMethod method;
  if (method_name == "lp")
    method = ReiterMethod::Lp;
  else if (method_name == "subgradient")
    method = ReiterMethod::Subgradient;
  else
    throw validation_error("unknown method at /method");

  ReiterOptions opt;
  opt.iterations = cfg::get_or<int>(c, "", "iterations", 3000);
  opt.cap = cap;
  ReiterResult r =
      reiter_minimize(g, standard_generators(g), radius, p, method, opt);

  ExperimentResult res;
  res.report = {{"experiment", "reiter"},
                {"config_echo", c},
                {"objective", r.objective},
                {"method", r.method},
                {"iterations", r.iterations},
                {"radius", r.radius},
                {"support_size", r.density.entries.size()}};
  if (c.contains("max_objective")) {
    double mo = cfg::get<double>(c, "", "max_objective");
    res.pass = r.objective <= mo;
    res.report["max_objective"] = mo;
  }
  std::string csv = "iteration,best_objective\n";
  for (size_t i = 0; i < r.trace.size(); ++i)
    csv += std::to_string(i + 1) + "," + format_float(r.trace[i]) + "\n";
  res.csv_files["trace"] = csv;
  res.verdict = "objective " + format_float(r.objective) + " at radius " +
                std::to_string(radius) + (res.pass ? "" : " (ABOVE CAP)");
  return res;
}

inline ExperimentResult run_kesten(const json& c, long long cap) {
  cfg::check_keys(c, "", {"experiment", "group", "radius", "seed"},
                  {"iterations", "range"});
  Group g = cfg::parse_group(c.at("group"), "/group");
  int radius = cfg::get<int>(c, "", "radius");
  int iters = cfg::get_or<int>(c, "", "iterations", 200);
  double est = kesten_estimate(g, standard_symmetric_gens(g), radius, iters,
                               cap);
  ExperimentResult res;
  res.report = {{"experiment", "kesten"},
                {"config_echo", c},
                {"estimate", est},
                {"radius", radius},
                {"iterations", iters}};
  if (c.contains("range")) {
    auto range = cfg::get<std::vector<double>>(c, "", "range");
    if (range.size() != 2) throw validation_error("bad value at /range");
    res.pass = est >= range[0] && est <= range[1];
    res.report["range"] = range;
  }
  res.verdict = "kesten estimate " + format_float(est) +
                (res.pass ? "" : " OUT OF RANGE");
  return res;
}

inline ExperimentResult run_counterexample(const json& c, long long cap) {
  cfg::check_keys(c, "", {"experiment", "seed"},
                  {"radii", "control_radius", "floor_threshold", "iterations",
                   "lp_max_radius"});
  CounterexampleOptions opt;
  opt.radii = cfg::get_or<std::vector<int>>(c, "", "radii", opt.radii);
  opt.control_radius = cfg::get_or<int>(c, "", "control_radius", 20);
  opt.floor_threshold = cfg::get_or<double>(c, "", "floor_threshold", 0.05);
  opt.lp_max_radius = cfg::get_or<int>(c, "", "lp_max_radius", 2);
  opt.reiter.iterations = cfg::get_or<int>(c, "", "iterations", 3000);
  opt.reiter.cap = cap;

  CounterexampleReport rep = counterexample_run(opt);
  json entries = json::array();
  std::string csv = "radius,iteration,best_objective\n";
  for (const auto& e : rep.free_group) {
    json view = json::array();
    for (const auto& [n, m] : e.prob_n_view)
      view.push_back({{"n", n}, {"mass", m}});
    entries.push_back({{"radius", e.radius},
                       {"floor", e.floor},
                       {"method", e.method},
                       {"iterations", e.iterations},
                       {"support_size", e.support_size},
                       {"prob_n_view", view}});
    for (size_t i = 0; i < e.trace.size(); ++i)
      csv += std::to_string(e.radius) + "," + std::to_string(i + 1) + "," +
             format_float(e.trace[i]) + "\n";
  }
  ExperimentResult res;
  res.report = {{"experiment", "counterexample"},
                {"config_echo", c},
                {"free_group", entries},
                {"control",
                 json{{"radius", rep.control.radius},
                      {"floor", rep.control.floor},
                      {"method", rep.control.method},
                      {"iterations", rep.control.iterations},
                      {"support_size", rep.control.support_size}}},
                {"floor_threshold", rep.floor_threshold},
                {"no_decay", rep.no_decay},
                {"control_decays", rep.control_decays}};
  res.pass = rep.no_decay && rep.control_decays;
  res.verdict = rep.no_decay
                    ? "no decay observed (all floors above " +
                          format_float(rep.floor_threshold) + ")"
                    : "UNEXPECTED decay of a free-group floor";
  res.csv_files["trace"] = csv;
  return res;
}

inline ExperimentResult run_embed(const json& c, long long /*cap*/) {
  cfg::check_keys(c, "", {"experiment", "model", "family_size", "samples",
                          "seed"},
                  {"action"});
  const json& jm = c.at("model");
  cfg::check_keys(jm, "/model", {"kind", "dim"}, {});
  std::string kind = cfg::get<std::string>(jm, "/model", "kind");
  int dim = cfg::get<int>(jm, "/model", "dim");
  ConvexSet domain;
  if (kind == "simplex")
    domain = ConvexSet::simplex(dim);
  else if (kind == "box")
    domain = ConvexSet::box(Vec::Zero(dim), Vec::Ones(dim));
  else
    throw validation_error("unknown model kind at /model/kind");

  unsigned long long seed = cfg::get<unsigned long long>(c, "", "seed");
  int family_size = cfg::get<int>(c, "", "family_size");
  int samples = cfg::get<int>(c, "", "samples");
  AffineFunctionFamily fam = default_family(domain, family_size, seed);
  EmbeddingReport rep = verify_embedding(fam, samples, seed);

  ExperimentResult res;
  res.report = {{"experiment", "embed"},
                {"config_echo", c},
                {"separating", rep.separating},
                {"affine_residual", rep.affine_residual},
                {"injectivity_margin", rep.injectivity_margin},
                {"modulus_forward", rep.modulus_forward},
                {"modulus_inverse", rep.modulus_inverse}};
  res.pass = rep.separating && rep.affine_residual <= 1e-9;
  if (!rep.separating)
    res.report["witness"] = {rep.witness.first, rep.witness.second};

  // conjugation check for the coordinate-permutation action on the simplex
  if (c.contains("action")) {
    std::string act = cfg::get<std::string>(c, "", "action");
    if (act != "coordinate_permutation" || kind != "simplex")
      throw validation_error("only coordinate_permutation on a simplex is "
                             "supported at /action");
    GroupAction action = coordinate_permutation_action(dim);
    GroupAction conj = conjugated_action(action, fam);
    std::mt19937_64 rng(seed + 17);
    double comm = 0;
    for (int s = 0; s < std::min(samples, 200); ++s) {
      Vec x = domain.sample(rng);
      for (const auto& g : action.gens.generators)
        comm = std::max(comm, (embed(fam, action.act(g, x)) -
                               conj.act(g, embed(fam, x)))
                                  .norm());
    }
    res.report["commutation_residual"] = comm;
    res.pass = res.pass && comm <= 1e-9;
  }

  // point cloud for plotting
  std::mt19937_64 rng(seed + 3);
  std::string csv;
  for (int i = 0; i < family_size; ++i)
    csv += (i ? "," : "") + ("z" + std::to_string(i + 1));
  csv += "\n";
  for (int s = 0; s < samples; ++s) {
    Vec z = embed(fam, domain.sample(rng));
    for (int i = 0; i < z.size(); ++i)
      csv += (i ? "," : "") + format_float(z[i]);
    csv += "\n";
  }
  res.csv_files["cloud"] = csv;
  res.verdict = res.pass ? "embedding verified" : "embedding check FAILED";
  return res;
}

}  // namespace detail_exp

// ------------------------------- dispatch ----------------------------------

inline ExperimentResult run_experiment(const json& config) {
  if (!config.is_object())
    throw validation_error("config must be a JSON object");
  if (!config.contains("experiment"))
    throw validation_error("missing key /experiment");
  if (!config.contains("seed"))
    throw validation_error("missing key /seed");
  long long cap = ball_cap_from_env();
  std::string kind = cfg::get<std::string>(config, "", "experiment");
  if (kind == "folner_profile")
    return detail_exp::run_folner_profile(config, cap);
  if (kind == "afp_run") return detail_exp::run_afp(config, cap);
  if (kind == "reiter") return detail_exp::run_reiter(config, cap);
  if (kind == "kesten") return detail_exp::run_kesten(config, cap);
  if (kind == "counterexample")
    return detail_exp::run_counterexample(config, cap);
  if (kind == "embed") return detail_exp::run_embed(config, cap);
  throw validation_error("unknown experiment kind at /experiment");
}

/// Run one config file; writes <stem>.json (+ <stem>.<suffix>.csv) under
/// out_dir and returns the result. The timestamp goes to <stem>.meta.json.
inline ExperimentResult run_config_file(
    const std::filesystem::path& config_path,
    const std::filesystem::path& out_dir,
    std::optional<unsigned long long> seed_override = std::nullopt) {
  json config;
  try {
    config = json::parse(read_text(config_path));
  } catch (const json::exception& e) {
    throw validation_error("config " + config_path.string() +
                           " is not valid JSON: " + e.what());
  }
  if (seed_override && config.is_object()) config["seed"] = *seed_override;
  ExperimentResult res = run_experiment(config);
  std::string stem = config_path.stem().string();
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / (stem + ".json"), res.report.dump(2) + "\n");
  for (const auto& [suffix, content] : res.csv_files)
    write_text(out_dir / (stem + "." + suffix + ".csv"), content);
  write_text(out_dir / (stem + ".meta.json"),
             json{{"written_unix_time", std::time(nullptr)}}.dump(2) + "\n");
  return res;
}

struct SuiteResult {
  json report;
  bool all_pass = true;
};

/// Run a manifest of config paths sequentially (optionally in parallel) and
/// aggregate the verdicts. All configs are validated before anything runs.
inline SuiteResult run_suite(const std::filesystem::path& manifest_path,
                             const std::filesystem::path& out_dir,
                             bool parallel = false) {
  json manifest;
  try {
    manifest = json::parse(read_text(manifest_path));
  } catch (const json::exception& e) {
    throw validation_error("manifest is not valid JSON: " +
                           std::string(e.what()));
  }
  cfg::check_keys(manifest, "", {"configs"}, {});
  auto paths = cfg::get<std::vector<std::string>>(manifest, "", "configs");
  std::filesystem::path base = manifest_path.parent_path();

  // validate everything first; the first bad config aborts the suite
  std::vector<std::filesystem::path> files;
  for (const auto& p : paths) {
    std::filesystem::path full = base / p;
    json config = json::parse(read_text(full), nullptr, true);
    if (!config.is_object() || !config.contains("experiment"))
      throw validation_error("config " + full.string() +
                             " is missing /experiment");
    files.push_back(full);
  }

  std::vector<ExperimentResult> results(files.size());
  auto run_one = [&](size_t i) {
    results[i] = run_config_file(files[i], out_dir);
  };
  if (parallel) {
    std::vector<std::thread> threads;
    for (size_t i = 0; i < files.size(); ++i)
      threads.emplace_back(run_one, i);
    for (auto& t : threads) t.join();
  } else {
    for (size_t i = 0; i < files.size(); ++i) run_one(i);
  }

  SuiteResult suite;
  json items = json::array();
  for (size_t i = 0; i < files.size(); ++i) {
    items.push_back({{"config", paths[i]},
                     {"pass", results[i].pass},
                     {"verdict", results[i].verdict}});
    suite.all_pass = suite.all_pass && results[i].pass;
  }
  suite.report = {{"experiments", items}, {"all_pass", suite.all_pass}};
  write_text(out_dir / "suite_report.json", suite.report.dump(2) + "\n");
  return suite;
}

}  // namespace afplab
