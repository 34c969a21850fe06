// afp-lab: run amenability experiments from JSON configs.
//
//   afp-lab run <config.json> [--out DIR] [--seed N]
//   afp-lab suite <manifest.json> [--out DIR] [--parallel]
//
// Exit codes: 0 success, 2 validation error, 3 resource cap exceeded,
// 4 numeric failure. AFPLAB_BALL_CAP overrides the ball-size budget.

#include <CLI11.hpp>
#include <iostream>

#include "afplab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"amenability and approximate-fixed-point experiments"};
  app.require_subcommand(1);

  std::string config_path, manifest_path, out_dir = "out";
  bool parallel = false;
  long long seed = -1;

  auto* run = app.add_subcommand("run", "run a single experiment config");
  run->add_option("config", config_path, "JSON config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the seed in the config");

  auto* suite = app.add_subcommand("suite", "run a manifest of configs");
  suite->add_option("manifest", manifest_path, "JSON manifest file")
      ->required();
  suite->add_option("--out", out_dir, "output directory");
  suite->add_flag("--parallel", parallel, "run configs concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? 2 : 0;
  }

  try {
    if (run->parsed()) {
      std::optional<unsigned long long> ov;
      if (seed >= 0) ov = static_cast<unsigned long long>(seed);
      afplab::ExperimentResult res =
          afplab::run_config_file(config_path, out_dir, ov);
      std::cout << (res.pass ? "PASS: " : "FAIL: ") << res.verdict << "\n";
      return res.pass ? 0 : 1;
    }
    afplab::SuiteResult res =
        afplab::run_suite(manifest_path, out_dir, parallel);
    for (const auto& item : res.report.at("experiments"))
      std::cout << (item.at("pass").get<bool>() ? "PASS: " : "FAIL: ")
                << item.at("config").get<std::string>() << ": "
                << item.at("verdict").get<std::string>() << "\n";
    std::cout << (res.all_pass ? "suite: all pass" : "suite: FAILURES") << "\n";
    return res.all_pass ? 0 : 1;
  } catch (const afplab::validation_error& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const afplab::resource_error& e) {
    std::cerr << "resource cap exceeded: " << e.what() << "\n";
    return 3;
  } catch (const afplab::numeric_error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  } catch (const afplab::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
