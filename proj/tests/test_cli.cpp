#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "afplab/experiments.hpp"

using namespace afplab;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path d = fs::temp_directory_path() / ("afplab_cli_" + tag);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(AFP_LAB_BIN) + " " + args + " > /dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

}  // namespace

TEST_CASE("run writes a report and exits 0") {
  fs::path d = fresh_dir("run");
  write_text(d / "c.json",
             R"({"experiment":"folner_profile","group":{"group":"Z","dim":1},)"
             R"("schedule":"box","max_index":3,"seed":7})");
  CHECK(run_cli("run " + (d / "c.json").string() + " --out " +
                (d / "out").string()) == 0);
  CHECK(fs::exists(d / "out" / "c.json"));
  CHECK(fs::exists(d / "out" / "c.profile.csv"));
  CHECK(fs::exists(d / "out" / "c.meta.json"));
  json rep = json::parse(read_text(d / "out" / "c.json"));
  CHECK(rep.at("experiment") == "folner_profile");
  // first data row of the CSV carries the exact rational
  std::string csv = read_text(d / "out" / "c.profile.csv");
  CHECK(csv.find("0,1,(1),2,1,2") != std::string::npos);
}

TEST_CASE("validation failures exit 2") {
  fs::path d = fresh_dir("bad");
  write_text(d / "unknown_key.json",
             R"({"experiment":"kesten","group":{"group":"Z"},"radius":3,)"
             R"("seed":1,"typo":true})");
  CHECK(run_cli("run " + (d / "unknown_key.json").string()) == 2);
  write_text(d / "no_seed.json",
             R"({"experiment":"kesten","group":{"group":"Z"},"radius":3})");
  CHECK(run_cli("run " + (d / "no_seed.json").string()) == 2);
  write_text(d / "not_json.json", "{nope");
  CHECK(run_cli("run " + (d / "not_json.json").string()) == 2);
  CHECK(run_cli("run " + (d / "missing.json").string()) == 2);
  CHECK(run_cli("frobnicate") == 2);
}

TEST_CASE("the offending key is named") {
  json bad = {{"experiment", "reiter"},
              {"group", {{"group", "F"}, {"rank", 2}, {"oops", 1}}},
              {"radius", 1},
              {"p", 1},
              {"method", "lp"},
              {"seed", 1}};
  CHECK_THROWS_WITH_AS(run_experiment(bad), "unknown key /group/oops",
                       validation_error);
  json no_seed = {{"experiment", "counterexample"}};
  CHECK_THROWS_WITH_AS(run_experiment(no_seed), "missing key /seed",
                       validation_error);
}

TEST_CASE("resource cap exits 3") {
  fs::path d = fresh_dir("cap");
  write_text(d / "big.json",
             R"({"experiment":"kesten","group":{"group":"F","rank":2},)"
             R"("radius":9,"seed":1})");
  std::string cmd = "AFPLAB_BALL_CAP=100 " + std::string(AFP_LAB_BIN) +
                    " run " + (d / "big.json").string() + " > /dev/null 2>&1";
  CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 3);
}

TEST_CASE("suite aggregates and empty manifest passes") {
  fs::path d = fresh_dir("suite");
  write_text(d / "a.json",
             R"({"experiment":"kesten","group":{"group":"Z","dim":1},)"
             R"("radius":30,"seed":1,"range":[0.9,1.0]})");
  write_text(d / "b.json",
             R"({"experiment":"reiter","group":{"group":"F","rank":2},)"
             R"("radius":1,"p":1,"method":"lp","seed":1,"max_objective":1.3})");
  write_text(d / "m.json", R"({"configs":["a.json","b.json"]})");
  CHECK(run_cli("suite " + (d / "m.json").string() + " --out " +
                (d / "out").string()) == 0);
  json rep = json::parse(read_text(d / "out" / "suite_report.json"));
  CHECK(rep.at("all_pass") == true);
  CHECK(rep.at("experiments").size() == 2);

  write_text(d / "empty.json", R"({"configs":[]})");
  CHECK(run_cli("suite " + (d / "empty.json").string() + " --out " +
                (d / "out2").string()) == 0);

  // a failing assertion turns into a nonzero exit naming the experiment
  write_text(d / "fail.json",
             R"({"experiment":"reiter","group":{"group":"F","rank":2},)"
             R"("radius":1,"p":1,"method":"lp","seed":1,"max_objective":0.5})");
  write_text(d / "mf.json", R"({"configs":["fail.json"]})");
  CHECK(run_cli("suite " + (d / "mf.json").string() + " --out " +
                (d / "out3").string()) == 1);
  json rep3 = json::parse(read_text(d / "out3" / "suite_report.json"));
  CHECK(rep3.at("all_pass") == false);
  CHECK(rep3.at("experiments")[0].at("config") == "fail.json");
}

TEST_CASE("reports are byte-identical across reruns") {
  fs::path d = fresh_dir("det");
  write_text(d / "c.json",
             R"({"experiment":"embed","model":{"kind":"simplex","dim":3},)"
             R"("family_size":8,"samples":200,)"
             R"("action":"coordinate_permutation","seed":99})");
  REQUIRE(run_cli("run " + (d / "c.json").string() + " --out " +
                  (d / "o1").string()) == 0);
  REQUIRE(run_cli("run " + (d / "c.json").string() + " --out " +
                  (d / "o2").string()) == 0);
  CHECK(read_text(d / "o1" / "c.json") == read_text(d / "o2" / "c.json"));
  CHECK(read_text(d / "o1" / "c.cloud.csv") ==
        read_text(d / "o2" / "c.cloud.csv"));
}

TEST_CASE("the shipped example manifest passes end to end") {
  fs::path d = fresh_dir("examples");
  fs::path manifest = fs::path(AFP_LAB_CONFIG_DIR) / "manifest.json";
  REQUIRE(fs::exists(manifest));
  CHECK(run_cli("suite " + manifest.string() + " --out " + d.string()) == 0);
  json rep = json::parse(read_text(d / "suite_report.json"));
  CHECK(rep.at("all_pass") == true);
}

TEST_CASE("seed override changes the echoed config") {
  fs::path d = fresh_dir("seed");
  write_text(d / "c.json",
             R"({"experiment":"embed","model":{"kind":"simplex","dim":3},)"
             R"("family_size":8,"samples":50,"seed":1})");
  REQUIRE(run_cli("run " + (d / "c.json").string() + " --seed 5 --out " +
                  (d / "out").string()) == 0);
  json rep = json::parse(read_text(d / "out" / "c.json"));
  CHECK(rep.at("config_echo").at("seed") == 5);
}
