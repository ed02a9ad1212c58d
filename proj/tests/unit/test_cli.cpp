#include "doctest.h"

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(PCBOUNDS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int raw = pclose(pipe);
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, out};
}

std::string fixture(const char* name) {
  return (fs::path(PCBOUNDS_FIXTURE_DIR) / name).string();
}

fs::path scratch(const std::string& name, const std::string& contents) {
  const fs::path dir = fs::temp_directory_path() / "pcbounds_cli_test";
  fs::create_directories(dir);
  const fs::path p = dir / name;
  std::ofstream(p) << contents;
  return p;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("example subcommand") {
  const auto one = run("example --id 1");
  CHECK(one.status == 0);
  CHECK(contains(one.out, "0.57 ≤ PC ≤ 0.78"));
  CHECK(contains(one.out, "0.57 ≤ PC ≤ 0.95"));

  CHECK(run("example --id 2").status == 0);
  CHECK(run("example --id 3").status == 2);
  CHECK(run("example --id 2 --perturb y:1:2:-0.02").status == 5);
  CHECK(run("example --id 1 --perturb m:0:0:0.02").status == 5);
  CHECK(run("example --id 1 --perturb q:0:0:0.02").status == 2);

  const auto js = nlohmann::json::parse(run("example --id 2 --json").out);
  CHECK(js.at("pass") == true);
}

TEST_CASE("bounds subcommand") {
  const auto text = run("bounds " + fixture("example1_mediator.json"));
  CHECK(text.status == 0);
  CHECK(contains(text.out, "0.57 ≤ PC ≤ 0.78"));

  const auto js = run("bounds --json " + fixture("example2_mediator.json"));
  REQUIRE(js.status == 0);
  const auto doc = nlohmann::json::parse(js.out);
  CHECK(doc.at("mediator_bounds").at("lower").get<double>() ==
        doctest::Approx(48.0 / 67.0).epsilon(1e-12));
  CHECK(doc.at("dominance").at("lower_equal") == true);

  // The echoed scenario is itself a valid input.
  const auto echoed = scratch("echo.json", doc.at("scenario").dump());
  const auto again = nlohmann::json::parse(run("bounds --json " + echoed.string()).out);
  CHECK(again.at("mediator_bounds") == doc.at("mediator_bounds"));

  CHECK(run("bounds " + fixture("bad_threshold.json")).status == 2);
  CHECK(run("bounds /nonexistent.json").status == 2);
  CHECK(run("bounds").status == 2);

  const auto undefined = scratch(
      "undefined.json",
      R"({"kind": "simple", "T": 1, "t": 0, "p_y_given_d": [[0.4, 0.6], [1.0, 0.0]]})");
  CHECK(run("bounds " + undefined.string()).status == 3);

  const auto row_sum = scratch(
      "row_sum.json",
      R"({"kind": "simple", "T": 1, "t": 0, "p_y_given_d": [[0.4, 0.5], [0.5, 0.5]]})");
  CHECK(run("bounds " + row_sum.string()).status == 2);
}

TEST_CASE("oracle subcommand") {
  const auto ok = run("oracle --resolution 0.05 --samples 2000 " + fixture("example1_mediator.json"));
  CHECK(ok.status == 0);
  CHECK(run("oracle --samples 2000 " + fixture("example2_simple.json")).status == 0);
  CHECK(run("oracle --resolution 0.05 --samples 2000 --corrupt-bounds 0.01 " +
            fixture("example2_mediator.json"))
            .status == 4);
  CHECK(run("oracle --resolution 0.5 " + fixture("example2_mediator.json")).status == 2);
}

TEST_CASE("simulate subcommand") {
  const auto a = run("simulate --samples 20 --seed 9");
  const auto b = run("simulate --samples 20 --seed 9");
  CHECK(a.status == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("sample_index,true_pc,med_lower,med_upper,simple_mid,med_mid\n", 0) == 0);

  const auto one = run("simulate --samples 1");
  CHECK(std::count(one.out.begin(), one.out.end(), '\n') == 2);

  const fs::path out = fs::temp_directory_path() / "pcbounds_cli_test" / "sim.csv";
  fs::create_directories(out.parent_path());
  const auto written = run("simulate --samples 20 --seed 9 --out " + out.string());
  CHECK(written.status == 0);
  std::ifstream in(out);
  const std::string file((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(file == a.out);

  CHECK(run("simulate --samples 0").status == 2);
  CHECK(run("simulate --T 2 --t 2").status == 2);
}
