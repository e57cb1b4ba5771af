#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "artifacts.hpp"
#include "catalog.hpp"
#include "doctest.h"
#include "experiments.hpp"
#include "ppl/error.hpp"
#include "scenario.hpp"

using namespace ppl;
using namespace ppl::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("ppl_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::string data(const std::string& file) { return std::string(PPL_TEST_DATA) + "/" + file; }

struct Proc {
  int status;
  std::string out;
};

Proc shell(const std::string& args) {
  std::string cmd = std::string(PPL_BIN) + " " + args + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f);
  std::string out;
  char buf[512];
  while (std::fgets(buf, sizeof buf, f)) out += buf;
  int st = pclose(f);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("misspelled parameter is a schema error naming the key and line") {
  auto out = scratch("levles");
  auto res = run_scenario(data("malformed-levles.json"), {out.string(), {}, {}});
  CHECK(res.exit_code == 1);
  CHECK(res.verdict == "error");
  CHECK(res.message.find("levles") != std::string::npos);
  CHECK(res.message.find("line 7") != std::string::npos);
  CHECK(res.message.find("SchemaError") != std::string::npos);
  auto m = read_json(out / "manifest.json");
  CHECK(m["verdict"] == "error");
  CHECK(m["error"]["code"] == "SchemaError");

  auto p = shell("run " + data("malformed-levles.json") + " --out " + (out / "bin").string());
  CHECK(p.status == 1);
  CHECK(p.out.find("levles") != std::string::npos);
}

TEST_CASE("top-level schema") {
  auto code = [](const std::string& text) {
    try {
      parse_scenario(text);
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  auto bad_json = code(slurp(data("broken-syntax.json")));
  CHECK(bad_json.find("line 5") != std::string::npos);
  CHECK(code(R"({"name": "x", "command": "spectra", "operation": "omega", "sede": 3})").find("sede") !=
        std::string::npos);
  CHECK(code(R"({"name": "x", "command": "plot", "operation": "omega"})").find("command") != std::string::npos);
  CHECK(code(R"({"name": "x", "command": "spectra", "operation": "omega", "seed": -1})").find("seed") !=
        std::string::npos);
  CHECK(code(R"({"command": "spectra", "operation": "omega"})").find("name") != std::string::npos);
  CHECK(code(R"({"name": "x", "command": "spectra", "operation": "omega", "seed": 4})").empty());

  auto s = parse_scenario(R"({"name": "x", "command": "spectra", "operation": "eigen"})");
  Artifacts a(scratch("unknown-op").string());
  try {
    run_experiment(s, a);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("alpha-limit") != std::string::npos);
  }
}

TEST_CASE("nested parameter objects reject unknown keys") {
  auto s = parse_scenario(R"({"name": "x", "command": "criteria", "operation": "dn-check",
    "params": {"K0": {"type": "disk", "radius": 1, "centre": [0]}, "K": {"type": "disk", "radius": 2},
               "candidates": [{"type": "disk", "radius": 4}], "random_polynomials": 2}})");
  Artifacts a(scratch("nested").string());
  try {
    run_experiment(s, a);
    FAIL("no error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SchemaError);
    CHECK(std::string(e.what()).find("params.K0.centre") != std::string::npos);
  }
}

TEST_CASE("shipped disk condenser matches max{-1, ln|z| - 1}") {
  auto out = scratch("pmeasure-disk");
  auto res = run_scenario("pmeasure-disk", {out.string(), {}, {}});
  REQUIRE(res.exit_code == 0);
  auto rows = read_csv(out / "omega.csv");
  REQUIRE(rows.size() > 50000);
  CHECK(rows[0] == std::vector<std::string>{"x", "y", "omega", "closed_form"});
  double worst = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    double x = std::stod(rows[i][0]), y = std::stod(rows[i][1]), w = std::stod(rows[i][2]);
    worst = std::max(worst, std::abs(w - std::max(-1.0, std::log(std::hypot(x, y)) - 1)));
  }
  CHECK(worst <= 0.03);
  auto m = read_json(out / "manifest.json");
  for (const char* k : {"scenario", "input_sha256", "start", "elapsed_s", "verdict"}) CHECK(m.contains(k));
  CHECK(m["scenario"] == "pmeasure-disk");
  CHECK(m["verdict"] == "pass");
  CHECK(m["input_sha256"] == sha256_hex(slurp(std::string(PPL_SCENARIO_DIR) + "/pmeasure-disk.json")));
  CHECK(m["elapsed_s"].get<double>() < 120);
}

TEST_CASE("concentric disks give npz slope 1") {
  auto out = scratch("npz");
  auto res = run_scenario("npz-disks", {out.string(), {}, {}});
  CHECK(res.exit_code == 0);
  auto v = read_json(out / "verdict.json");
  CHECK(v["pass"] == true);
  CHECK(std::abs(v["summary"]["slope"].get<double>() - 1) <= 0.01);
  auto rows = read_csv(out / "diameters.csv");
  REQUIRE(rows.size() == 32);
  for (std::size_t m = 0; m <= 30; ++m) {
    double d = std::stod(rows[m + 1][1]);
    CHECK(std::abs(d / std::exp(-(m + 1.0)) - 1) < 1e-8);
  }
}

TEST_CASE("a failed expectation exits 2") {
  auto out = scratch("fail");
  auto p = shell("run " + data("demailly-square-holds.json") + " --out " + out.string());
  CHECK(p.status == 2);
  CHECK(read_json(out / "manifest.json")["verdict"] == "fail");
  CHECK(shell("run no-such-scenario").status == 1);
  CHECK(shell("run npz-disks --threads 2 --out " + (out / "ok").string()).status == 0);
}

TEST_CASE("fixed seed gives byte-identical artifacts") {
  for (const char* name : {"envelope-random", "dn-disks", "omega-disks"}) {
    auto a = scratch(std::string(name) + "-a"), b = scratch(std::string(name) + "-b");
    REQUIRE(run_scenario(name, {a.string(), {}, {}}).exit_code == 0);
    REQUIRE(run_scenario(name, {b.string(), {}, {}}).exit_code == 0);
    for (const auto& f : read_json(a / "manifest.json")["artifacts"]) {
      std::string file = f.get<std::string>();
      if (file.ends_with(".csv") || file == "verdict.json") CHECK_MESSAGE(slurp(a / file) == slurp(b / file), name << "/" << file);
    }
  }
  // the seed reaches the sampler
  auto a = scratch("seed-a"), b = scratch("seed-b");
  run_scenario("envelope-random", {a.string(), {}, 1});
  run_scenario("envelope-random", {b.string(), {}, 2});
  CHECK(slurp(a / "problems.csv") != slurp(b / "problems.csv"));
  CHECK(read_json(a / "manifest.json")["seed"] == 1);
}

TEST_CASE("catalog listing") {
  auto names = evaluators();
  CHECK(std::is_sorted(names.begin(), names.end(), [](auto& x, auto& y) { return x.name < y.name; }));
  for (const char* want : {"exp", "weierstrass", "evans"})
    CHECK(std::any_of(names.begin(), names.end(), [&](auto& e) { return e.name == want; }));

  auto all = shell("list");
  CHECK(all.status == 0);
  auto shipped = shipped_scenarios();
  REQUIRE(shipped.size() >= 10);
  for (const auto& s : shipped) CHECK_MESSAGE(all.out.find("  " + s.name + "  ") != std::string::npos, s.name);

  auto sp = shell("list spectra");
  std::size_t lines = 0;
  for (const auto& s : shipped) {
    bool listed = sp.out.find("  " + s.name + "  ") != std::string::npos;
    CHECK_MESSAGE(listed == (s.command == "spectra"), s.name);
    lines += listed;
  }
  CHECK(lines >= 3);
  CHECK(sp.out.find("evaluators") == std::string::npos);
}

TEST_CASE("shipped scenarios are named after their files") {
  for (const auto& s : shipped_scenarios()) {
    CHECK(fs::path(s.path).stem() == s.name);
    CHECK_FALSE(s.operation.empty());
  }
}

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}
