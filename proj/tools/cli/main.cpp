#include <CLI11.hpp>
#include <iostream>

#include "catalog.hpp"
#include "experiments.hpp"
#include "ppl/error.hpp"

namespace {

bool matches(const std::string& filter, std::initializer_list<std::string> fields) {
  if (filter.empty()) return true;
  for (const auto& f : fields)
    if (f.find(filter) != std::string::npos) return true;
  return false;
}

int list(const std::string& filter) {
  using namespace ppl::cli;
  bool header = false;
  for (const auto& e : evaluators()) {
    if (!matches(filter, {e.name, e.category})) continue;
    if (!header) std::cout << "evaluators:\n";
    header = true;
    std::cout << "  " << e.name << "  [" << e.category << "]  " << e.description << '\n';
  }
  header = false;
  for (const auto& s : shipped_scenarios()) {
    if (!matches(filter, {s.name, s.command, s.operation})) continue;
    if (!header) std::cout << "scenarios (" << scenario_dir() << "):\n";
    header = true;
    std::cout << "  " << s.name << "  " << s.command << '/' << s.operation << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pluripotential experiment runner"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a scenario file or shipped scenario by name");
  std::string scenario;
  ppl::cli::RunOptions opt;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  run->add_option("scenario", scenario, "Scenario JSON path or shipped name")->required();
  run->add_option("--out", opt.out_dir, "Output directory (default: scenario output, else out/<name>)");
  auto* th = run->add_option("--threads", threads, "Worker threads (default: PPL_THREADS, else 1)")->check(CLI::PositiveNumber);
  auto* sd = run->add_option("--seed", seed, "Override the scenario seed");

  auto* ls = app.add_subcommand("list", "List built-in evaluators and shipped scenarios");
  std::string filter;
  ls->add_option("filter", filter, "Substring of a name, command or category");

  CLI11_PARSE(app, argc, argv);

  if (*ls) return list(filter);

  if (*th) opt.threads = threads;
  if (*sd) opt.seed = seed;
  auto res = ppl::cli::run_scenario(scenario, opt);
  if (res.exit_code == 1) {
    std::cerr << "error: " << res.message << '\n';
  } else {
    std::cout << res.verdict << "  " << res.out_dir << '\n';
  }
  return res.exit_code;
}
