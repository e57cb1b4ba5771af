#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "artifacts.hpp"
#include "scenario.hpp"

namespace ppl::cli {

struct Outcome {
  bool pass = false;
  json summary = json::object();
};

// Dispatches on command/operation. Throws SchemaError for unknown operations
// or parameters, and propagates module errors.
Outcome run_experiment(const Scenario& s, Artifacts& out);

struct RunOptions {
  std::string out_dir;  // overrides the scenario's output
  std::optional<unsigned> threads;
  std::optional<std::uint64_t> seed;
};

struct RunResult {
  int exit_code = 1;  // 0 pass, 2 fail, 1 error
  std::string verdict;  // pass | fail | error
  std::string out_dir;
  std::string message;
};

// Loads, runs and writes manifest.json next to the artifacts.
RunResult run_scenario(const std::string& path_or_name, const RunOptions& opt);

}  // namespace ppl::cli
