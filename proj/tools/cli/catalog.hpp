#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ppl/exhaustion.hpp"
#include "scenario.hpp"

namespace ppl::cli {

struct Evaluator {
  std::string name;
  std::string category;  // entire | exhaustion | model
  std::string description;
};

std::vector<Evaluator> evaluators();

// A plurisubharmonic function named in a scenario: a model name ("log-norm",
// "log-max", "norm-squared", "constant") with "dim", or an exhaustion object
// whose variant may use a catalog alias ("weierstrass", "graph", "evans", ...).
struct Field {
  PointFunction phi;
  int n = 1;
  std::optional<ExhaustionSpec> spec;
  std::string label;
};

Field field_from(Params& p, const std::string& key = "phi", int default_dim = 1);
ExhaustionSpec exhaustion_from(Params& p, const std::string& key = "phi");

struct ShippedScenario {
  std::string name;
  std::string command;
  std::string operation;
  std::string path;
};

// PPL_SCENARIOS, else the directory configured at build time.
std::string scenario_dir();
std::vector<ShippedScenario> shipped_scenarios();

// A readable file path is used as is; otherwise a shipped scenario name.
std::string resolve_scenario(const std::string& arg);

}  // namespace ppl::cli
