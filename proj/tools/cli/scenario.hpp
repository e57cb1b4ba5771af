#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ppl/grid.hpp"

namespace ppl::cli {

using nlohmann::json;

struct Scenario {
  std::string name;
  std::string command;    // pmeasure | envelope | exhaustion-verify | criteria | spectra
  std::string operation;  // per command, see experiments.cpp
  std::uint64_t seed = 0;
  std::string output;     // empty: out/<name>
  json params = json::object();
  std::string text;       // raw file contents, for hashing and diagnostics
  std::string path;
};

// Parses and validates the top level. Throws SchemaError naming the line and
// key of the first problem.
Scenario parse_scenario(const std::string& text, const std::string& path = "<memory>");
Scenario load_scenario(const std::string& path);

// 1-based line of the first occurrence of "key" in text; 0 when absent.
int line_of_key(const std::string& text, const std::string& key);

// Typed access to one JSON object. Every key read is remembered, and
// finish() rejects the rest, so misspelled keys never pass silently.
class Params {
 public:
  Params(const json& j, std::string where, const std::string* text);

  bool has(const std::string& key) const;
  double number(const std::string& key);
  double number(const std::string& key, double fallback);
  int integer(const std::string& key, int fallback);
  std::string string(const std::string& key, const std::string& fallback);
  bool boolean(const std::string& key, bool fallback);
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback);
  std::vector<cplx> point(const std::string& key, std::vector<cplx> fallback);
  const json& raw(const std::string& key);
  Params object(const std::string& key);

  void finish() const;
  [[noreturn]] void error(const std::string& key, const std::string& msg) const;

 private:
  const json& at(const std::string& key);

  const json& j_;
  std::string where_;
  const std::string* text_;
  std::set<std::string> used_;
};

}  // namespace ppl::cli
