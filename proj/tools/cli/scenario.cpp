#include "scenario.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "ppl/error.hpp"

namespace ppl::cli {

namespace {

const std::set<std::string> kCommands{"pmeasure", "envelope", "exhaustion-verify", "criteria", "spectra"};

std::string at_line(const std::string* text, const std::string& key) {
  if (!text) return "";
  int line = line_of_key(*text, key);
  return line > 0 ? " (line " + std::to_string(line) + ")" : "";
}

}  // namespace

int line_of_key(const std::string& text, const std::string& key) {
  auto pos = text.find('"' + key + '"');
  if (pos == std::string::npos) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

Params::Params(const json& j, std::string where, const std::string* text)
    : j_(j), where_(std::move(where)), text_(text) {
  if (!j_.is_object()) fail(ErrorCode::SchemaError, where_ + " must be a JSON object");
}

void Params::error(const std::string& key, const std::string& msg) const {
  fail(ErrorCode::SchemaError, where_ + "." + key + at_line(text_, key) + ": " + msg);
}

bool Params::has(const std::string& key) const { return j_.contains(key); }

const json& Params::at(const std::string& key) {
  used_.insert(key);
  if (!j_.contains(key)) error(key, "required key is missing");
  return j_.at(key);
}

double Params::number(const std::string& key) {
  const json& v = at(key);
  if (!v.is_number()) error(key, "expected a number");
  return v.get<double>();
}

double Params::number(const std::string& key, double fallback) { return has(key) ? number(key) : (used_.insert(key), fallback); }

int Params::integer(const std::string& key, int fallback) {
  used_.insert(key);
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (!v.is_number_integer()) error(key, "expected an integer");
  return v.get<int>();
}

std::string Params::string(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (!v.is_string()) error(key, "expected a string");
  return v.get<std::string>();
}

bool Params::boolean(const std::string& key, bool fallback) {
  used_.insert(key);
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (!v.is_boolean()) error(key, "expected true or false");
  return v.get<bool>();
}

std::vector<double> Params::numbers(const std::string& key, std::vector<double> fallback) {
  used_.insert(key);
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (!v.is_array()) error(key, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) error(key, "expected an array of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<cplx> Params::point(const std::string& key, std::vector<cplx> fallback) {
  used_.insert(key);
  if (!has(key)) return fallback;
  const json& v = j_.at(key);
  if (!v.is_array()) error(key, "expected an array of coordinates");
  std::vector<cplx> out;
  for (const auto& x : v) {
    if (x.is_number()) out.emplace_back(x.get<double>(), 0.0);
    else if (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number())
      out.emplace_back(x[0].get<double>(), x[1].get<double>());
    else error(key, "coordinates are numbers or [re, im]");
  }
  return out;
}

const json& Params::raw(const std::string& key) { return at(key); }

Params Params::object(const std::string& key) {
  const json& v = at(key);
  if (!v.is_object()) error(key, "expected an object");
  return Params(v, where_ + "." + key, text_);
}

void Params::finish() const {
  for (auto it = j_.begin(); it != j_.end(); ++it)
    if (!used_.count(it.key())) error(it.key(), "unknown key");
}

Scenario parse_scenario(const std::string& text, const std::string& path) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    auto begin = text.begin(), stop = text.begin() + static_cast<std::ptrdiff_t>(byte > 0 ? byte - 1 : 0);
    int line = 1 + static_cast<int>(std::count(begin, stop, '\n'));
    fail(ErrorCode::SchemaError, path + ": line " + std::to_string(line) + ": invalid JSON: " + e.what());
  }
  Params top(j, "scenario", &text);
  Scenario s;
  s.text = text;
  s.path = path;
  s.name = top.string("name", "");
  if (s.name.empty()) top.error("name", "required key is missing");
  s.command = top.string("command", "");
  if (!kCommands.count(s.command))
    top.error("command", "expected one of pmeasure, envelope, exhaustion-verify, criteria, spectra");
  s.operation = top.string("operation", "");
  if (s.operation.empty()) top.error("operation", "required key is missing");
  if (top.has("seed")) {
    const json& v = top.raw("seed");
    if (!v.is_number_unsigned()) top.error("seed", "expected a nonnegative integer");
    s.seed = v.get<std::uint64_t>();
  }
  s.output = top.string("output", "");
  if (top.has("params")) {
    s.params = top.raw("params");
    if (!s.params.is_object()) top.error("params", "expected an object");
  }
  top.string("description", "");
  top.finish();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open scenario " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path);
}

}  // namespace ppl::cli
