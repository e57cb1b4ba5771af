#include "catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <map>

#include "ppl/error.hpp"

#ifndef PPL_SCENARIO_DIR
#define PPL_SCENARIO_DIR "scenarios"
#endif

namespace ppl::cli {

namespace fs = std::filesystem;

std::vector<Evaluator> evaluators() {
  std::vector<Evaluator> out{
      {"algebraic", "exhaustion", "-(1/deg p) ln|p| + 2 ln|z| on the complement of {p = 0}"},
      {"constant", "model", "phi = -1"},
      {"embedded-log-norm", "exhaustion", "ln|w(z)| for a proper embedding w"},
      {"evans", "exhaustion", "(1 + sum w_j) ln|z - z0| - sum w_j ln|z - a_j| on C minus punctures"},
      {"exp", "entire", "exp of a polynomial; shorthand \"exp\" is exp(z1)"},
      {"graph", "exhaustion", "complement of the graph z_n = f(z')"},
      {"log-max", "model", "ln max_j |z_j|"},
      {"log-norm", "model", "ln |z|"},
      {"norm-squared", "model", "|z|^2"},
      {"pole-series", "exhaustion", "sum 2^{-(j+1)} ln|z1 - q_j| + ln|z2|"},
      {"polynomial", "entire", "polynomial {vars, terms: [{c, e}]}; shorthand \"z1\", \"z2\", \"zero\""},
      {"sin", "entire", "sin of a polynomial; shorthand \"sin\" is sin(z1)"},
      {"weierstrass", "exhaustion", "-ln|F| + ln(|z'|^2 + |F - 1|^2), F = z_n^k + sum f_j(z') z_n^{k-j}"},
  };
  std::sort(out.begin(), out.end(), [](const Evaluator& a, const Evaluator& b) { return a.name < b.name; });
  return out;
}

namespace {

const std::map<std::string, std::string> kVariantAlias{
    {"algebraic", "algebraic-complement"}, {"weierstrass", "weierstrass-complement"},
    {"graph", "graph-complement"},         {"evans", "evans-puncture"},
};

json unit_poly(int vars, int var) {
  std::vector<int> e(vars, 0);
  if (var >= 0) e[var] = 1;
  return {{"vars", vars}, {"terms", json::array({{{"c", var >= 0 ? 1.0 : 0.0}, {"e", e}}})}};
}

// "exp", "sin", "z1", "zero" in an entire-function slot with `vars` variables.
json expand_entire(const json& f, int vars, Params& p, const std::string& key) {
  if (!f.is_string()) return f;
  const std::string s = f.get<std::string>();
  if (s == "exp") return {{"kind", "exp"}, {"inner", unit_poly(vars, 0)}};
  if (s == "sin") return {{"kind", "sin"}, {"inner", unit_poly(vars, 0)}};
  if (s == "zero") return unit_poly(vars, -1);
  if (s.size() >= 2 && s[0] == 'z') {
    int j = std::atoi(s.c_str() + 1);
    if (j >= 1 && j <= vars) return unit_poly(vars, j - 1);
  }
  p.error(key, "unknown entire function shorthand '" + s + "'");
}

}  // namespace

ExhaustionSpec exhaustion_from(Params& p, const std::string& key) {
  json j = p.raw(key);
  if (!j.is_object()) p.error(key, "expected an exhaustion object");
  if (j.contains("variant") && j["variant"].is_string()) {
    auto it = kVariantAlias.find(j["variant"].get<std::string>());
    if (it != kVariantAlias.end()) j["variant"] = it->second;
  }
  const int n = j.value("dim", 1);
  auto expand_list = [&](const char* slot, int vars) {
    if (j.contains(slot) && j[slot].is_array())
      for (auto& f : j[slot]) f = expand_entire(f, vars, p, key);
  };
  expand_list("coordinates", n);
  expand_list("coefficients", std::max(1, n - 1));
  if (j.contains("function")) j["function"] = expand_entire(j["function"], std::max(1, n - 1), p, key);
  try {
    return exhaustion_from_json(j.dump());
  } catch (const Error& e) {
    p.error(key, e.what());
  }
}

Field field_from(Params& p, const std::string& key, int default_dim) {
  Field f;
  const json& v = p.raw(key);
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    f.n = p.integer("dim", default_dim);
    if (f.n < 1 || f.n > 2) p.error("dim", "expected 1 or 2");
    f.label = name;
    if (name == "log-norm") {
      f.phi = [](std::span<const cplx> z) {
        double s = 0;
        for (auto x : z) s += std::norm(x);
        return 0.5 * std::log(s);
      };
    } else if (name == "log-max") {
      f.phi = [](std::span<const cplx> z) {
        double m = 0;
        for (auto x : z) m = std::max(m, std::abs(x));
        return std::log(m);
      };
    } else if (name == "norm-squared") {
      f.phi = [](std::span<const cplx> z) {
        double s = 0;
        for (auto x : z) s += std::norm(x);
        return s;
      };
    } else if (name == "constant") {
      f.phi = [](std::span<const cplx>) { return -1.0; };
    } else {
      p.error(key, "unknown model function '" + name + "'");
    }
    return f;
  }
  ExhaustionSpec spec = exhaustion_from(p, key);
  f.n = spec.dim();
  f.label = spec.tag();
  f.phi = [spec](std::span<const cplx> z) { return spec(z); };
  f.spec = std::move(spec);
  return f;
}

std::string scenario_dir() {
  if (const char* env = std::getenv("PPL_SCENARIOS"); env && *env) return env;
  return PPL_SCENARIO_DIR;
}

std::vector<ShippedScenario> shipped_scenarios() {
  std::vector<ShippedScenario> out;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(scenario_dir(), ec)) {
    if (entry.path().extension() != ".json") continue;
    try {
      Scenario s = load_scenario(entry.path().string());
      out.push_back({s.name, s.command, s.operation, entry.path().string()});
    } catch (const Error&) {
      // unparsable files are not listed; `ppl run` on them reports why
    }
  }
  std::sort(out.begin(), out.end(), [](const ShippedScenario& a, const ShippedScenario& b) { return a.name < b.name; });
  return out;
}

std::string resolve_scenario(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return arg;
  for (const auto& s : shipped_scenarios())
    if (s.name == arg || fs::path(s.path).stem() == arg) return s.path;
  fail(ErrorCode::Io, "no scenario file or shipped scenario named '" + arg + "'");
}

}  // namespace ppl::cli
