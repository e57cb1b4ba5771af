#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace ppl {

struct LineFit {
  double slope = 0;
  double intercept = 0;
  double rms = 0;  // root-mean-square residual
  std::size_t points = 0;
};

// Ordinary least squares y = slope * x + intercept.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Gauss-Legendre nodes and weights on [a, b].
std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b);

// Composite Gauss-Legendre rule: panels equal pieces of [a, b], n nodes each.
std::vector<std::pair<double, double>> composite_gauss_legendre(int panels, int n, double a, double b);

// Smallest r in (0, hi] with f(r) >= level for f increasing near its first
// crossing: geometric march up from hi * 1e-12, then bisection. Returns 0 if
// f already reaches level at the start, nullopt if it never does.
std::optional<double> first_crossing(const std::function<double(double)>& f, double level, double hi);

// Maximizes a unimodal f on [a, b].
std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double a, double b,
                                             int iterations = 100);

struct SimplexOptions {
  int max_evaluations = 2000;
  double ftol = 1e-15;  // relative spread of simplex values
  double xtol = 1e-13;
};

// Nelder-Mead maximization from x0 with initial step sizes. The caller maps
// coordinates into the feasible set (wrapping or clamping) inside f.
std::pair<std::vector<double>, double> nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                                       std::vector<double> x0, const std::vector<double>& step,
                                                       const SimplexOptions& opt = {});

}  // namespace ppl
