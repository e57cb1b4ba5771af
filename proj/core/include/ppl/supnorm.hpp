#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ppl/grid.hpp"
#include "ppl/holomorphic.hpp"

namespace ppl {

using Holomorphic = std::function<cplx(std::span<const cplx>)>;

Holomorphic as_holomorphic(EntireFunction f);

// A compact set seen through a parametrized piece of its boundary that
// carries the sup of every holomorphic function. points() maps a parameter
// in [0, 1]^params (the compact wraps or clamps it) to zero or more points.
struct Compact {
  std::string name;
  int n = 1;
  int params = 1;
  std::function<void(std::span<const double>, std::vector<std::vector<cplx>>&)> points;
  bool has_interior = true;  // contains an open set of C^n
};

Compact disk(cplx center, double radius);
Compact segment(cplx a, cplx b);
// |z| <= radius in C^n (n = 1, 2); the sphere is swept in Hopf coordinates.
Compact ball(int n, double radius);
// Distinguished boundary: the torus |z_j| = radii[j].
Compact polydisc(std::vector<double> radii);
// {phi <= level}. Every crossing of the level along the ray from center in a
// given direction is a sample, so no star-shapedness is needed, only that the
// rays out to reach see the whole set.
Compact sublevel(PointFunction phi, int n, double level, std::vector<cplx> center, double reach, int steps = 256);

struct SupOptions {
  std::size_t initial_samples = 1024;  // spread evenly over the parameter axes
  int max_doublings = 5;               // each doubles the per-axis density
  double rel_tol = 1e-3;
  std::size_t max_samples = 1u << 20;
  int polish_starts = 4;
};

struct SupNorm {
  double value = 0;
  std::vector<cplx> argmax;
  std::size_t samples = 0;  // at the last refinement
  bool stable = false;      // the last doubling moved the polished max by < rel_tol
};

// Grid sampling of the parameter cube; each round polishes the best few
// samples by a simplex search in parameter space, and the grid density
// doubles until two rounds agree.
SupNorm sup_norm(const Holomorphic& f, const Compact& K, const SupOptions& opt = {});

}  // namespace ppl
