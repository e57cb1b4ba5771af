#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "ppl/grid.hpp"

namespace ppl {

enum class SweepOrder { GaussSeidel, Jacobi };

// n = 2 direction families. Interpolated: Fibonacci points on the Bloch
// sphere, circle samples by multilinear interpolation. Lattice: complex lines
// spanned by Gaussian-integer vectors (a, b), whose four-point circles
// i^k (a, b) h land exactly on nodes.
enum class DirectionFamily { Interpolated, Lattice };

struct EnvelopeScheme {
  DirectionFamily family = DirectionFamily::Lattice;
  int directions = 8;          // Interpolated: complex directions per node
  double radius = 3.0;         // Interpolated: circle radius in units of h
  int circle_samples = 8;      // Interpolated: samples per circle
  int lattice_norm = 3;        // Lattice: max |a|^2 + |b|^2 (3 gives 14 lines)
  double stop_tol = -1;        // negative: 1e-6 * obstacle range
  std::size_t max_iterations = 200000;
  SweepOrder order = SweepOrder::GaussSeidel;
  std::size_t report_every = 100;
};

// Largest discretely psh function u with u <= obstacle on Interior nodes and
// u = boundary on Boundary and Outside nodes. The obstacle may be +inf.
struct EnvelopeProblem {
  ScalarField obstacle;
  ScalarField boundary;
  EnvelopeScheme scheme{};
};

struct ConvergenceRow {
  std::size_t iteration;
  double sup_change;
  double residual;
};

struct EnvelopeResult {
  ScalarField solution;
  bool converged = false;
  std::size_t iterations = 0;
  double final_change = 0;
  double stop_tol = 0;
  std::size_t stuck_nodes = 0;  // no usable stencil; held at the initial value
  std::vector<ConvergenceRow> report;

  // Throws MaxIterations when the solve did not converge.
  const EnvelopeResult& require_converged() const;
};

EnvelopeResult solve(const EnvelopeProblem& p);

// max(|u - T u| over Interior nodes, |u - boundary| over pinned nodes);
// zero exactly at a fixed point of the update T.
double residual(const ScalarField& u, const EnvelopeProblem& p);

void write_convergence_csv(std::ostream& out, const EnvelopeResult& r);

}  // namespace ppl
