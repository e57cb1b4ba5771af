#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "ppl/grid.hpp"

namespace ppl {

// Matrix of mixed derivatives d^2u/dz_j dzbar_k, stored row-major per node.
struct HessianField {
  DomainPtr domain;
  int n = 1;
  std::vector<cplx> entries;
  std::vector<std::uint8_t> valid;

  std::span<const cplx> at(std::size_t idx) const {
    return std::span<const cplx>(entries).subspan(idx * n * n, n * n);
  }
  std::size_t valid_count() const;
};

// Central-difference complex Hessian. A node is valid when it is Interior and
// every stencil node is Interior with a finite value.
HessianField complex_hessian(const ScalarField& u);

// Hessian at one node; false when the stencil does not fit.
// Writes n*n entries to out. order 4 uses five-point differences (reach 2).
bool hessian_at(const ScalarField& u, std::size_t idx, std::span<cplx> out, int order = 2);

double hermitian_min_eigenvalue(std::span<const cplx> H, int n);
double hermitian_max_abs_eigenvalue(std::span<const cplx> H, int n);
double hermitian_det(std::span<const cplx> H, int n);

// 4^n n! det H, the density of (dd^c u)^n against Lebesgue measure, with d^c
// normalized so that (dd^c log|z|)^n has total mass (2 pi)^n.
double ma_density_from_hessian(std::span<const cplx> H, int n);

struct DensityOptions {
  // Negative eigenvalues down to -eig_tol are treated as rounding (PSD).
  // Negative means "use eig_tol_per_h * h".
  double eig_tol = -1;
  double eig_tol_per_h = 1.0;
  int order = 2;  // 4: five-point differences, two layers of Interior needed
};

struct DensityField {
  ScalarField density;  // 0 at invalid or indefinite nodes, +inf at Excluded nodes
  std::vector<std::uint8_t> valid;
  std::size_t valid_count = 0;
  std::size_t indefinite_count = 0;  // det < 0: clamped to 0
  std::size_t non_psh_count = 0;     // min eigenvalue below -eig_tol

  double indefinite_ratio() const {
    return valid_count ? static_cast<double>(indefinite_count) / valid_count : 0.0;
  }
};

DensityField ma_density(const ScalarField& u, const DensityOptions& opt = {});

struct MassResult {
  double mass = 0;
  std::size_t region_nodes = 0;
  std::size_t used_nodes = 0;
  double skipped_fraction = 0;
  std::size_t indefinite_nodes = 0;
};

// Riemann sum of the Monge-Ampere density times h^{2n} over valid Interior
// nodes whose point satisfies region (all Interior nodes when region is empty).
MassResult ma_mass(const ScalarField& u, const PointPredicate& region = nullptr, const DensityOptions& opt = {});

struct PshVerdict {
  bool psh = true;
  double min_eigenvalue = 0;
  std::optional<std::size_t> worst_node;
  std::vector<cplx> worst_point;
  std::size_t checked_nodes = 0;
};

PshVerdict is_psh(const ScalarField& u, double tol, const PointPredicate& region = nullptr);

struct MaximalVerdict {
  bool maximal = true;
  double sup_density = 0;
  std::optional<std::size_t> worst_node;
  std::vector<cplx> worst_point;
  std::size_t checked_nodes = 0;
  // 4^n n! (largest |eigenvalue|)^n over the region: the density a node would
  // carry if every direction curved as much as the steepest one. In one
  // variable half the real Hessian norm is used when it is larger.
  double curvature_scale = 0;
};

MaximalVerdict is_maximal(const ScalarField& u, const PointPredicate& region, double tol, int order = 2);

// C^2 convex soft maximum; equals max(a, b) when |a - b| >= eta. Convex and
// nondecreasing in both arguments, so it preserves plurisubharmonicity.
double soft_max(double a, double b, double eta);

}  // namespace ppl
