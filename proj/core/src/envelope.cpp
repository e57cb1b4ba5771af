#include "ppl/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>

#include "ppl/error.hpp"

namespace ppl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint8_t kUnusable = 0xff;

struct Entry {
  std::ptrdiff_t offset;
  double weight;
};

struct OffsetStencil {
  std::vector<Entry> entries;
  std::vector<GridDomain::Index> deltas;
  GridDomain::Index extent{};
};

// Points on the Bloch sphere spread by a Fibonacci lattice, mapped to unit
// vectors in C^2 (each complex line appears once up to phase).
std::vector<std::array<cplx, 2>> complex_directions(int d) {
  std::vector<std::array<cplx, 2>> dirs;
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < d; ++k) {
    double z = 1.0 - (2.0 * k + 1.0) / d;
    double polar = std::acos(std::clamp(z, -1.0, 1.0));
    double phi = golden * k;
    dirs.push_back({cplx(std::cos(polar / 2), 0), std::polar(std::sin(polar / 2), phi)});
  }
  return dirs;
}

OffsetStencil circle_stencil(const GridDomain& g, const std::array<cplx, 2>& v, double radius, int samples) {
  std::map<std::array<int, 4>, double> acc;
  for (int k = 0; k < samples; ++k) {
    cplx rot = std::polar(1.0, 2 * std::numbers::pi * k / samples);
    cplx a = rot * v[0] * radius, b = rot * v[1] * radius;
    double pos[4] = {a.real(), a.imag(), b.real(), b.imag()};
    int base[4];
    double frac[4];
    for (int ax = 0; ax < 4; ++ax) {
      base[ax] = static_cast<int>(std::floor(pos[ax]));
      frac[ax] = pos[ax] - base[ax];
    }
    for (int corner = 0; corner < 16; ++corner) {
      double w = 1.0 / samples;
      std::array<int, 4> off;
      for (int ax = 0; ax < 4; ++ax) {
        int bit = (corner >> ax) & 1;
        off[ax] = base[ax] + bit;
        w *= bit ? frac[ax] : 1 - frac[ax];
      }
      if (w > 1e-13) acc[off] += w;
    }
  }
  OffsetStencil s;
  double total = 0;
  for (auto& [off, w] : acc) total += w;
  for (auto& [off, w] : acc) {
    std::ptrdiff_t flat = 0;
    GridDomain::Index d{};
    for (int ax = 0; ax < 4; ++ax) {
      flat += off[ax] * static_cast<std::ptrdiff_t>(g.stride(ax));
      d[ax] = off[ax];
      s.extent[ax] = std::max(s.extent[ax], std::abs(off[ax]));
    }
    s.entries.push_back({flat, w / total});
    s.deltas.push_back(d);
  }
  return s;
}

// One representative per complex line through a Gaussian-integer vector with
// |a|^2 + |b|^2 <= max_norm; shortest representative wins.
std::vector<std::array<std::complex<int>, 2>> lattice_directions(int max_norm) {
  std::vector<std::array<std::complex<int>, 2>> out;
  std::vector<cplx> ratios;  // b / a, or a / b with a flag for a == 0
  int lim = static_cast<int>(std::floor(std::sqrt(max_norm)));
  std::vector<std::pair<int, std::array<std::complex<int>, 2>>> cand;
  for (int ar = -lim; ar <= lim; ++ar)
    for (int ai = -lim; ai <= lim; ++ai)
      for (int br = -lim; br <= lim; ++br)
        for (int bi = -lim; bi <= lim; ++bi) {
          int nrm = ar * ar + ai * ai + br * br + bi * bi;
          if (nrm == 0 || nrm > max_norm) continue;
          cand.push_back({nrm, {std::complex<int>(ar, ai), std::complex<int>(br, bi)}});
        }
  std::stable_sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<std::pair<bool, cplx>> seen;
  for (auto& [nrm, v] : cand) {
    cplx a(v[0].real(), v[0].imag()), b(v[1].real(), v[1].imag());
    std::pair<bool, cplx> key = std::abs(a) > 0 ? std::make_pair(false, b / a) : std::make_pair(true, cplx(0, 0));
    bool dup = false;
    for (auto& s : seen)
      if (s.first == key.first && std::abs(s.second - key.second) < 1e-12) dup = true;
    if (dup) continue;
    seen.push_back(key);
    out.push_back(v);
  }
  return out;
}

OffsetStencil lattice_stencil(const GridDomain& g, const std::array<std::complex<int>, 2>& v) {
  OffsetStencil s;
  std::complex<int> rot(1, 0);
  for (int k = 0; k < 4; ++k) {
    std::complex<int> a = rot * v[0], b = rot * v[1];
    GridDomain::Index d{a.real(), a.imag(), b.real(), b.imag()};
    std::ptrdiff_t flat = 0;
    for (int ax = 0; ax < 4; ++ax) {
      flat += d[ax] * static_cast<std::ptrdiff_t>(g.stride(ax));
      s.extent[ax] = std::max(s.extent[ax], std::abs(d[ax]));
    }
    s.entries.push_back({flat, 0.25});
    s.deltas.push_back(d);
    rot *= std::complex<int>(0, 1);
  }
  return s;
}

class Solver {
 public:
  explicit Solver(const EnvelopeProblem& p) : p_(p), g_(p.obstacle.domain()) {
    if (!g_.same_lattice(p.boundary.domain()))
      fail(ErrorCode::DimensionMismatch, "obstacle and boundary live on different lattices");
    if (g_.dim() == 2 && p.scheme.directions < 4) fail(ErrorCode::InvalidArgument, "need at least 4 directions");
    if (g_.dim() == 2 && g_.any_periodic()) fail(ErrorCode::InvalidArgument, "periodic axes need n = 1");
    const std::size_t N = g_.size();
    pinned_value_.assign(N, kInf);
    for (std::size_t i = 0; i < N; ++i) {
      NodeClass c = g_.cls(i);
      if (c == NodeClass::Interior) {
        interior_.push_back(i);
        continue;
      }
      if (c == NodeClass::Excluded) continue;
      double b = p.boundary[i];
      if (c == NodeClass::Boundary) {
        if (!std::isfinite(b)) fail(ErrorCode::InvalidArgument, "boundary value not finite at node " + std::to_string(i));
        double ob = p.obstacle[i];
        if (b > ob + 1e-12 * (1 + std::abs(ob)))
          fail(ErrorCode::InfeasibleBoundary, "boundary exceeds obstacle at node " + std::to_string(i));
      }
      pinned_value_[i] = b;
    }
    if (interior_.empty()) fail(ErrorCode::EmptyDomain, "no interior node to solve for");
    // Largest readable pinned value: every pinned node an update can touch is
    // below it, so the starting iterate is a supersolution.
    double top = -kInf;
    for (std::size_t i = 0; i < N; ++i)
      if (g_.cls(i) != NodeClass::Interior && std::isfinite(pinned_value_[i])) top = std::max(top, pinned_value_[i]);
    if (top == -kInf) fail(ErrorCode::InvalidArgument, "no finite boundary data");
    top_ = top;
    if (g_.dim() == 1)
      plan_plane();
    else
      plan_space();
  }

  std::vector<double> initial() const {
    std::vector<double> u(g_.size());
    for (std::size_t i = 0; i < g_.size(); ++i) {
      switch (g_.cls(i)) {
        case NodeClass::Interior: u[i] = std::min(p_.obstacle[i], top_); break;
        case NodeClass::Excluded: u[i] = p_.obstacle[i]; break;
        default: u[i] = pinned_value_[i]; break;
      }
    }
    return u;
  }

  // One application of the update at interior slot k.
  double update(std::size_t k, const std::vector<double>& u) const {
    const std::size_t i = interior_[k];
    double best = p_.obstacle[i];
    if (g_.dim() == 1) {
      const auto& nb = plane_[k];
      if (nb.mode == 0) {
        double axis = u[nb.idx[0]] + u[nb.idx[1]] + u[nb.idx[2]] + u[nb.idx[3]];
        double diag = u[nb.idx[4]] + u[nb.idx[5]] + u[nb.idx[6]] + u[nb.idx[7]];
        best = std::min(best, 0.2 * axis + 0.05 * diag);
      } else if (nb.mode == 1) {
        best = std::min(best, 0.25 * (u[nb.idx[0]] + u[nb.idx[1]] + u[nb.idx[2]] + u[nb.idx[3]]));
      } else {
        return u[i];
      }
      return best;
    }
    const std::uint8_t* choice = &space_choice_[k * dirs_];
    bool any = false;
    for (int d = 0; d < dirs_; ++d) {
      if (choice[d] == kUnusable) continue;
      any = true;
      const OffsetStencil& s = stencils_[d * radii_ + choice[d]];
      double avg = 0;
      for (const Entry& e : s.entries) avg += e.weight * u[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + e.offset)];
      best = std::min(best, avg);
    }
    return any ? best : u[i];
  }

  const std::vector<std::size_t>& interior() const { return interior_; }
  std::size_t stuck() const { return stuck_; }
  double pinned(std::size_t i) const { return pinned_value_[i]; }
  const GridDomain& grid() const { return g_; }

 private:
  struct PlaneNeighbors {
    std::size_t idx[8];
    std::uint8_t mode;  // 0: nine-point, 1: five-point, 2: stuck
  };

  bool readable(std::optional<std::size_t> j) const {
    if (!j) return false;
    NodeClass c = g_.cls(*j);
    if (c == NodeClass::Excluded) return false;
    if (c == NodeClass::Interior) return true;
    return std::isfinite(pinned_value_[*j]);
  }

  void plan_plane() {
    static const int off[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    plane_.resize(interior_.size());
    for (std::size_t k = 0; k < interior_.size(); ++k) {
      auto& nb = plane_[k];
      bool ok[8];
      for (int q = 0; q < 8; ++q) {
        auto j = g_.shifted(interior_[k], GridDomain::Index{off[q][0], off[q][1], 0, 0});
        ok[q] = readable(j);
        nb.idx[q] = j.value_or(interior_[k]);
      }
      bool axis = ok[0] && ok[1] && ok[2] && ok[3];
      bool diag = ok[4] && ok[5] && ok[6] && ok[7];
      nb.mode = axis ? (diag ? 0 : 1) : 2;
      if (nb.mode == 2) ++stuck_;
    }
  }

  void plan_space() {
    if (p_.scheme.family == DirectionFamily::Lattice) {
      auto dirs = lattice_directions(std::max(1, p_.scheme.lattice_norm));
      dirs_ = static_cast<int>(dirs.size());
      radii_ = 1;
      for (auto& v : dirs) stencils_.push_back(lattice_stencil(g_, v));
      assign_choices();
      return;
    }
    dirs_ = p_.scheme.directions;
    int rmax = std::max(1, static_cast<int>(std::floor(p_.scheme.radius)));
    std::vector<double> radii{p_.scheme.radius};
    for (int r = rmax; r >= 1; --r)
      if (r < p_.scheme.radius - 1e-12) radii.push_back(r);
    radii_ = static_cast<int>(radii.size());
    auto dirs = complex_directions(dirs_);
    for (int d = 0; d < dirs_; ++d)
      for (double r : radii) stencils_.push_back(circle_stencil(g_, dirs[d], r, std::max(4, p_.scheme.circle_samples)));
    assign_choices();
  }

  // Per node and direction: the widest radius whose stencil fits. A first
  // pass only accepts circles that stay inside the domain and its pinned
  // layer; nodes where no direction qualifies may read further out.
  void assign_choices() {
    space_choice_.assign(interior_.size() * dirs_, kUnusable);
    for (std::size_t k = 0; k < interior_.size(); ++k) {
      bool any = assign_node(k, true) || assign_node(k, false);
      if (!any) ++stuck_;
    }
  }

  bool assign_node(std::size_t k, bool inside_only) {
    const std::size_t i = interior_[k];
    auto mi = g_.multi_index(i);
    bool any = false;
    {
      for (int d = 0; d < dirs_; ++d) {
        for (int r = 0; r < radii_; ++r) {
          const OffsetStencil& s = stencils_[d * radii_ + r];
          bool fits = true;
          for (int a = 0; a < 4 && fits; ++a)
            fits = mi[a] - s.extent[a] >= 0 && mi[a] + s.extent[a] <= g_.count(a) - 1;
          if (!fits) continue;
          for (const Entry& e : s.entries) {
            std::size_t j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + e.offset);
            if (!readable(j) || (inside_only && g_.cls(j) == NodeClass::Outside)) {
              fits = false;
              break;
            }
          }
          if (fits) {
            space_choice_[k * dirs_ + d] = static_cast<std::uint8_t>(r);
            any = true;
            break;
          }
        }
      }
    }
    return any;
  }

  const EnvelopeProblem& p_;
  const GridDomain& g_;
  std::vector<std::size_t> interior_;
  std::vector<double> pinned_value_;
  double top_ = 0;
  std::size_t stuck_ = 0;
  std::vector<PlaneNeighbors> plane_;
  int dirs_ = 0, radii_ = 0;
  std::vector<OffsetStencil> stencils_;
  std::vector<std::uint8_t> space_choice_;
};

double residual_of(const Solver& s, const std::vector<double>& u, const EnvelopeProblem& p) {
  double r = 0;
  const auto& in = s.interior();
  for (std::size_t k = 0; k < in.size(); ++k) {
    double d = std::abs(u[in[k]] - s.update(k, u));
    if (std::isnan(d)) d = kInf;
    r = std::max(r, d);
  }
  const GridDomain& g = s.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Boundary) continue;
    r = std::max(r, std::abs(u[i] - p.boundary[i]));
  }
  return r;
}

double obstacle_range(const EnvelopeProblem& p) {
  const GridDomain& g = p.obstacle.domain();
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Interior) continue;
    double v = p.obstacle[i];
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (hi > lo) return hi - lo;
  lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.cls(i) != NodeClass::Boundary) continue;
    lo = std::min(lo, p.boundary[i]);
    hi = std::max(hi, p.boundary[i]);
  }
  return hi > lo ? hi - lo : 1.0;
}

}  // namespace

const EnvelopeResult& EnvelopeResult::require_converged() const {
  if (!converged)
    fail(ErrorCode::MaxIterations, "envelope solve stopped after " + std::to_string(iterations) +
                                       " sweeps with change " + std::to_string(final_change));
  return *this;
}

EnvelopeResult solve(const EnvelopeProblem& p) {
  Solver s(p);
  const EnvelopeScheme& sc = p.scheme;
  const double tol = sc.stop_tol >= 0 ? sc.stop_tol : 1e-6 * obstacle_range(p);
  std::vector<double> u = s.initial();
  std::vector<double> next;
  const auto& in = s.interior();
  std::vector<ConvergenceRow> report;
  std::size_t it = 0;
  double change = kInf;
  bool converged = false;
  const std::size_t every = std::max<std::size_t>(1, sc.report_every);
  while (it < sc.max_iterations) {
    change = 0;
    if (sc.order == SweepOrder::GaussSeidel) {
      for (std::size_t k = 0; k < in.size(); ++k) {
        double v = s.update(k, u);
        change = std::max(change, std::abs(u[in[k]] - v));
        u[in[k]] = v;
      }
    } else {
      next = u;
      for (std::size_t k = 0; k < in.size(); ++k) {
        double v = s.update(k, u);
        change = std::max(change, std::abs(u[in[k]] - v));
        next[in[k]] = v;
      }
      u.swap(next);
    }
    ++it;
    converged = change < tol;
    if (it % every == 0 || converged) report.push_back({it, change, residual_of(s, u, p)});
    if (converged) break;
  }
  if (report.empty() || report.back().iteration != it) report.push_back({it, change, residual_of(s, u, p)});
  EnvelopeResult r{ScalarField(p.obstacle.domain_ptr(), std::move(u)), false, 0, 0, 0, 0, {}};
  r.converged = converged;
  r.iterations = it;
  r.final_change = change;
  r.stop_tol = tol;
  r.stuck_nodes = s.stuck();
  r.report = std::move(report);
  return r;
}

double residual(const ScalarField& u, const EnvelopeProblem& p) {
  Solver s(p);
  if (!u.domain().same_lattice(p.obstacle.domain()))
    fail(ErrorCode::DimensionMismatch, "field and problem live on different lattices");
  std::vector<double> v(u.values().begin(), u.values().end());
  return residual_of(s, v, p);
}

void write_convergence_csv(std::ostream& out, const EnvelopeResult& r) {
  out << "iteration,sup_change,residual\n";
  out.precision(10);
  for (const auto& row : r.report) out << row.iteration << ',' << row.sup_change << ',' << row.residual << '\n';
}

}  // namespace ppl
