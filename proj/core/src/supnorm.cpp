#include "ppl/supnorm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ppl/error.hpp"
#include "ppl/numeric.hpp"
#include "ppl/parallel.hpp"

namespace ppl {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double wrap(double u) { return u - std::floor(u); }

// Folds R onto [0, 1] by reflection, for parameters with hard ends.
double fold(double u) {
  double t = std::fmod(std::abs(u), 2.0);
  return t > 1 ? 2 - t : t;
}

// Unit vector of C^n from 2n - 1 parameters.
std::vector<cplx> direction(int n, std::span<const double> u) {
  if (n == 1) return {std::polar(1.0, kTwoPi * wrap(u[0]))};
  double eta = 0.5 * std::numbers::pi * fold(u[0]);
  return {std::polar(std::cos(eta), kTwoPi * wrap(u[1])), std::polar(std::sin(eta), kTwoPi * wrap(u[2]))};
}

struct Hit {
  double value;
  std::size_t index;
  std::vector<cplx> point;
};

double best_over(const Holomorphic& f, const std::vector<std::vector<cplx>>& pts, std::vector<cplx>* arg) {
  double best = -1;
  for (const auto& p : pts) {
    double v = std::abs(f(p));
    if (std::isnan(v)) fail(ErrorCode::NaNValue, "sample function returned NaN");
    if (v > best) {
      best = v;
      if (arg) *arg = p;
    }
  }
  return best;
}

}  // namespace

Holomorphic as_holomorphic(EntireFunction f) {
  return [f = std::move(f)](std::span<const cplx> z) { return f(z); };
}

Compact disk(cplx center, double radius) {
  if (!(radius > 0)) fail(ErrorCode::InvalidArgument, "disk radius must be positive");
  Compact K{"disk", 1, 1, nullptr, true};
  K.points = [center, radius](std::span<const double> u, std::vector<std::vector<cplx>>& out) {
    out.push_back({center + std::polar(radius, kTwoPi * wrap(u[0]))});
  };
  return K;
}

Compact segment(cplx a, cplx b) {
  Compact K{"segment", 1, 1, nullptr, false};
  K.points = [a, b](std::span<const double> u, std::vector<std::vector<cplx>>& out) {
    out.push_back({a + fold(u[0]) * (b - a)});
  };
  return K;
}

Compact ball(int n, double radius) {
  if (n != 1 && n != 2) fail(ErrorCode::DimensionMismatch, "ball supports n = 1 or 2");
  if (!(radius > 0)) fail(ErrorCode::InvalidArgument, "ball radius must be positive");
  Compact K{"ball", n, 2 * n - 1, nullptr, true};
  K.points = [n, radius](std::span<const double> u, std::vector<std::vector<cplx>>& out) {
    auto d = direction(n, u);
    for (auto& z : d) z *= radius;
    out.push_back(std::move(d));
  };
  return K;
}

Compact polydisc(std::vector<double> radii) {
  for (double r : radii)
    if (!(r > 0)) fail(ErrorCode::InvalidArgument, "polydisc radii must be positive");
  const int n = static_cast<int>(radii.size());
  Compact K{"polydisc", n, n, nullptr, true};
  K.points = [radii = std::move(radii)](std::span<const double> u, std::vector<std::vector<cplx>>& out) {
    std::vector<cplx> z(radii.size());
    for (std::size_t j = 0; j < radii.size(); ++j) z[j] = std::polar(radii[j], kTwoPi * wrap(u[j]));
    out.push_back(std::move(z));
  };
  return K;
}

Compact sublevel(PointFunction phi, int n, double level, std::vector<cplx> center, double reach, int steps) {
  if (n != 1 && n != 2) fail(ErrorCode::DimensionMismatch, "sublevel compacts support n = 1 or 2");
  if (static_cast<int>(center.size()) != n) fail(ErrorCode::DimensionMismatch, "center has the wrong dimension");
  if (!(reach > 0) || steps < 2) fail(ErrorCode::InvalidArgument, "sublevel needs reach > 0 and steps >= 2");
  Compact K{"sublevel", n, 2 * n - 1, nullptr, true};
  K.points = [=](std::span<const double> u, std::vector<std::vector<cplx>>& out) {
    auto d = direction(n, u);
    std::vector<cplx> z(n);
    auto at = [&](double t) {
      for (int j = 0; j < n; ++j) z[j] = center[j] + t * d[j];
      return phi(z) <= level;
    };
    bool inside = at(0);
    if (inside) out.push_back(z);
    for (int s = 1; s <= steps; ++s) {
      double hi = reach * s / steps;
      bool now = at(hi);
      if (now == inside) continue;
      double a = reach * (s - 1) / steps, b = hi;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        (at(m) == inside ? a : b) = m;
      }
      at(inside ? a : b);  // the sample stays on the closed set
      out.push_back(z);
      inside = now;
    }
    if (inside) {
      at(reach);
      out.push_back(z);
    }
  };
  return K;
}

SupNorm sup_norm(const Holomorphic& f, const Compact& K, const SupOptions& opt) {
  if (!K.points) fail(ErrorCode::InvalidArgument, "compact has no boundary sampler");
  const int p = K.params;
  int per_axis = std::max(2, static_cast<int>(std::ceil(std::pow(static_cast<double>(opt.initial_samples), 1.0 / p))));

  // simplex polish from the best grid samples; updates out when it improves
  auto polish = [&](const std::vector<Hit>& top, SupNorm& out) {
    for (const Hit& h : top) {
      std::vector<double> u0(p);
      std::size_t r = h.index;
      for (int a = 0; a < p; ++a) {
        u0[a] = static_cast<double>(r % (per_axis + 1)) / per_axis;
        r /= per_axis + 1;
      }
      std::vector<std::vector<cplx>> pts;
      auto obj = [&](const std::vector<double>& u) {
        pts.clear();
        K.points(u, pts);
        return best_over(f, pts, nullptr);
      };
      auto [u, v] = nelder_mead_max(obj, u0, std::vector<double>(p, 1.0 / per_axis), SimplexOptions{400, 1e-15, 1e-13});
      if (v > out.value) {
        pts.clear();
        K.points(u, pts);
        best_over(f, pts, &out.argmax);
        out.value = v;
      }
    }
  };

  SupNorm out;
  double previous = -1;
  for (int round = 0; round <= opt.max_doublings; ++round) {
    std::size_t total = 1;
    for (int a = 0; a < p; ++a) total *= static_cast<std::size_t>(per_axis + 1);
    if (round > 0 && total > opt.max_samples) break;

    const unsigned workers = std::max(1u, thread_count());
    std::vector<std::vector<Hit>> best(workers);
    parallel_for(total, [&](std::size_t b, std::size_t e, unsigned w) {
      std::vector<double> u(p);
      std::vector<std::vector<cplx>> pts;
      std::vector<cplx> arg;
      auto& mine = best[w];
      for (std::size_t i = b; i < e; ++i) {
        std::size_t r = i;
        for (int a = 0; a < p; ++a) {
          u[a] = static_cast<double>(r % (per_axis + 1)) / per_axis;
          r /= per_axis + 1;
        }
        pts.clear();
        K.points(u, pts);
        double v = best_over(f, pts, &arg);
        if (v < 0) continue;
        if (static_cast<int>(mine.size()) < opt.polish_starts || v > mine.back().value) {
          mine.push_back({v, i, arg});
          std::sort(mine.begin(), mine.end(), [](const Hit& x, const Hit& y) {
            return x.value != y.value ? x.value > y.value : x.index < y.index;
          });
          if (static_cast<int>(mine.size()) > opt.polish_starts) mine.pop_back();
        }
      }
    });
    std::vector<Hit> top;
    for (auto& v : best) top.insert(top.end(), v.begin(), v.end());
    std::sort(top.begin(), top.end(), [](const Hit& x, const Hit& y) {
      return x.value != y.value ? x.value > y.value : x.index < y.index;
    });
    if (static_cast<int>(top.size()) > opt.polish_starts) top.resize(opt.polish_starts);
    if (top.empty()) fail(ErrorCode::RegionEmpty, "compact " + K.name + " produced no boundary samples");

    SupNorm here;
    here.value = top.front().value;
    here.argmax = top.front().point;
    here.samples = total;
    polish(top, here);
    // every polished value is attained on K, so the best seen is still a lower bound
    if (here.value < out.value) {
      here.value = out.value;
      here.argmax = out.argmax;
    }
    out = std::move(here);
    if (previous >= 0 && std::abs(out.value - previous) <= opt.rel_tol * out.value) {
      out.stable = true;
      break;
    }
    previous = out.value;
    per_axis *= 2;
  }
  return out;
}

}  // namespace ppl
