#include "ppl/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "ppl/error.hpp"

namespace ppl {

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "line fit needs at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) fail(ErrorCode::InvalidArgument, "line fit needs distinct abscissae");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ss += r * r;
  }
  f.rms = std::sqrt(ss / n);
  f.points = x.size();
  return f;
}

std::vector<std::pair<double, double>> gauss_legendre(int n, double a, double b) {
  std::vector<std::pair<double, double>> out(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double w = 2 / ((1 - x * x) * dp * dp);
    out[i] = {0.5 * (a + b) + 0.5 * (b - a) * x, 0.5 * (b - a) * w};
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::pair<double, double>> composite_gauss_legendre(int panels, int n, double a, double b) {
  std::vector<std::pair<double, double>> out;
  out.reserve(static_cast<std::size_t>(panels) * n);
  const double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p)
    for (auto q : gauss_legendre(n, a + p * w, a + (p + 1) * w)) out.push_back(q);
  return out;
}

std::optional<double> first_crossing(const std::function<double(double)>& f, double level, double hi) {
  double lo = hi * 1e-12;
  if (f(lo) >= level) return 0.0;
  double r = lo;
  for (;;) {
    double next = std::min(r * 1.05, hi);
    if (f(next) >= level) {
      double a = r, b = next;
      for (int i = 0; i < 200 && b - a > 1e-15 * b; ++i) {
        double m = 0.5 * (a + b);
        (f(m) >= level ? b : a) = m;
      }
      return 0.5 * (a + b);
    }
    if (next >= hi) return std::nullopt;
    r = next;
  }
}

std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double a, double b,
                                             int iterations) {
  const double g = (std::sqrt(5.0) - 1) / 2;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iterations && b - a > 1e-15 * (1 + std::abs(a)); ++i) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

std::pair<std::vector<double>, double> nelder_mead_max(const std::function<double(const std::vector<double>&)>& f,
                                                       std::vector<double> x0, const std::vector<double>& step,
                                                       const SimplexOptions& opt) {
  const std::size_t d = x0.size();
  std::vector<std::vector<double>> s(d + 1, x0);
  std::vector<double> v(d + 1);
  for (std::size_t i = 0; i < d; ++i) s[i + 1][i] += step[i];
  int evals = 0;
  auto eval = [&](const std::vector<double>& x) {
    ++evals;
    double y = f(x);
    return std::isnan(y) ? -std::numeric_limits<double>::infinity() : y;
  };
  for (std::size_t i = 0; i <= d; ++i) v[i] = eval(s[i]);
  std::vector<std::size_t> order(d + 1);
  while (evals < opt.max_evaluations) {
    for (std::size_t i = 0; i <= d; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] > v[b]; });
    const std::size_t best = order[0], worst = order[d], second = order[d - 1];
    double spread = std::abs(v[best] - v[worst]);
    double size = 0;
    for (std::size_t i = 0; i <= d; ++i)
      for (std::size_t k = 0; k < d; ++k) size = std::max(size, std::abs(s[i][k] - s[best][k]));
    if (spread <= opt.ftol * (std::abs(v[best]) + 1e-300) || size < opt.xtol) break;
    std::vector<double> c(d, 0.0);
    for (std::size_t i = 0; i <= d; ++i)
      if (i != worst)
        for (std::size_t k = 0; k < d; ++k) c[k] += s[i][k] / d;
    auto along = [&](double t) {
      std::vector<double> x(d);
      for (std::size_t k = 0; k < d; ++k) x[k] = c[k] + t * (s[worst][k] - c[k]);
      return x;
    };
    auto xr = along(-1);
    double fr = eval(xr);
    if (fr > v[best]) {
      auto xe = along(-2);
      double fe = eval(xe);
      if (fe > fr) {
        s[worst] = xe;
        v[worst] = fe;
      } else {
        s[worst] = xr;
        v[worst] = fr;
      }
    } else if (fr > v[second]) {
      s[worst] = xr;
      v[worst] = fr;
    } else {
      auto xc = fr > v[worst] ? along(-0.5) : along(0.5);
      double fcon = eval(xc);
      if (fcon > std::max(fr, v[worst])) {
        s[worst] = xc;
        v[worst] = fcon;
      } else {
        for (std::size_t i = 0; i <= d; ++i) {
          if (i == best) continue;
          for (std::size_t k = 0; k < d; ++k) s[i][k] = s[best][k] + 0.5 * (s[i][k] - s[best][k]);
          v[i] = eval(s[i]);
        }
      }
    }
  }
  std::size_t best = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
  return {s[best], v[best]};
}

}  // namespace ppl
