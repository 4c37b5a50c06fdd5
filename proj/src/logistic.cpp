#include "ciiq/logistic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ciiq/errors.hpp"

namespace ciiq {

double logistic5(const std::array<double, 5>& b, double x) {
  const double t = std::clamp(b[1] * (x - b[2]), -500.0, 500.0);
  return b[0] * (0.5 - 1.0 / (1.0 + std::exp(t))) + b[3] * x + b[4];
}

std::vector<double> LogisticFit::map(const std::vector<double>& xs) const {
  std::vector<double> out(xs.size());
  std::transform(xs.begin(), xs.end(), out.begin(),
                 [&](double x) { return logistic5(beta, x); });
  return out;
}

SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, double scale, int max_iter, double tol) {
  const size_t n = start.size();
  std::vector<std::vector<double>> x(n + 1, start);
  for (size_t i = 0; i < n; ++i)
    x[i + 1][i] += scale * std::max(std::abs(start[i]), 1.0);

  std::vector<double> fx(n + 1);
  for (size_t v = 0; v <= n; ++v) fx[v] = f(x[v]);

  bool hit_tol = false;
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
  for (int iter = 0; iter < max_iter; ++iter) {
    // order ascending by function value
    std::vector<size_t> ord(n + 1);
    std::iota(ord.begin(), ord.end(), size_t{0});
    std::sort(ord.begin(), ord.end(),
              [&](size_t a, size_t b) { return fx[a] < fx[b]; });
    {
      std::vector<std::vector<double>> x2;
      std::vector<double> f2;
      for (size_t k : ord) {
        x2.push_back(x[k]);
        f2.push_back(fx[k]);
      }
      x.swap(x2);
      fx.swap(f2);
    }
    if (std::abs(fx[n] - fx[0]) <=
        tol * (std::abs(fx[0]) + std::abs(fx[n])) + 1e-300) {
      hit_tol = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (size_t v = 0; v < n; ++v)
      for (size_t i = 0; i < n; ++i) centroid[i] += x[v][i] / n;

    auto along = [&](double t) {
      std::vector<double> p(n);
      for (size_t i = 0; i < n; ++i)
        p[i] = centroid[i] + t * (centroid[i] - x[n][i]);
      return p;
    };

    const std::vector<double> xr = along(alpha);
    const double fr = f(xr);
    if (fr < fx[0]) {
      const std::vector<double> xe = along(alpha * gamma);
      const double fe = f(xe);
      if (fe < fr) {
        x[n] = xe;
        fx[n] = fe;
      } else {
        x[n] = xr;
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      x[n] = xr;
      fx[n] = fr;
    } else {
      const bool outside = fr < fx[n];
      const std::vector<double> xc = along(outside ? alpha * rho : -rho);
      const double fc = f(xc);
      if (fc < std::min(fr, fx[n])) {
        x[n] = xc;
        fx[n] = fc;
      } else {
        for (size_t v = 1; v <= n; ++v) {
          for (size_t i = 0; i < n; ++i)
            x[v][i] = x[0][i] + shrink * (x[v][i] - x[0][i]);
          fx[v] = f(x[v]);
        }
      }
    }
  }

  const size_t best =
      std::min_element(fx.begin(), fx.end()) - fx.begin();
  return {x[best], fx[best], hit_tol};
}

LogisticFit fit_logistic(const std::vector<double>& objective,
                         const std::vector<double>& mos) {
  if (objective.size() != mos.size())
    throw DegenerateInput("objective/mos lengths differ");
  if (objective.size() < 5)
    throw DegenerateInput("logistic fit needs at least 5 points");
  const size_t n = objective.size();

  const auto sse = [&](const std::vector<double>& b) {
    const std::array<double, 5> beta = {b[0], b[1], b[2], b[3], b[4]};
    double s = 0.0;
    for (size_t i = 0; i < n; ++i) {
      const double d = logistic5(beta, objective[i]) - mos[i];
      s += d * d;
    }
    return s;
  };

  std::vector<double> sorted = objective;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted[n / 2];
  const double mos_min = *std::min_element(mos.begin(), mos.end());
  const double mos_max = *std::max_element(mos.begin(), mos.end());
  const double mean_mos =
      std::accumulate(mos.begin(), mos.end(), 0.0) / n;
  const double mean_obj =
      std::accumulate(objective.begin(), objective.end(), 0.0) / n;
  double var_obj = 0.0;
  for (double v : objective) var_obj += (v - mean_obj) * (v - mean_obj);
  const double std_obj = std::sqrt(var_obj / n);
  const double slope0 = std_obj > 0 ? 1.0 / std_obj : 1.0;

  // Deterministic multi-start: the standard initialization plus two
  // perturbed variants.
  const std::vector<std::vector<double>> starts = {
      {mos_max - mos_min, slope0, median, 0.0, mean_mos},
      {-(mos_max - mos_min), 2.0 * slope0, median, 0.0, mean_mos},
      {0.5 * (mos_max - mos_min), 0.5 * slope0,
       median + 0.5 * std_obj, 0.0, mean_mos},
  };

  LogisticFit fit;
  double best = std::numeric_limits<double>::infinity();
  for (const std::vector<double>& s0 : starts) {
    SimplexResult r = nelder_mead(sse, s0, 0.25, 4000, 1e-15);
    r = nelder_mead(sse, r.x, 0.02, 4000, 1e-15);  // restart from the optimum
    if (r.fval < best) {
      best = r.fval;
      fit.beta = {r.x[0], r.x[1], r.x[2], r.x[3], r.x[4]};
      fit.converged = r.converged;
    }
  }

  fit.residual = std::sqrt(best / n);
  return fit;
}

}  // namespace ciiq
