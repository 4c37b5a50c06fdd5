#pragma once

#include <array>
#include <functional>
#include <vector>

namespace ciiq {

/// Five-parameter monotone-plus-linear regression curve used to map raw
/// metric scores onto the subjective scale:
///   f(x) = b1 * (1/2 - 1/(1 + exp(b2 * (x - b3)))) + b4 * x + b5
double logistic5(const std::array<double, 5>& b, double x);

struct LogisticFit {
  std::array<double, 5> beta{};
  bool converged = false;
  double residual = 0.0;  // sqrt(SSE/n) of the best fit

  double operator()(double x) const { return logistic5(beta, x); }
  std::vector<double> map(const std::vector<double>& xs) const;
};

struct SimplexResult {
  std::vector<double> x;
  double fval = 0.0;
  bool converged = false;  // stopped on tolerance rather than iteration cap
};

/// Derivative-free Nelder-Mead minimizer.
SimplexResult nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> start, double scale, int max_iter, double tol);

/// Least-squares fit of the five-parameter curve, deterministic three-start
/// simplex descent. Requires at least 5 points. Non-convergence is flagged
/// but the best-effort parameters are still returned.
LogisticFit fit_logistic(const std::vector<double>& objective,
                         const std::vector<double>& mos);

}  // namespace ciiq
