#pragma once

#include <functional>
#include <vector>

namespace peplica {

struct NelderMeadOptions {
  int max_iters = 500;
  double rel_tol = 1e-6;       // stop when (f_worst - f_best) <= rel_tol * max(1, |f_best|)
  double initial_step = 1.0;   // per-coordinate offset of the starting simplex
  double alpha = 1.0;          // reflection
  double gamma = 2.0;          // expansion
  double rho = 0.5;            // contraction
  double sigma = 0.5;          // shrink
};

struct NelderMeadResult {
  std::vector<double> x;
  double fx = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Minimizes f by downhill simplex from x0. Deterministic: fixed simplex
/// construction, stable sorting, no randomness. Throws if f returns a
/// non-finite value (message echoes the offending parameter vector).
NelderMeadResult nelder_mead_minimize(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& x0,
                                      const NelderMeadOptions& opts = {});

}  // namespace peplica
