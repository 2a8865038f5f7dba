#include "peplica/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace peplica {

namespace {

std::string echo_params(const std::vector<double>& x) {
  std::ostringstream os;
  os << "[";
  for (size_t i = 0; i < x.size(); ++i) os << (i ? ", " : "") << x[i];
  os << "]";
  return os.str();
}

}  // namespace

NelderMeadResult nelder_mead_minimize(const std::function<double(const std::vector<double>&)>& f,
                                      const std::vector<double>& x0,
                                      const NelderMeadOptions& opts) {
  const size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty parameter vector");

  NelderMeadResult result;
  auto eval = [&](const std::vector<double>& x) {
    double fx = f(x);
    ++result.evaluations;
    if (!std::isfinite(fx)) {
      throw std::runtime_error("nelder_mead: non-finite objective at " + echo_params(x));
    }
    return fx;
  };

  // Vertices: x0 plus one per-coordinate offset point.
  std::vector<std::vector<double>> x(n + 1, x0);
  for (size_t i = 0; i < n; ++i) x[i + 1][i] += opts.initial_step;
  std::vector<double> fx(n + 1);
  for (size_t j = 0; j <= n; ++j) fx[j] = eval(x[j]);

  std::vector<size_t> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return fx[a] < fx[b]; });
    std::vector<std::vector<double>> x2(n + 1);
    std::vector<double> fx2(n + 1);
    for (size_t j = 0; j <= n; ++j) {
      x2[j] = x[order[j]];
      fx2[j] = fx[order[j]];
    }
    x.swap(x2);
    fx.swap(fx2);
  };

  for (result.iterations = 0; result.iterations < opts.max_iters; ++result.iterations) {
    sort_simplex();
    if (fx[n] - fx[0] <= opts.rel_tol * std::max(1.0, std::fabs(fx[0]))) {
      result.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
      for (size_t i = 0; i < n; ++i) centroid[i] += x[j][i];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    auto blend = [&](const std::vector<double>& from, double coef) {
      std::vector<double> p(n);
      for (size_t i = 0; i < n; ++i) p[i] = centroid[i] + coef * (from[i] - centroid[i]);
      return p;
    };

    std::vector<double> xr = blend(x[n], -opts.alpha);
    double fr = eval(xr);

    if (fr < fx[0]) {
      std::vector<double> xe = blend(x[n], -opts.alpha * opts.gamma);
      double fe = eval(xe);
      if (fe < fr) {
        x[n] = std::move(xe);
        fx[n] = fe;
      } else {
        x[n] = std::move(xr);
        fx[n] = fr;
      }
    } else if (fr < fx[n - 1]) {
      x[n] = std::move(xr);
      fx[n] = fr;
    } else if (fr < fx[n]) {
      std::vector<double> xc = blend(xr, opts.rho);  // outside contraction
      double fc = eval(xc);
      if (fc <= fr) {
        x[n] = std::move(xc);
        fx[n] = fc;
      } else {
        for (size_t j = 1; j <= n; ++j) {
          for (size_t i = 0; i < n; ++i) x[j][i] = x[0][i] + opts.sigma * (x[j][i] - x[0][i]);
          fx[j] = eval(x[j]);
        }
      }
    } else {
      std::vector<double> xc = blend(x[n], opts.rho);  // inside contraction
      double fc = eval(xc);
      if (fc < fx[n]) {
        x[n] = std::move(xc);
        fx[n] = fc;
      } else {
        for (size_t j = 1; j <= n; ++j) {
          for (size_t i = 0; i < n; ++i) x[j][i] = x[0][i] + opts.sigma * (x[j][i] - x[0][i]);
          fx[j] = eval(x[j]);
        }
      }
    }
  }

  sort_simplex();
  result.x = x[0];
  result.fx = fx[0];
  return result;
}

}  // namespace peplica
