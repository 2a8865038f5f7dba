#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "peplica/timeseries.hpp"

namespace peplica {

/// Per-asset box constraints on the latent weights.
struct WeightBounds {
  std::vector<double> min;
  std::vector<double> max;

  static WeightBounds uniform(size_t num_assets, double lo, double hi);
  void validate(size_t num_assets) const;
  size_t size() const { return min.size(); }
};

/// Linear-Gaussian dynamic model of the latent weight vector: a random-walk
/// transition w_t = w_{t-1} + eta, eta ~ N(0, Q), observed through the NAV
/// return y_t = w_{t-1} . r_t + eps, eps ~ N(0, obs_var). Cross-asset
/// interaction lives in the off-diagonal entries of Q; box constraints are
/// enforced by posterior-mean projection.
struct StateSpaceModel {
  Eigen::MatrixXd transition_cov;  // Q, KxK symmetric PSD
  double obs_var = 1e-4;           // sigma^2 > 0
  Eigen::VectorXd init_mean;       // w0, inside bounds
  Eigen::MatrixXd init_cov;        // P0, KxK symmetric PSD
  WeightBounds bounds;

  /// Equal-weight start at the midpoint of bounds, diffuse P0 = 0.25 I,
  /// Q = q0 I, obs_var = s0.
  static StateSpaceModel defaults(const WeightBounds& bounds, double q0 = 1e-6,
                                  double s0 = 1e-4);

  size_t num_assets() const { return static_cast<size_t>(init_mean.size()); }
  void validate() const;
};

struct GaussianBelief {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

/// Random-walk prediction: mean unchanged, covariance grows by Q.
GaussianBelief predict_step(const GaussianBelief& posterior, const Eigen::MatrixXd& Q);

/// Exact Gaussian posterior for the scalar observation y = w.r + eps:
/// gain g = P r / (r'Pr + obs_var), mean += g (y - mean.r), cov -= g r'P,
/// then symmetrized. Throws on a degenerate observation (r'Pr + obs_var == 0).
GaussianBelief update_step(const GaussianBelief& prior, double y, const Eigen::VectorXd& r,
                           double obs_var);

/// Component-wise clamp into the bounds; no renormalization.
Eigen::VectorXd project_bounds(Eigen::VectorXd mean, const WeightBounds& bounds);

/// Filtered weight path and one-step replication of the observed NAV.
struct DecodeResult {
  DateIndex index;                          // aligned dates, length T
  std::vector<std::string> asset_names;
  Eigen::MatrixXd weights;                  // T x K; row 0 is the initial belief
  std::vector<Eigen::MatrixXd> weight_cov;  // T covariances
  ReturnSeries replicated_returns;          // T-1 one-step predictions w_{t-1}.r_t
  NavSeries replicated_nav;                 // T levels, anchored at the observed start
  std::vector<double> innovations;          // T-1 prediction errors y_t - yhat_t
  double log_likelihood = 0.0;              // prediction-error decomposition

  DecodeResult(DateIndex idx, std::vector<std::string> names, Eigen::MatrixXd w,
               std::vector<Eigen::MatrixXd> cov, ReturnSeries repl, NavSeries repl_nav,
               std::vector<double> innov, double ll);
};

/// Runs predict / record / update / project over the aligned sample.
/// A day whose factor returns are all zero carries the prior forward.
DecodeResult filter(const StateSpaceModel& model, const NavSeries& nav, const AssetPanel& panel);

/// The training objective: log-likelihood accumulated by the same recursion.
double log_likelihood(const StateSpaceModel& model, const NavSeries& nav,
                      const AssetPanel& panel);

struct FitConfig {
  WeightBounds bounds;           // required; defines K and the projection box
  int max_iters = 500;
  double rel_tol = 1e-6;
  double start_obs_var = 1e-4;
  double start_q = 1e-6;
  double obs_var_floor = 1e-10;
  bool full_q = false;           // also fit off-diagonal Q (PSD-repaired)
  double init_cov_diag = 0.25;   // P0 = this * I
};

/// Maximum-likelihood fit of (diag Q, obs_var) — optionally full Q — by
/// log-parameterized Nelder-Mead. Deterministic given the config; the
/// achieved objective never falls below the start point's.
StateSpaceModel fit_mle(const NavSeries& nav, const AssetPanel& panel, const FitConfig& cfg);

struct SanityConfig {
  double leverage_cap = 3.0;  // flag days with sum |w| above this
  double jump_cap = 0.25;     // flag one-day weight moves above this
  double bound_tol = 1e-9;    // distance treated as "at the bound"
};

struct SanityFlag {
  Date date;
  std::string kind;  // "leverage" or "jump"
  double value;
};

struct SanityReport {
  std::vector<double> at_bound_fraction;  // per asset
  double max_one_day_jump = 0.0;
  std::vector<double> gross_leverage;     // per day, sum |w|
  std::vector<SanityFlag> flags;
};

/// Health checks over a decoded weight path against historical bounds.
SanityReport sanity_check_weights(const DateIndex& index, const Eigen::MatrixXd& weights,
                                  const WeightBounds& historical_bounds,
                                  const SanityConfig& cfg = {});

inline SanityReport sanity_check_weights(const DecodeResult& result,
                                         const WeightBounds& historical_bounds,
                                         const SanityConfig& cfg = {}) {
  return sanity_check_weights(result.index, result.weights, historical_bounds, cfg);
}

}  // namespace peplica
