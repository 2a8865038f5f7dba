#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "peplica/timeseries.hpp"

namespace peplica::overlays {

enum class SignalStatus : std::uint8_t {
  ok,
  warmup,      // value is NaN: not enough history yet, never reported as 0
  degenerate,  // value forced to 0 (e.g. zero in-window dispersion), flagged
};

/// A derived indicator on a date index. Warm-up points carry NaN values so a
/// backtest can never mistake "no signal yet" for "signal at zero".
struct SignalSeries {
  DateIndex index;
  std::vector<double> values;
  std::vector<SignalStatus> status;

  SignalSeries(DateIndex idx, std::vector<double> v, std::vector<SignalStatus> st);
  size_t size() const { return values.size(); }
  bool valid(size_t t) const { return status[t] != SignalStatus::warmup; }
};

/// Aligned VIX complex: spot index level, front-month and mid-curve futures
/// levels, and the tradable ST/MT futures return streams.
struct VixInputs {
  NavSeries spot;
  NavSeries front;
  NavSeries mid;
  ReturnSeries st_returns;
  ReturnSeries mt_returns;

  VixInputs(NavSeries spot, NavSeries front, NavSeries mid, ReturnSeries st_ret,
            ReturnSeries mt_ret);
  const DateIndex& index() const { return spot.index(); }
};

struct TailRiskConfig {
  int window = 20;            // vol-adjusted-return lookback
  double var_thresh = 0.0;    // positive momentum in vol
  double curve_thresh = 1.0;  // ratio below this = backwardation = stress
  double z_thresh = 1.0;      // spot level unusually high vs history
  int z_window = 252;
  double st_mt_split = 0.5;   // fraction of the overlay in ST futures
  double overlay_weight = 0.1;

  void validate() const;
};

struct HysteresisConfig {
  int trend_window = 60;
  double enter_thresh = -1.0;  // trend below this (sustained) switches risk-off
  double exit_thresh = 0.0;    // trend above this (sustained) switches back
  int confirm_days = 5;

  void validate() const;
};

/// Trailing `window`-day cumulative return of the future divided by the
/// standard deviation of its daily returns over the same window. Warm-up for
/// the first `window` points; zero in-window dispersion flags a degenerate 0.
SignalSeries vol_adjusted_return(const NavSeries& front_future, int window);

/// Element-wise forward/spot ratio; < 1 means backwardation.
SignalSeries curve_ratio(const NavSeries& front_future, const NavSeries& spot);

/// Z-score of today's level against the trailing z_window-day history ending
/// yesterday (deviation from prior norms, no same-day echo).
SignalSeries level_zscore(const NavSeries& spot, int z_window);

/// Trend t-statistic: mean/std of daily returns over the trailing window,
/// scaled by sqrt(window).
SignalSeries equity_trend(const ReturnSeries& equity_returns, int trend_window);

/// Risk regime per date: 0 = risk-on, 1 = risk-off.
struct RegimeSeries {
  DateIndex index;
  std::vector<int> state;
};

/// Two-threshold state machine with confirmation: starts risk-on; switches
/// only after `confirm_days` consecutive closes beyond a trigger. Warm-up
/// points hold the current state and break any confirmation streak.
RegimeSeries hysteresis_filter(const SignalSeries& trend, const HysteresisConfig& cfg);

struct TailRiskResult {
  DateIndex index;                 // same dates as the inputs
  std::vector<double> st_weight;   // allocation decided at t
  std::vector<double> mt_weight;
  ReturnSeries overlay;            // dates [1..): uses the t-1 allocation
};

/// Allocates overlay_weight across ST/MT VIX futures on days where all three
/// stress signals align (AND), with a one-day implementation lag.
TailRiskResult tail_risk_allocation(const VixInputs& inputs, const TailRiskConfig& cfg);

struct RiskOffResult {
  DateIndex index;
  Eigen::MatrixXd weights;  // T x K cross-asset allocation decided at t
  ReturnSeries overlay;     // dates [1..): uses the t-1 allocation
};

/// When risk-off at t-1: long the cross-assets with positive trailing
/// compounded momentum, inverse-vol weighted and scaled so trailing
/// `vol_window`-day ex-ante vol hits `vol_target` (annualized). Zero when
/// risk-on or when no asset qualifies.
RiskOffResult riskoff_momentum_allocation(const RegimeSeries& regime,
                                          const AssetPanel& cross_asset_returns,
                                          int momentum_window, double vol_target = 0.10,
                                          int vol_window = 60);

/// combined_t = base_t + scale * overlay_t; indices must match exactly.
ReturnSeries apply_overlay(const ReturnSeries& base, const ReturnSeries& overlay, double scale);

}  // namespace peplica::overlays
