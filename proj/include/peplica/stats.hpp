#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "peplica/timeseries.hpp"

namespace peplica::stats {

/// Geometric annualization: (prod(1+r))^(ppy/n) - 1.
double annual_return(const ReturnSeries& r, int periods_per_year);

/// Sample standard deviation (n-1 denominator) scaled by sqrt(ppy).
double annual_vol(const ReturnSeries& r, int periods_per_year);

/// The ratio convention used throughout: geometric annual return over
/// annualized vol, zero risk-free rate.
double sharpe_from_annual(double annual_ret, double annual_vol);
double sharpe(const ReturnSeries& r, int periods_per_year);

/// Annual return over annualized downside deviation, where downside deviation
/// is sqrt(mean over all n of min(r,0)^2). Errors when no return is negative.
double sortino(const ReturnSeries& r, int periods_per_year);

/// Adjusted Fisher-Pearson sample skewness (G1).
double skewness(const ReturnSeries& r);

/// Bias-adjusted sample excess kurtosis (G2); 0 for a Gaussian.
double excess_kurtosis(const ReturnSeries& r);

/// Deepest peak-to-trough decline of the compounded track, as a fraction.
double max_drawdown(const ReturnSeries& r);

/// 90th percentile (linear interpolation) of the per-period underwater
/// series: the drawdown depth exceeded on 10% of periods.
double worst10_dd(const ReturnSeries& r);

double return_over_dd(double annual_ret, double drawdown);

/// Per-period drawdown depth 1 - nav/running-peak, starting the peak at the
/// pre-return level.
std::vector<double> underwater(const ReturnSeries& r);

/// Pearson correlation of two equally long samples.
double correlation(std::span<const double> a, std::span<const double> b);

struct StatsTable {
  double annual_return = 0.0;
  double annual_vol = 0.0;
  double skew = 0.0;
  double kurtosis = 0.0;
  double sharpe = 0.0;
  double sortino = 0.0;
  double max_dd = 0.0;
  double worst10_dd = 0.0;
  double ret_over_maxdd = 0.0;
  double ret_over_worst10dd = 0.0;
  int periods_per_year = 0;
};

/// All metrics from one pass over the series; component errors propagate with
/// the metric name attached.
StatsTable full_table(const ReturnSeries& r, int periods_per_year);

/// One row per metric, columns (metric,value), values at 6 significant digits.
void write_csv(const StatsTable& t, const std::filesystem::path& path);
StatsTable read_csv(const std::filesystem::path& path);

}  // namespace peplica::stats
