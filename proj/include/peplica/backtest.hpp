#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "peplica/asymmetry.hpp"
#include "peplica/decoder.hpp"
#include "peplica/overlays.hpp"
#include "peplica/timeseries.hpp"

namespace peplica {

enum class RefitPolicy { never, annual };

struct TailRiskOverlayConfig {
  overlays::TailRiskConfig signals;
  double scale = 1.0;  // capital multiplier on the overlay return stream
};

struct MomentumOverlayConfig {
  overlays::HysteresisConfig hysteresis;
  int momentum_window = 60;
  int vol_window = 60;
  double vol_target = 0.10;               // annualized, risk-off book
  std::string equity_asset;               // empty: first panel column
  std::vector<std::string> cross_assets;  // empty: every other column
  double scale = 1.0;
};

struct BacktestConfig {
  Date train_start;
  Date train_end;
  Date test_start;
  RefitPolicy refit = RefitPolicy::never;
  AsymmetryConfig asymmetry;
  std::optional<TailRiskOverlayConfig> tail_risk;
  std::optional<MomentumOverlayConfig> momentum;
  std::optional<WeightBounds> bounds;  // default: [0,1] per panel asset
  double leverage_cap = 3.0;
  double jump_cap = 0.25;
  FitConfig fit;  // bounds field is overwritten with the resolved bounds

  void validate() const;
};

struct NamedSeries {
  std::string name;
  ReturnSeries returns;
};

struct BacktestInputs {
  NavSeries proxy_nav;
  AssetPanel panel;
  std::vector<NamedSeries> benchmarks;      // quarterly return tracks
  std::optional<overlays::VixInputs> vix;   // required if tail_risk is on
};

/// Stats where individual metrics may be undefined on degenerate samples
/// (e.g. Sortino with no losing quarter); undefined slots carry a warning.
struct LenientStats {
  std::map<std::string, std::optional<double>> values;
  std::vector<std::string> warnings;
  int periods_per_year = 0;
};

struct TrailingCorrelationEntry {
  std::string horizon;  // "1Y", "3Y", "5Y", "7Y", "10Y", "lifetime"
  int quarters = 0;     // window size actually used
  std::optional<double> value;  // empty: fewer than 4 overlapping quarters
};

struct BacktestReport {
  DateIndex test_index;
  std::vector<std::string> asset_names;
  Eigen::MatrixXd test_weights;     // post-update weights per test date, leverage-enforced
  ReturnSeries replication_raw;     // decoded one-step returns, pre-adjustment
  ReturnSeries replication;         // post-asymmetry, post-overlay
  std::vector<double> innovations;  // vs the (possibly transformed) target
  SanityReport sanity;
  LenientStats stats_daily;
  LenientStats stats_quarterly;
  std::map<std::string, std::vector<TrailingCorrelationEntry>> correlations;
  StateSpaceModel model;            // fitted model (last refit segment)
  double train_log_likelihood = 0.0;
};

/// Trains on [train_start, train_end], filters from train_start with
/// continuous correction, reports the test period only: decoded replication,
/// asymmetry transform, optional overlays, weight sanity checks, stats and
/// trailing benchmark correlations on quarterly-resampled returns.
BacktestReport run_backtest(const BacktestInputs& inputs, const BacktestConfig& cfg);

/// Pearson correlation of quarterly returns over trailing windows ending at
/// the last common quarter. Horizons with fewer than 4 overlapping quarters
/// are flagged unavailable.
std::vector<TrailingCorrelationEntry> trailing_correlation_table(const ReturnSeries& strategy_q,
                                                                 const ReturnSeries& benchmark_q);

/// Emits replication.csv, weights.csv, stats.csv, correlations.csv and
/// report.json into out_dir (created if absent). Byte-deterministic.
void write_report(const BacktestReport& report, const std::filesystem::path& out_dir);

/// Stats battery tolerant of individually undefined metrics.
LenientStats lenient_stats(const ReturnSeries& r, int periods_per_year);

}  // namespace peplica
