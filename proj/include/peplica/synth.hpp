#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "peplica/decoder.hpp"
#include "peplica/overlays.hpp"
#include "peplica/timeseries.hpp"

namespace peplica::synth {

// Deterministic scenario generator: every draw comes from xoshiro256++
// substreams of one seed, so a spec reproduces bit-identical fixtures on any
// platform. Substream ids: 0 panel, 1 weight path, 2 NAV noise, 3 VIX wiggle.

enum class WeightMode { constant, random_walk };

struct VixSpikeProfile {
  double base_spot = 15.0;        // calm spot level
  double peak_spot = 60.0;        // top of the spike
  double calm_contango = 1.05;    // front/spot away from stress
  double stress_discount = 0.90;  // front/spot while spot is elevated
  double noise_vol = 0.01;        // multiplicative wiggle on calm days
};

struct StressWindow {
  int start_day = 0;                 // inclusive row offset
  int end_day = 0;                   // exclusive
  double equity_crash_drift = 0.0;   // added to the stress asset per day
  int stress_asset = 0;
  VixSpikeProfile vix;
};

struct ScenarioSpec {
  std::uint64_t seed = 42;
  int days = 1000;                        // T
  int num_assets = 4;                     // K
  std::vector<double> asset_vols;         // annualized, per asset
  Eigen::MatrixXd asset_corr;             // KxK, unit diagonal, PSD
  WeightMode weight_mode = WeightMode::constant;
  std::vector<double> weight_values;      // constant values / walk start
  double weight_step_vol = 0.0;           // per-day step std in walk mode
  WeightBounds weight_bounds;             // clamp for the walk; default [0,1]
  double obs_noise_var = 1e-4;
  std::optional<StressWindow> stress;
  Date start_date = Date(2005, 1, 3);

  void validate() const;
  static ScenarioSpec simple(std::uint64_t seed, int days, int num_assets,
                             std::vector<double> weight_values, double obs_noise_var);
};

struct WeightPath {
  DateIndex index;
  Eigen::MatrixXd weights;  // T x K
};

/// T consecutive weekdays starting at (or after) start_date.
DateIndex business_days(Date start_date, int count);

/// Correlated zero-mean Gaussian daily returns (Cholesky of asset_corr),
/// stress drift injected into the stress asset inside the window.
AssetPanel gen_panel(const ScenarioSpec& spec);

/// Constant rows, or a clamped Gaussian random walk from weight_values.
WeightPath gen_weight_path(const ScenarioSpec& spec);

/// Forward simulation of the NAV recursion: NAV_t = NAV_{t-1} (1 + w_{t-1}.r_t
/// + eps_t), NAV_0 = 100. Throws if a step return would reach -100%.
NavSeries gen_nav(const WeightPath& weights, const AssetPanel& panel, double obs_noise_var,
                  std::uint64_t seed);

/// Spot/front/mid VIX levels plus futures return streams on the scenario
/// calendar: calm contango with a seeded wiggle, and if a stress window is
/// present, a spike to peak_spot with the curve flipping into backwardation.
overlays::VixInputs gen_vix(const ScenarioSpec& spec);

struct Scenario {
  AssetPanel panel;
  WeightPath true_weights;
  NavSeries nav;
};

/// Panel + weight path + NAV from one spec (substreams keep them independent).
Scenario gen_scenario(const ScenarioSpec& spec);

}  // namespace peplica::synth
