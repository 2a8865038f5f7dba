#include "peplica/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "peplica/rng.hpp"

namespace peplica::synth {

namespace {

constexpr std::uint64_t kPanelStream = 0;
constexpr std::uint64_t kWeightStream = 1;
constexpr std::uint64_t kNavStream = 2;
constexpr std::uint64_t kVixStream = 3;

}  // namespace

void ScenarioSpec::validate() const {
  if (days < 2) throw std::invalid_argument("scenario needs days >= 2");
  if (num_assets < 1) throw std::invalid_argument("scenario needs num_assets >= 1");
  if (asset_vols.size() != static_cast<size_t>(num_assets)) {
    throw std::invalid_argument("asset_vols size does not match num_assets");
  }
  for (double v : asset_vols) {
    if (!(v > 0.0)) throw std::invalid_argument("asset vols must be positive");
  }
  if (asset_corr.rows() != num_assets || asset_corr.cols() != num_assets) {
    throw std::invalid_argument("asset_corr dimensions do not match num_assets");
  }
  for (int i = 0; i < num_assets; ++i) {
    if (std::fabs(asset_corr(i, i) - 1.0) > 1e-12) {
      throw std::invalid_argument("asset_corr must have unit diagonal");
    }
  }
  if ((asset_corr - asset_corr.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("asset_corr must be symmetric");
  }
  if (weight_values.size() != static_cast<size_t>(num_assets)) {
    throw std::invalid_argument("weight_values size does not match num_assets");
  }
  weight_bounds.validate(static_cast<size_t>(num_assets));
  if (!(obs_noise_var >= 0.0)) throw std::invalid_argument("obs_noise_var must be >= 0");
  if (stress) {
    if (stress->start_day < 0 || stress->end_day > days || stress->start_day >= stress->end_day) {
      throw std::invalid_argument("stress window out of range");
    }
    if (stress->stress_asset < 0 || stress->stress_asset >= num_assets) {
      throw std::invalid_argument("stress asset out of range");
    }
  }
}

ScenarioSpec ScenarioSpec::simple(std::uint64_t seed, int days, int num_assets,
                                  std::vector<double> weight_values, double obs_noise_var) {
  ScenarioSpec spec;
  spec.seed = seed;
  spec.days = days;
  spec.num_assets = num_assets;
  spec.asset_vols.assign(static_cast<size_t>(num_assets), 0.16);
  spec.asset_corr = Eigen::MatrixXd::Identity(num_assets, num_assets);
  spec.weight_values = std::move(weight_values);
  spec.weight_bounds = WeightBounds::uniform(static_cast<size_t>(num_assets), 0.0, 1.0);
  spec.obs_noise_var = obs_noise_var;
  return spec;
}

DateIndex business_days(Date start_date, int count) {
  if (count < 1) throw std::invalid_argument("need at least one business day");
  std::vector<Date> dates;
  dates.reserve(static_cast<size_t>(count));
  Date d = start_date;
  while (d.is_weekend()) d = d.plus_days(1);
  while (static_cast<int>(dates.size()) < count) {
    dates.push_back(d);
    do {
      d = d.plus_days(1);
    } while (d.is_weekend());
  }
  return DateIndex(std::move(dates));
}

AssetPanel gen_panel(const ScenarioSpec& spec) {
  spec.validate();
  const int T = spec.days;
  const int K = spec.num_assets;

  Eigen::LLT<Eigen::MatrixXd> llt(spec.asset_corr);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("asset_corr is not positive definite");
  }
  Eigen::MatrixXd chol = llt.matrixL();

  Xoshiro256pp rng(spec.seed, kPanelStream);
  Eigen::MatrixXd returns(T, K);
  Eigen::VectorXd z(K);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) z[k] = rng.next_gaussian();
    Eigen::VectorXd x = chol * z;
    for (int k = 0; k < K; ++k) {
      returns(t, k) = x[k] * spec.asset_vols[static_cast<size_t>(k)] / std::sqrt(252.0);
    }
    if (spec.stress && t >= spec.stress->start_day && t < spec.stress->end_day) {
      returns(t, spec.stress->stress_asset) += spec.stress->equity_crash_drift;
    }
  }

  std::vector<std::string> names;
  names.reserve(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) names.push_back("asset" + std::to_string(k));
  return AssetPanel(business_days(spec.start_date, T), std::move(names), std::move(returns));
}

WeightPath gen_weight_path(const ScenarioSpec& spec) {
  spec.validate();
  const int T = spec.days;
  const int K = spec.num_assets;
  Eigen::MatrixXd w(T, K);

  Eigen::VectorXd row(K);
  for (int k = 0; k < K; ++k) row[k] = spec.weight_values[static_cast<size_t>(k)];

  if (spec.weight_mode == WeightMode::constant) {
    for (int t = 0; t < T; ++t) w.row(t) = row;
  } else {
    Xoshiro256pp rng(spec.seed, kWeightStream);
    w.row(0) = row;
    for (int t = 1; t < T; ++t) {
      for (int k = 0; k < K; ++k) {
        double step = spec.weight_step_vol * rng.next_gaussian();
        row[k] = std::clamp(row[k] + step, spec.weight_bounds.min[static_cast<size_t>(k)],
                            spec.weight_bounds.max[static_cast<size_t>(k)]);
      }
      w.row(t) = row;
    }
  }
  return WeightPath{business_days(spec.start_date, T), std::move(w)};
}

NavSeries gen_nav(const WeightPath& weights, const AssetPanel& panel, double obs_noise_var,
                  std::uint64_t seed) {
  if (weights.index != panel.index()) {
    throw std::invalid_argument("weight path and panel are not aligned");
  }
  const size_t T = panel.rows();
  Xoshiro256pp rng(seed, kNavStream);
  const double noise_std = std::sqrt(obs_noise_var);

  std::vector<double> nav(T);
  nav[0] = 100.0;
  for (size_t t = 1; t < T; ++t) {
    double step = weights.weights.row(static_cast<Eigen::Index>(t - 1))
                      .dot(panel.row(t));
    if (noise_std > 0.0) step += noise_std * rng.next_gaussian();
    if (step <= -1.0) {
      throw std::invalid_argument("generated NAV step return <= -100% at " +
                                  panel.index()[t].to_string());
    }
    nav[t] = nav[t - 1] * (1.0 + step);
  }
  return NavSeries(panel.index(), std::move(nav));
}

overlays::VixInputs gen_vix(const ScenarioSpec& spec) {
  spec.validate();
  const int T = spec.days;
  const VixSpikeProfile profile = spec.stress ? spec.stress->vix : VixSpikeProfile{};

  Xoshiro256pp rng(spec.seed, kVixStream);
  std::vector<double> spot(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    double level = profile.base_spot * (1.0 + profile.noise_vol * rng.next_gaussian());
    if (spec.stress && t >= spec.stress->start_day && t < spec.stress->end_day) {
      // Sharp ramp to the peak over the first quarter of the window, then an
      // exponential glide back toward base.
      int len = spec.stress->end_day - spec.stress->start_day;
      int ramp = std::max(1, len / 4);
      int k = t - spec.stress->start_day;
      if (k < ramp) {
        double frac = static_cast<double>(k + 1) / ramp;
        level = profile.base_spot + frac * (profile.peak_spot - profile.base_spot);
      } else {
        double decay = std::exp(-3.0 * static_cast<double>(k - ramp) / std::max(1, len - ramp));
        level = profile.base_spot + decay * (profile.peak_spot - profile.base_spot);
      }
    }
    spot[static_cast<size_t>(t)] = level;
  }

  std::vector<double> front(static_cast<size_t>(T)), mid(static_cast<size_t>(T));
  for (int t = 0; t < T; ++t) {
    bool stressed = spot[static_cast<size_t>(t)] > 1.5 * profile.base_spot;
    double front_ratio = stressed ? profile.stress_discount : profile.calm_contango;
    double mid_ratio = stressed ? profile.stress_discount * 0.9
                                : profile.calm_contango * 1.03;
    front[static_cast<size_t>(t)] = spot[static_cast<size_t>(t)] * front_ratio;
    mid[static_cast<size_t>(t)] = spot[static_cast<size_t>(t)] * mid_ratio;
  }

  std::vector<double> st_ret(static_cast<size_t>(T), 0.0), mt_ret(static_cast<size_t>(T), 0.0);
  for (int t = 1; t < T; ++t) {
    st_ret[static_cast<size_t>(t)] =
        front[static_cast<size_t>(t)] / front[static_cast<size_t>(t - 1)] - 1.0;
    mt_ret[static_cast<size_t>(t)] =
        mid[static_cast<size_t>(t)] / mid[static_cast<size_t>(t - 1)] - 1.0;
  }

  DateIndex idx = business_days(spec.start_date, T);
  return overlays::VixInputs(NavSeries(idx, std::move(spot)), NavSeries(idx, std::move(front)),
                             NavSeries(idx, std::move(mid)), ReturnSeries(idx, std::move(st_ret)),
                             ReturnSeries(idx, std::move(mt_ret)));
}

Scenario gen_scenario(const ScenarioSpec& spec) {
  AssetPanel panel = gen_panel(spec);
  WeightPath weights = gen_weight_path(spec);
  NavSeries nav = gen_nav(weights, panel, spec.obs_noise_var, spec.seed);
  return Scenario{std::move(panel), std::move(weights), std::move(nav)};
}

}  // namespace peplica::synth
