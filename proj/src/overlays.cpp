#include "peplica/overlays.hpp"

#include <cmath>
#include <limits>

namespace peplica::overlays {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_of(const double* v, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += v[i];
  return s / n;
}

double sample_std(const double* v, int n) {
  double m = mean_of(v, n);
  double ss = 0.0;
  for (int i = 0; i < n; ++i) ss += (v[i] - m) * (v[i] - m);
  return std::sqrt(ss / (n - 1));
}

}  // namespace

SignalSeries::SignalSeries(DateIndex idx, std::vector<double> v, std::vector<SignalStatus> st)
    : index(std::move(idx)), values(std::move(v)), status(std::move(st)) {
  if (values.size() != index.size() || status.size() != index.size()) {
    throw std::invalid_argument("signal series length mismatch");
  }
}

VixInputs::VixInputs(NavSeries spot_, NavSeries front_, NavSeries mid_, ReturnSeries st_ret,
                     ReturnSeries mt_ret)
    : spot(std::move(spot_)),
      front(std::move(front_)),
      mid(std::move(mid_)),
      st_returns(std::move(st_ret)),
      mt_returns(std::move(mt_ret)) {
  if (front.index() != spot.index() || mid.index() != spot.index() ||
      st_returns.index() != spot.index() || mt_returns.index() != spot.index()) {
    throw std::invalid_argument("VIX inputs are not aligned on one date index");
  }
}

void TailRiskConfig::validate() const {
  if (window < 2) throw std::invalid_argument("tailrisk.window must be >= 2");
  if (z_window < 20) throw std::invalid_argument("tailrisk.z_window must be >= 20");
  if (st_mt_split < 0.0 || st_mt_split > 1.0) {
    throw std::invalid_argument("tailrisk.st_mt_split must be in [0, 1]");
  }
  if (overlay_weight < 0.0 || overlay_weight > 1.0) {
    throw std::invalid_argument("tailrisk.overlay_weight must be in [0, 1]");
  }
}

void HysteresisConfig::validate() const {
  if (!(enter_thresh < exit_thresh)) {
    throw std::invalid_argument("hysteresis enter_thresh must be below exit_thresh");
  }
  if (confirm_days < 1) throw std::invalid_argument("hysteresis confirm_days must be >= 1");
  if (trend_window < 2) throw std::invalid_argument("hysteresis trend_window must be >= 2");
}

SignalSeries vol_adjusted_return(const NavSeries& front_future, int window) {
  if (window < 2) throw std::invalid_argument("window must be >= 2");
  const size_t T = front_future.size();
  if (T < static_cast<size_t>(window) + 1) {
    throw std::invalid_argument("series shorter than window + 1");
  }

  std::vector<double> daily(T, 0.0);
  for (size_t t = 1; t < T; ++t) daily[t] = front_future[t] / front_future[t - 1] - 1.0;

  std::vector<double> values(T, kNaN);
  std::vector<SignalStatus> status(T, SignalStatus::warmup);
  for (size_t t = static_cast<size_t>(window); t < T; ++t) {
    double cum = front_future[t] / front_future[t - static_cast<size_t>(window)] - 1.0;
    double sd = sample_std(&daily[t - static_cast<size_t>(window) + 1], window);
    if (sd > 0.0) {
      values[t] = cum / sd;
      status[t] = SignalStatus::ok;
    } else {
      values[t] = 0.0;
      status[t] = SignalStatus::degenerate;
    }
  }
  return SignalSeries(front_future.index(), std::move(values), std::move(status));
}

SignalSeries curve_ratio(const NavSeries& front_future, const NavSeries& spot) {
  if (front_future.index() != spot.index()) {
    throw std::invalid_argument("front and spot are not aligned");
  }
  const size_t T = spot.size();
  std::vector<double> values(T);
  std::vector<SignalStatus> status(T, SignalStatus::ok);
  for (size_t t = 0; t < T; ++t) values[t] = front_future[t] / spot[t];
  return SignalSeries(spot.index(), std::move(values), std::move(status));
}

SignalSeries level_zscore(const NavSeries& spot, int z_window) {
  if (z_window < 2) throw std::invalid_argument("z_window must be >= 2");
  const size_t T = spot.size();
  if (T < static_cast<size_t>(z_window)) {
    throw std::invalid_argument("series shorter than z_window");
  }
  std::vector<double> values(T, kNaN);
  std::vector<SignalStatus> status(T, SignalStatus::warmup);
  for (size_t t = static_cast<size_t>(z_window); t < T; ++t) {
    const double* hist = &spot.values()[t - static_cast<size_t>(z_window)];
    double m = mean_of(hist, z_window);
    double sd = sample_std(hist, z_window);
    if (sd > 0.0) {
      values[t] = (spot[t] - m) / sd;
      status[t] = SignalStatus::ok;
    } else {
      values[t] = 0.0;
      status[t] = SignalStatus::degenerate;
    }
  }
  return SignalSeries(spot.index(), std::move(values), std::move(status));
}

SignalSeries equity_trend(const ReturnSeries& equity_returns, int trend_window) {
  if (trend_window < 2) throw std::invalid_argument("trend_window must be >= 2");
  const size_t T = equity_returns.size();
  if (T < static_cast<size_t>(trend_window)) {
    throw std::invalid_argument("series shorter than trend_window");
  }
  std::vector<double> values(T, kNaN);
  std::vector<SignalStatus> status(T, SignalStatus::warmup);
  const double scale = std::sqrt(static_cast<double>(trend_window));
  for (size_t t = static_cast<size_t>(trend_window) - 1; t < T; ++t) {
    const double* win = &equity_returns.values()[t + 1 - static_cast<size_t>(trend_window)];
    double m = mean_of(win, trend_window);
    double sd = sample_std(win, trend_window);
    if (sd > 0.0) {
      values[t] = m / sd * scale;
      status[t] = SignalStatus::ok;
    } else {
      values[t] = 0.0;
      status[t] = SignalStatus::degenerate;
    }
  }
  return SignalSeries(equity_returns.index(), std::move(values), std::move(status));
}

RegimeSeries hysteresis_filter(const SignalSeries& trend, const HysteresisConfig& cfg) {
  cfg.validate();
  RegimeSeries out{trend.index, std::vector<int>(trend.size(), 0)};
  int state = 0;
  int enter_streak = 0;
  int exit_streak = 0;
  for (size_t t = 0; t < trend.size(); ++t) {
    if (!trend.valid(t)) {
      enter_streak = exit_streak = 0;  // a gap breaks any confirmation streak
      out.state[t] = state;
      continue;
    }
    double v = trend.values[t];
    if (state == 0) {
      enter_streak = v < cfg.enter_thresh ? enter_streak + 1 : 0;
      if (enter_streak >= cfg.confirm_days) {
        state = 1;
        enter_streak = exit_streak = 0;
      }
    } else {
      exit_streak = v > cfg.exit_thresh ? exit_streak + 1 : 0;
      if (exit_streak >= cfg.confirm_days) {
        state = 0;
        enter_streak = exit_streak = 0;
      }
    }
    out.state[t] = state;
  }
  return out;
}

TailRiskResult tail_risk_allocation(const VixInputs& inputs, const TailRiskConfig& cfg) {
  cfg.validate();
  SignalSeries var = vol_adjusted_return(inputs.front, cfg.window);
  SignalSeries ratio = curve_ratio(inputs.front, inputs.spot);
  SignalSeries z = level_zscore(inputs.spot, cfg.z_window);

  const size_t T = inputs.index().size();
  TailRiskResult result{inputs.index(), std::vector<double>(T, 0.0),
                        std::vector<double>(T, 0.0),
                        ReturnSeries(inputs.index().slice(1, T - 1), std::vector<double>(T - 1, 0.0))};

  for (size_t t = 0; t < T; ++t) {
    if (!var.valid(t) || !ratio.valid(t) || !z.valid(t)) continue;
    bool aligned = var.values[t] > cfg.var_thresh && ratio.values[t] < cfg.curve_thresh &&
                   z.values[t] > cfg.z_thresh;
    if (aligned) {
      result.st_weight[t] = cfg.overlay_weight * cfg.st_mt_split;
      result.mt_weight[t] = cfg.overlay_weight * (1.0 - cfg.st_mt_split);
    }
  }

  std::vector<double> overlay(T - 1, 0.0);
  for (size_t t = 1; t < T; ++t) {
    overlay[t - 1] = result.st_weight[t - 1] * inputs.st_returns[t] +
                     result.mt_weight[t - 1] * inputs.mt_returns[t];
  }
  result.overlay = ReturnSeries(inputs.index().slice(1, T - 1), std::move(overlay));
  return result;
}

RiskOffResult riskoff_momentum_allocation(const RegimeSeries& regime,
                                          const AssetPanel& cross_asset_returns,
                                          int momentum_window, double vol_target,
                                          int vol_window) {
  if (momentum_window < 2) throw std::invalid_argument("momentum_window must be >= 2");
  if (vol_window < 2) throw std::invalid_argument("vol_window must be >= 2");
  if (!(vol_target > 0.0)) throw std::invalid_argument("vol_target must be > 0");
  if (regime.index != cross_asset_returns.index()) {
    throw std::invalid_argument("regime and cross-asset panel are not aligned");
  }

  const size_t T = cross_asset_returns.rows();
  const size_t K = cross_asset_returns.cols();
  const Eigen::MatrixXd& r = cross_asset_returns.returns();
  const double daily_target = vol_target / std::sqrt(252.0);

  RiskOffResult result{regime.index, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T),
                                                            static_cast<Eigen::Index>(K)),
                       ReturnSeries(regime.index.slice(1, T - 1), std::vector<double>(T - 1, 0.0))};

  const size_t warmup = static_cast<size_t>(std::max(momentum_window, vol_window));
  for (size_t t = warmup - 1; t < T; ++t) {
    if (regime.state[t] != 1) continue;

    // Momentum and vol from the trailing windows ending at t (used at t+1).
    std::vector<size_t> longs;
    std::vector<double> inv_vol;
    for (size_t k = 0; k < K; ++k) {
      double growth = 1.0;
      for (size_t s = t + 1 - static_cast<size_t>(momentum_window); s <= t; ++s) {
        growth *= 1.0 + r(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(k));
      }
      if (growth - 1.0 <= 0.0) continue;
      std::vector<double> win(static_cast<size_t>(vol_window));
      for (int i = 0; i < vol_window; ++i) {
        win[static_cast<size_t>(i)] = r(static_cast<Eigen::Index>(t + 1 - static_cast<size_t>(vol_window) + static_cast<size_t>(i)),
                                        static_cast<Eigen::Index>(k));
      }
      double sd = sample_std(win.data(), vol_window);
      if (!(sd > 0.0)) continue;
      longs.push_back(k);
      inv_vol.push_back(1.0 / sd);
    }
    if (longs.empty()) continue;  // risk-off with nothing to own: stay flat

    double total = 0.0;
    for (double iv : inv_vol) total += iv;
    Eigen::VectorXd base = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(K));
    for (size_t i = 0; i < longs.size(); ++i) {
      base[static_cast<Eigen::Index>(longs[i])] = inv_vol[i] / total;
    }

    // Trailing sample covariance of the held subset for the vol scale.
    Eigen::MatrixXd window = r.middleRows(static_cast<Eigen::Index>(t + 1 - static_cast<size_t>(vol_window)),
                                          vol_window);
    Eigen::MatrixXd centered = window.rowwise() - window.colwise().mean();
    Eigen::MatrixXd cov = centered.transpose() * centered / (vol_window - 1);
    double port_var = base.dot(cov * base);
    if (!(port_var > 0.0)) continue;
    double scale = daily_target / std::sqrt(port_var);
    result.weights.row(static_cast<Eigen::Index>(t)) = scale * base;
  }

  std::vector<double> overlay(T - 1, 0.0);
  for (size_t t = 1; t < T; ++t) {
    overlay[t - 1] = result.weights.row(static_cast<Eigen::Index>(t - 1))
                         .dot(r.row(static_cast<Eigen::Index>(t)));
  }
  result.overlay = ReturnSeries(regime.index.slice(1, T - 1), std::move(overlay));
  return result;
}

ReturnSeries apply_overlay(const ReturnSeries& base, const ReturnSeries& overlay, double scale) {
  if (base.index() != overlay.index()) {
    throw std::invalid_argument("base and overlay are not aligned");
  }
  std::vector<double> combined(base.size());
  for (size_t t = 0; t < base.size(); ++t) combined[t] = base[t] + scale * overlay[t];
  return ReturnSeries(base.index(), std::move(combined));
}

}  // namespace peplica::overlays
