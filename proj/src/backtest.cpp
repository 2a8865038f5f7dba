#include "peplica/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "peplica/model_io.hpp"
#include "peplica/stats.hpp"

namespace peplica {

namespace {

using json = nlohmann::json;

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

/// Rebuild a NAV track on its own dates from asymmetry-compressed returns.
NavSeries transform_target(const NavSeries& nav, const AsymmetryConfig& cfg) {
  ReturnSeries adjusted = apply_asymmetry(nav_to_returns(nav), cfg);
  std::vector<double> levels(nav.size());
  levels[0] = nav[0];
  for (size_t t = 1; t < nav.size(); ++t) levels[t] = levels[t - 1] * (1.0 + adjusted[t - 1]);
  return NavSeries(nav.index(), std::move(levels));
}

Eigen::VectorXd enforce_leverage(Eigen::VectorXd w, double cap, const WeightBounds& bounds) {
  double gross = w.cwiseAbs().sum();
  if (gross > cap) {
    w *= cap / gross;
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      w[k] = std::clamp(w[k], bounds.min[static_cast<size_t>(k)],
                        bounds.max[static_cast<size_t>(k)]);
    }
  }
  return w;
}

}  // namespace

void BacktestConfig::validate() const {
  if (!(train_start < train_end) || !(train_end <= test_start)) {
    throw std::invalid_argument("require train_start < train_end <= test_start");
  }
  asymmetry.validate();
  if (tail_risk) tail_risk->signals.validate();
  if (momentum) momentum->hysteresis.validate();
  if (!(leverage_cap > 0.0)) throw std::invalid_argument("leverage_cap must be > 0");
  if (!(jump_cap > 0.0)) throw std::invalid_argument("jump_cap must be > 0");
}

LenientStats lenient_stats(const ReturnSeries& r, int periods_per_year) {
  LenientStats out;
  out.periods_per_year = periods_per_year;
  auto put = [&](const char* name, auto&& fn) {
    try {
      out.values[name] = fn();
    } catch (const std::exception& e) {
      out.values[name] = std::nullopt;
      out.warnings.push_back(std::string(name) + ": " + e.what());
    }
  };
  put("annual_return", [&] { return stats::annual_return(r, periods_per_year); });
  put("annual_vol", [&] { return stats::annual_vol(r, periods_per_year); });
  put("skew", [&] { return stats::skewness(r); });
  put("kurtosis", [&] { return stats::excess_kurtosis(r); });
  put("sortino", [&] { return stats::sortino(r, periods_per_year); });
  put("max_dd", [&] { return stats::max_drawdown(r); });
  put("worst10_dd", [&] { return stats::worst10_dd(r); });
  auto ratio = [&](const char* name, const char* num, const char* den) {
    if (out.values[num] && out.values[den]) {
      put(name, [&] { return stats::return_over_dd(*out.values[num], *out.values[den]); });
    } else {
      out.values[name] = std::nullopt;
    }
  };
  if (out.values["annual_return"] && out.values["annual_vol"]) {
    put("sharpe", [&] {
      return stats::sharpe_from_annual(*out.values["annual_return"], *out.values["annual_vol"]);
    });
  } else {
    out.values["sharpe"] = std::nullopt;
  }
  ratio("ret_over_maxdd", "annual_return", "max_dd");
  ratio("ret_over_worst10dd", "annual_return", "worst10_dd");
  return out;
}

std::vector<TrailingCorrelationEntry> trailing_correlation_table(const ReturnSeries& strategy_q,
                                                                 const ReturnSeries& benchmark_q) {
  // Quarterly points are matched on the calendar quarter, not the exact
  // stamp, so business-day and month-end conventions interoperate.
  auto key = [](const Date& d) { return d.year() * 4 + (d.quarter() - 1); };
  std::map<int, double> bench;
  for (size_t i = 0; i < benchmark_q.size(); ++i) bench[key(benchmark_q.index()[i])] = benchmark_q[i];

  std::vector<double> s, b;
  for (size_t i = 0; i < strategy_q.size(); ++i) {
    auto it = bench.find(key(strategy_q.index()[i]));
    if (it != bench.end()) {
      s.push_back(strategy_q[i]);
      b.push_back(it->second);
    }
  }

  const std::pair<const char*, int> horizons[] = {{"lifetime", 0}, {"1Y", 4},  {"3Y", 12},
                                                  {"5Y", 20},      {"7Y", 28}, {"10Y", 40}};
  std::vector<TrailingCorrelationEntry> table;
  const int overlap = static_cast<int>(s.size());
  for (auto [label, quarters] : horizons) {
    TrailingCorrelationEntry entry;
    entry.horizon = label;
    int n = quarters == 0 ? overlap : quarters;
    entry.quarters = n;
    if (n >= 4 && overlap >= n) {
      try {
        entry.value = stats::correlation(std::span(s).last(static_cast<size_t>(n)),
                                         std::span(b).last(static_cast<size_t>(n)));
      } catch (const std::exception&) {
        entry.value = std::nullopt;  // constant window
      }
    }
    table.push_back(std::move(entry));
  }
  return table;
}

BacktestReport run_backtest(const BacktestInputs& inputs, const BacktestConfig& cfg) {
  cfg.validate();

  auto [panel_all, nav_all] = stage("align", [&] { return align_inner(inputs.panel, inputs.proxy_nav); });
  const size_t K = panel_all.cols();
  WeightBounds bounds = cfg.bounds ? *cfg.bounds : WeightBounds::uniform(K, 0.0, 1.0);
  bounds.validate(K);

  const bool pre_transform = cfg.asymmetry.application_point == ApplicationPoint::on_target;
  NavSeries target_all = pre_transform ? stage("target transform", [&] {
    return transform_target(nav_all, cfg.asymmetry);
  })
                                       : nav_all;

  // Work on the window starting at train_start; the filter burns in across
  // the training span so the state is settled by test_start.
  const size_t i0 = target_all.index().lower_bound(cfg.train_start);
  if (i0 >= target_all.size()) throw std::invalid_argument("no data at or after train_start");
  const size_t T = target_all.size() - i0;
  NavSeries target = target_all.slice(i0, T);
  AssetPanel panel = panel_all.slice(i0, T);

  const size_t train_count = target.index().lower_bound(cfg.train_end.plus_days(1));
  const size_t test_pos = target.index().lower_bound(cfg.test_start);
  if (test_pos >= T) throw std::invalid_argument("no data at or after test_start");
  if (train_count < 2) throw std::invalid_argument("insufficient training data before train_end");

  ReturnSeries target_returns = nav_to_returns(target);  // dates [1..T)

  // Refit segments: [position, end) ranges of the test window, each decoded
  // with a model fit on data strictly before the segment.
  std::vector<std::pair<size_t, size_t>> segments;
  if (cfg.refit == RefitPolicy::never) {
    segments.emplace_back(test_pos, T);
  } else {
    size_t s = test_pos;
    for (size_t t = test_pos + 1; t < T; ++t) {
      if (target.index()[t].year() != target.index()[s].year()) {
        segments.emplace_back(s, t);
        s = t;
      }
    }
    segments.emplace_back(s, T);
  }

  DateIndex test_index = target.index().slice(test_pos, T - test_pos);
  Eigen::MatrixXd raw_weights(static_cast<Eigen::Index>(T - test_pos), static_cast<Eigen::Index>(K));
  Eigen::MatrixXd test_weights(static_cast<Eigen::Index>(T - test_pos), static_cast<Eigen::Index>(K));
  std::vector<double> repl_raw(T - test_pos), innovations(T - test_pos);

  StateSpaceModel last_model;
  double train_ll = 0.0;
  for (const auto& [seg_begin, seg_end] : segments) {
    const size_t fit_end = std::max(train_count, seg_begin == test_pos ? train_count : seg_begin);
    FitConfig fit_cfg = cfg.fit;
    fit_cfg.bounds = bounds;
    StateSpaceModel model = stage("fit", [&] {
      return fit_mle(target.slice(0, fit_end), panel.slice(0, fit_end), fit_cfg);
    });
    DecodeResult decoded = stage("filter", [&] {
      return filter(model, target.slice(0, seg_end), panel.slice(0, seg_end));
    });

    for (size_t t = seg_begin; t < seg_end; ++t) {
      const size_t row = t - test_pos;
      Eigen::VectorXd w_prev = enforce_leverage(decoded.weights.row(static_cast<Eigen::Index>(t - 1)),
                                                cfg.leverage_cap, bounds);
      raw_weights.row(static_cast<Eigen::Index>(row)) = decoded.weights.row(static_cast<Eigen::Index>(t));
      test_weights.row(static_cast<Eigen::Index>(row)) =
          enforce_leverage(decoded.weights.row(static_cast<Eigen::Index>(t)), cfg.leverage_cap, bounds);
      repl_raw[row] = w_prev.dot(panel.row(t));
      innovations[row] = target_returns[t - 1] - repl_raw[row];
    }
    last_model = std::move(model);
    train_ll = stage("train likelihood", [&] {
      return log_likelihood(last_model, target.slice(0, fit_end), panel.slice(0, fit_end));
    });
  }

  ReturnSeries replication_raw = stage("replication", [&] {
    return ReturnSeries(test_index, repl_raw);
  });

  // Sanity runs on the raw decoded path so cap breaches are visible even
  // though the reported weights are enforced.
  SanityConfig sanity_cfg;
  sanity_cfg.leverage_cap = cfg.leverage_cap;
  sanity_cfg.jump_cap = cfg.jump_cap;
  SanityReport sanity = sanity_check_weights(test_index, raw_weights, bounds, sanity_cfg);

  ReturnSeries replication = pre_transform
                                 ? replication_raw
                                 : stage("asymmetry", [&] {
                                     return apply_asymmetry(replication_raw, cfg.asymmetry);
                                   });

  if (cfg.tail_risk) {
    if (!inputs.vix) {
      throw std::invalid_argument("tail risk overlay configured but no VIX data supplied");
    }
    replication = stage("tail risk overlay", [&] {
      std::vector<Date> common;
      std::set_intersection(target.index().dates().begin(), target.index().dates().end(),
                            inputs.vix->index().dates().begin(), inputs.vix->index().dates().end(),
                            std::back_inserter(common));
      if (common.empty()) throw std::invalid_argument("VIX data shares no dates with the panel");
      auto take_nav = [&](const NavSeries& s) {
        std::vector<double> v;
        v.reserve(common.size());
        for (const Date& d : common) v.push_back(s[s.index().lower_bound(d)]);
        return NavSeries(DateIndex(common), std::move(v));
      };
      auto take_ret = [&](const ReturnSeries& s) {
        std::vector<double> v;
        v.reserve(common.size());
        for (const Date& d : common) v.push_back(s[s.index().lower_bound(d)]);
        return ReturnSeries(DateIndex(common), std::move(v));
      };
      overlays::VixInputs vix(take_nav(inputs.vix->spot), take_nav(inputs.vix->front),
                              take_nav(inputs.vix->mid), take_ret(inputs.vix->st_returns),
                              take_ret(inputs.vix->mt_returns));
      overlays::TailRiskResult tr = overlays::tail_risk_allocation(vix, cfg.tail_risk->signals);

      std::vector<double> overlay(test_index.size());
      for (size_t i = 0; i < test_index.size(); ++i) {
        const Date& d = test_index[i];
        size_t pos = tr.overlay.index().lower_bound(d);
        if (pos >= tr.overlay.size() || !(tr.overlay.index()[pos] == d)) {
          throw std::invalid_argument("VIX data does not cover test date " + d.to_string());
        }
        overlay[i] = tr.overlay[pos];
      }
      return overlays::apply_overlay(replication, ReturnSeries(test_index, std::move(overlay)),
                                     cfg.tail_risk->scale);
    });
  }

  if (cfg.momentum) {
    replication = stage("momentum overlay", [&] {
      const MomentumOverlayConfig& mc = *cfg.momentum;
      std::string equity = mc.equity_asset.empty() ? panel.asset_names().front() : mc.equity_asset;
      std::vector<std::string> cross = mc.cross_assets;
      if (cross.empty()) {
        for (const auto& name : panel.asset_names()) {
          if (name != equity) cross.push_back(name);
        }
      }
      if (cross.empty()) throw std::invalid_argument("momentum overlay needs cross assets");

      size_t eq_col = panel.column_of(equity);
      std::vector<double> eq(panel.rows());
      for (size_t t = 0; t < panel.rows(); ++t) {
        eq[t] = panel.returns()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(eq_col));
      }
      overlays::SignalSeries trend =
          overlays::equity_trend(ReturnSeries(panel.index(), std::move(eq)), mc.hysteresis.trend_window);
      overlays::RegimeSeries regime = overlays::hysteresis_filter(trend, mc.hysteresis);
      overlays::RiskOffResult ro = overlays::riskoff_momentum_allocation(
          regime, panel.select(cross), mc.momentum_window, mc.vol_target, mc.vol_window);

      std::vector<double> overlay(test_index.size());
      for (size_t i = 0; i < test_index.size(); ++i) {
        size_t pos = ro.overlay.index().lower_bound(test_index[i]);
        if (pos >= ro.overlay.size() || !(ro.overlay.index()[pos] == test_index[i])) {
          throw std::invalid_argument("momentum overlay does not cover test date " +
                                      test_index[i].to_string());
        }
        overlay[i] = ro.overlay[pos];
      }
      return overlays::apply_overlay(replication, ReturnSeries(test_index, std::move(overlay)),
                                     mc.scale);
    });
  }

  BacktestReport report{test_index,
                        panel.asset_names(),
                        std::move(test_weights),
                        std::move(replication_raw),
                        replication,
                        std::move(innovations),
                        std::move(sanity),
                        stage("stats", [&] { return lenient_stats(replication, 252); }),
                        {},
                        {},
                        std::move(last_model),
                        train_ll};

  ReturnSeries quarterly = stage("quarterly resample", [&] { return resample_quarterly(replication); });
  report.stats_quarterly = stage("quarterly stats", [&] { return lenient_stats(quarterly, 4); });
  for (const auto& bench : inputs.benchmarks) {
    report.correlations[bench.name] = stage("correlations", [&] {
      return trailing_correlation_table(quarterly, bench.returns);
    });
  }
  return report;
}

namespace {

json stats_to_json(const LenientStats& s) {
  json out;
  for (const auto& [name, value] : s.values) {
    if (value) {
      out[name] = *value;
    } else {
      out[name] = nullptr;
    }
  }
  out["periods_per_year"] = s.periods_per_year;
  return out;
}

void format_6g(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  out += buf;
}

}  // namespace

void write_report(const BacktestReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  write_csv(report.replication, out_dir / "replication.csv", "return");

  {
    std::ofstream f(out_dir / "weights.csv");
    if (!f.is_open()) throw std::runtime_error("cannot write weights.csv");
    std::string out = "date";
    for (const auto& n : report.asset_names) out += ",w_" + n;
    out += ",replicated_return,innovation\n";
    for (size_t t = 0; t < report.test_index.size(); ++t) {
      out += report.test_index[t].to_string();
      for (Eigen::Index k = 0; k < report.test_weights.cols(); ++k) {
        out += ',';
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", report.test_weights(static_cast<Eigen::Index>(t), k));
        out += buf;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", report.replication_raw[t],
                    report.innovations[t]);
      out += buf;
    }
    f << out;
  }

  {
    std::ofstream f(out_dir / "stats.csv");
    if (!f.is_open()) throw std::runtime_error("cannot write stats.csv");
    std::string out = "metric,value\n";
    for (const auto& [name, value] : report.stats_daily.values) {
      out += name;
      out += ',';
      if (value) format_6g(out, *value);
      out += '\n';
    }
    out += "periods_per_year," + std::to_string(report.stats_daily.periods_per_year) + "\n";
    f << out;
  }

  {
    std::ofstream f(out_dir / "correlations.csv");
    if (!f.is_open()) throw std::runtime_error("cannot write correlations.csv");
    std::string out = "benchmark,horizon,quarters,correlation\n";
    for (const auto& [name, table] : report.correlations) {
      for (const auto& entry : table) {
        out += name + ',' + entry.horizon + ',' + std::to_string(entry.quarters) + ',';
        if (entry.value) format_6g(out, *entry.value);
        out += '\n';
      }
    }
    f << out;
  }

  json doc;
  doc["period"] = {{"start", report.test_index.front().to_string()},
                   {"end", report.test_index.back().to_string()},
                   {"observations", report.test_index.size()}};
  doc["asset_names"] = report.asset_names;
  doc["stats"] = stats_to_json(report.stats_daily);
  doc["stats_quarterly"] = stats_to_json(report.stats_quarterly);
  json corr;
  for (const auto& [name, table] : report.correlations) {
    json entry;
    for (const auto& e : table) {
      if (e.value) {
        entry[e.horizon] = *e.value;
      } else {
        entry[e.horizon] = nullptr;
      }
    }
    corr[name] = entry;
  }
  doc["correlations"] = corr;
  json sanity;
  sanity["max_one_day_jump"] = report.sanity.max_one_day_jump;
  sanity["at_bound_fraction"] = report.sanity.at_bound_fraction;
  double max_gross = 0.0;
  for (double g : report.sanity.gross_leverage) max_gross = std::max(max_gross, g);
  sanity["max_gross_leverage"] = max_gross;
  sanity["num_flags"] = report.sanity.flags.size();
  json flags = json::array();
  for (size_t i = 0; i < report.sanity.flags.size() && i < 20; ++i) {
    const auto& fl = report.sanity.flags[i];
    flags.push_back({{"date", fl.date.to_string()}, {"kind", fl.kind}, {"value", fl.value}});
  }
  sanity["flags"] = flags;
  doc["sanity"] = sanity;
  doc["model"] = model_to_json(report.model);
  doc["train_log_likelihood"] = report.train_log_likelihood;
  json warnings = json::array();
  for (const auto& w : report.stats_daily.warnings) warnings.push_back("daily " + w);
  for (const auto& w : report.stats_quarterly.warnings) warnings.push_back("quarterly " + w);
  doc["warnings"] = warnings;

  std::ofstream f(out_dir / "report.json");
  if (!f.is_open()) throw std::runtime_error("cannot write report.json");
  f << doc.dump(2) << '\n';
}

}  // namespace peplica
