#include "peplica/config.hpp"

#include <fstream>
#include <set>

namespace peplica {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& scope) {
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown config key '" + scope + key + "'");
    }
  }
}

template <typename T>
void read_into(const json& obj, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("bad value for config key '") + key + "'");
  }
}

Date read_date(const json& obj, const char* key) {
  if (!obj.contains(key)) throw ConfigError(std::string("missing config key '") + key + "'");
  try {
    return Date::parse(obj.at(key).get<std::string>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

void parse_asymmetry(const json& obj, AsymmetryConfig& out) {
  check_keys(obj, {"af", "application_point"}, "asymmetry.");
  read_into(obj, "af", out.af);
  if (obj.contains("application_point")) {
    std::string p = obj.at("application_point").get<std::string>();
    if (p == "on_output") {
      out.application_point = ApplicationPoint::on_output;
    } else if (p == "on_target") {
      out.application_point = ApplicationPoint::on_target;
    } else {
      throw ConfigError("asymmetry.application_point must be on_output or on_target");
    }
  }
}

void parse_tailrisk(const json& obj, BacktestConfig& cfg) {
  check_keys(obj,
             {"enabled", "window", "var_thresh", "curve_thresh", "z_thresh", "z_window",
              "st_mt_split", "overlay_weight", "scale"},
             "overlay.tailrisk.");
  bool enabled = true;
  read_into(obj, "enabled", enabled);
  if (!enabled) return;
  TailRiskOverlayConfig tr;
  read_into(obj, "window", tr.signals.window);
  read_into(obj, "var_thresh", tr.signals.var_thresh);
  read_into(obj, "curve_thresh", tr.signals.curve_thresh);
  read_into(obj, "z_thresh", tr.signals.z_thresh);
  read_into(obj, "z_window", tr.signals.z_window);
  read_into(obj, "st_mt_split", tr.signals.st_mt_split);
  read_into(obj, "overlay_weight", tr.signals.overlay_weight);
  read_into(obj, "scale", tr.scale);
  cfg.tail_risk = tr;
}

void parse_momentum(const json& obj, BacktestConfig& cfg) {
  check_keys(obj,
             {"enabled", "trend_window", "enter_thresh", "exit_thresh", "confirm_days",
              "momentum_window", "vol_window", "vol_target", "equity_asset", "cross_assets",
              "scale"},
             "overlay.momentum.");
  bool enabled = true;
  read_into(obj, "enabled", enabled);
  if (!enabled) return;
  MomentumOverlayConfig mc;
  read_into(obj, "trend_window", mc.hysteresis.trend_window);
  read_into(obj, "enter_thresh", mc.hysteresis.enter_thresh);
  read_into(obj, "exit_thresh", mc.hysteresis.exit_thresh);
  read_into(obj, "confirm_days", mc.hysteresis.confirm_days);
  read_into(obj, "momentum_window", mc.momentum_window);
  read_into(obj, "vol_window", mc.vol_window);
  read_into(obj, "vol_target", mc.vol_target);
  read_into(obj, "equity_asset", mc.equity_asset);
  read_into(obj, "cross_assets", mc.cross_assets);
  read_into(obj, "scale", mc.scale);
  cfg.momentum = mc;
}

void parse_fit(const json& obj, FitConfig& fit) {
  check_keys(obj,
             {"max_iters", "rel_tol", "start_obs_var", "start_q", "obs_var_floor", "full_q",
              "init_cov_diag"},
             "fit.");
  read_into(obj, "max_iters", fit.max_iters);
  read_into(obj, "rel_tol", fit.rel_tol);
  read_into(obj, "start_obs_var", fit.start_obs_var);
  read_into(obj, "start_q", fit.start_q);
  read_into(obj, "obs_var_floor", fit.obs_var_floor);
  read_into(obj, "full_q", fit.full_q);
  read_into(obj, "init_cov_diag", fit.init_cov_diag);
}

void parse_bounds(const json& obj, BoundsSpec& out) {
  check_keys(obj, {"min", "max"}, "bounds.");
  auto side = [&](const char* key, std::optional<double>& scalar, std::vector<double>& vec) {
    if (!obj.contains(key)) return;
    const json& v = obj.at(key);
    if (v.is_number()) {
      scalar = v.get<double>();
    } else if (v.is_array()) {
      vec = v.get<std::vector<double>>();
    } else {
      throw ConfigError(std::string("bounds.") + key + " must be a number or array");
    }
  };
  side("min", out.scalar_min, out.min);
  side("max", out.scalar_max, out.max);
}

void parse_data(const json& obj, const std::filesystem::path& base, DataConfig& out) {
  check_keys(obj,
             {"proxy", "proxy_kind", "panel", "vix", "benchmarks", "date_column",
              "missing_policy"},
             "data.");
  if (!obj.contains("proxy")) throw ConfigError("missing config key 'data.proxy'");
  if (!obj.contains("panel")) throw ConfigError("missing config key 'data.panel'");
  out.proxy = resolve(base, obj.at("proxy").get<std::string>());
  out.panel = resolve(base, obj.at("panel").get<std::string>());
  if (obj.contains("proxy_kind")) {
    std::string kind = obj.at("proxy_kind").get<std::string>();
    if (kind == "levels") {
      out.proxy_kind = ProxyKind::levels;
    } else if (kind == "returns") {
      out.proxy_kind = ProxyKind::returns;
    } else {
      throw ConfigError("data.proxy_kind must be levels or returns");
    }
  }
  if (obj.contains("vix")) out.vix = resolve(base, obj.at("vix").get<std::string>());
  if (obj.contains("benchmarks")) {
    for (const json& b : obj.at("benchmarks")) {
      check_keys(b, {"name", "path"}, "data.benchmarks.");
      out.benchmarks.push_back(
          {b.at("name").get<std::string>(), resolve(base, b.at("path").get<std::string>())});
    }
  }
  read_into(obj, "date_column", out.csv.date_column);
  if (obj.contains("missing_policy")) {
    std::string p = obj.at("missing_policy").get<std::string>();
    if (p == "reject") {
      out.csv.missing = MissingPolicy::reject;
    } else if (p == "forward_fill") {
      out.csv.missing = MissingPolicy::forward_fill;
    } else {
      throw ConfigError("data.missing_policy must be reject or forward_fill");
    }
  }
}

}  // namespace

WeightBounds BoundsSpec::resolve(size_t num_assets) const {
  WeightBounds b;
  b.min = min.empty() ? std::vector<double>(num_assets, scalar_min.value_or(0.0)) : min;
  b.max = max.empty() ? std::vector<double>(num_assets, scalar_max.value_or(1.0)) : max;
  try {
    b.validate(num_assets);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("bounds: ") + e.what());
  }
  return b;
}

RunConfig parse_run_config(const json& doc, const std::filesystem::path& base_dir) {
  check_keys(doc,
             {"data", "train_start", "train_end", "test_start", "refit", "asymmetry", "bounds",
              "leverage_cap", "jump_cap", "fit", "overlay", "out_dir", "log_level"},
             "");
  RunConfig cfg;
  if (!doc.contains("data")) throw ConfigError("missing config key 'data'");
  parse_data(doc.at("data"), base_dir, cfg.data);

  cfg.backtest.train_start = read_date(doc, "train_start");
  cfg.backtest.train_end = read_date(doc, "train_end");
  cfg.backtest.test_start = read_date(doc, "test_start");
  if (doc.contains("refit")) {
    std::string r = doc.at("refit").get<std::string>();
    if (r == "never") {
      cfg.backtest.refit = RefitPolicy::never;
    } else if (r == "annual") {
      cfg.backtest.refit = RefitPolicy::annual;
    } else {
      throw ConfigError("refit must be never or annual");
    }
  }
  if (doc.contains("asymmetry")) parse_asymmetry(doc.at("asymmetry"), cfg.backtest.asymmetry);
  if (doc.contains("bounds")) parse_bounds(doc.at("bounds"), cfg.bounds);
  read_into(doc, "leverage_cap", cfg.backtest.leverage_cap);
  read_into(doc, "jump_cap", cfg.backtest.jump_cap);
  if (doc.contains("fit")) parse_fit(doc.at("fit"), cfg.backtest.fit);
  if (doc.contains("overlay")) {
    const json& ov = doc.at("overlay");
    check_keys(ov, {"tailrisk", "momentum"}, "overlay.");
    if (ov.contains("tailrisk")) parse_tailrisk(ov.at("tailrisk"), cfg.backtest);
    if (ov.contains("momentum")) parse_momentum(ov.at("momentum"), cfg.backtest);
  }
  if (doc.contains("out_dir")) cfg.out_dir = resolve(base_dir, doc.at("out_dir").get<std::string>());
  read_into(doc, "log_level", cfg.log_level);

  try {
    cfg.backtest.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f.is_open()) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return parse_run_config(doc, path.parent_path());
}

void validate_paths(const RunConfig& cfg) {
  auto require = [](const std::filesystem::path& p, const char* what) {
    if (!std::filesystem::exists(p)) {
      throw ConfigError(std::string(what) + " file not found: " + p.string());
    }
  };
  require(cfg.data.proxy, "proxy");
  require(cfg.data.panel, "panel");
  if (cfg.data.vix) require(*cfg.data.vix, "vix");
  for (const auto& b : cfg.data.benchmarks) require(b.path, "benchmark");
}

BacktestInputs load_inputs(RunConfig& cfg) {
  validate_paths(cfg);
  AssetPanel panel = load_csv(cfg.data.panel, cfg.data.csv);

  NavSeries nav = [&] {
    if (cfg.data.proxy_kind == ProxyKind::levels) {
      return load_nav_csv(cfg.data.proxy, cfg.data.csv);
    }
    ReturnSeries r = load_returns_csv(cfg.data.proxy, cfg.data.csv);
    return returns_to_nav(r, 100.0);
  }();

  std::optional<overlays::VixInputs> vix;
  if (cfg.data.vix) {
    CsvOptions opts = cfg.data.csv;
    AssetPanel raw = load_csv(*cfg.data.vix, opts);
    for (const char* col : {"spot", "front", "mid", "st_ret", "mt_ret"}) {
      raw.column_of(col);  // throws with the missing column name
    }
    auto levels = [&](const char* col) {
      std::vector<double> v(raw.rows());
      for (size_t t = 0; t < raw.rows(); ++t) {
        v[t] = raw.returns()(static_cast<Eigen::Index>(t),
                             static_cast<Eigen::Index>(raw.column_of(col)));
      }
      return v;
    };
    vix.emplace(NavSeries(raw.index(), levels("spot")), NavSeries(raw.index(), levels("front")),
                NavSeries(raw.index(), levels("mid")),
                ReturnSeries(raw.index(), levels("st_ret")),
                ReturnSeries(raw.index(), levels("mt_ret")));
  }

  std::vector<NamedSeries> benchmarks;
  for (const auto& b : cfg.data.benchmarks) {
    benchmarks.push_back({b.name, load_returns_csv(b.path, cfg.data.csv)});
  }

  if (!cfg.bounds.empty()) cfg.backtest.bounds = cfg.bounds.resolve(panel.cols());
  return BacktestInputs{std::move(nav), std::move(panel), std::move(benchmarks), std::move(vix)};
}

synth::ScenarioSpec parse_scenario_spec(const json& doc) {
  check_keys(doc,
             {"seed", "days", "num_assets", "asset_vols", "asset_corr", "weight_mode",
              "weight_values", "weight_step_vol", "weight_bounds", "obs_noise_var", "stress",
              "start_date", "with_vix"},
             "");
  synth::ScenarioSpec spec;
  read_into(doc, "seed", spec.seed);
  read_into(doc, "days", spec.days);
  read_into(doc, "num_assets", spec.num_assets);
  if (spec.num_assets < 1) throw ConfigError("num_assets must be >= 1");

  spec.asset_vols.assign(static_cast<size_t>(spec.num_assets), 0.16);
  read_into(doc, "asset_vols", spec.asset_vols);

  spec.asset_corr = Eigen::MatrixXd::Identity(spec.num_assets, spec.num_assets);
  if (doc.contains("asset_corr")) {
    auto rows = doc.at("asset_corr").get<std::vector<std::vector<double>>>();
    if (rows.size() != static_cast<size_t>(spec.num_assets)) {
      throw ConfigError("asset_corr must be num_assets x num_assets");
    }
    for (int i = 0; i < spec.num_assets; ++i) {
      if (rows[static_cast<size_t>(i)].size() != static_cast<size_t>(spec.num_assets)) {
        throw ConfigError("asset_corr must be num_assets x num_assets");
      }
      for (int j = 0; j < spec.num_assets; ++j) {
        spec.asset_corr(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
      }
    }
  }

  if (doc.contains("weight_mode")) {
    std::string mode = doc.at("weight_mode").get<std::string>();
    if (mode == "constant") {
      spec.weight_mode = synth::WeightMode::constant;
    } else if (mode == "random_walk") {
      spec.weight_mode = synth::WeightMode::random_walk;
    } else {
      throw ConfigError("weight_mode must be constant or random_walk");
    }
  }
  spec.weight_values.assign(static_cast<size_t>(spec.num_assets),
                            1.0 / (2.0 * spec.num_assets));
  read_into(doc, "weight_values", spec.weight_values);
  read_into(doc, "weight_step_vol", spec.weight_step_vol);

  spec.weight_bounds = WeightBounds::uniform(static_cast<size_t>(spec.num_assets), 0.0, 1.0);
  if (doc.contains("weight_bounds")) {
    BoundsSpec bs;
    parse_bounds(doc.at("weight_bounds"), bs);
    spec.weight_bounds = bs.resolve(static_cast<size_t>(spec.num_assets));
  }
  read_into(doc, "obs_noise_var", spec.obs_noise_var);
  if (doc.contains("start_date")) {
    spec.start_date = Date::parse(doc.at("start_date").get<std::string>());
  }
  if (doc.contains("stress")) {
    const json& st = doc.at("stress");
    check_keys(st, {"start_day", "end_day", "equity_crash_drift", "stress_asset", "vix"},
               "stress.");
    synth::StressWindow w;
    read_into(st, "start_day", w.start_day);
    read_into(st, "end_day", w.end_day);
    read_into(st, "equity_crash_drift", w.equity_crash_drift);
    read_into(st, "stress_asset", w.stress_asset);
    if (st.contains("vix")) {
      const json& vx = st.at("vix");
      check_keys(vx, {"base_spot", "peak_spot", "calm_contango", "stress_discount", "noise_vol"},
                 "stress.vix.");
      read_into(vx, "base_spot", w.vix.base_spot);
      read_into(vx, "peak_spot", w.vix.peak_spot);
      read_into(vx, "calm_contango", w.vix.calm_contango);
      read_into(vx, "stress_discount", w.vix.stress_discount);
      read_into(vx, "noise_vol", w.vix.noise_vol);
    }
    spec.stress = w;
  }
  try {
    spec.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

synth::ScenarioSpec load_scenario_spec(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f.is_open()) throw ConfigError("cannot open scenario spec: " + path.string());
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("scenario spec is not valid JSON: " + std::string(e.what()));
  }
  return parse_scenario_spec(doc);
}

json scenario_spec_to_json(const synth::ScenarioSpec& spec) {
  json doc;
  doc["seed"] = spec.seed;
  doc["days"] = spec.days;
  doc["num_assets"] = spec.num_assets;
  doc["asset_vols"] = spec.asset_vols;
  std::vector<std::vector<double>> corr(static_cast<size_t>(spec.num_assets));
  for (int i = 0; i < spec.num_assets; ++i) {
    corr[static_cast<size_t>(i)].resize(static_cast<size_t>(spec.num_assets));
    for (int j = 0; j < spec.num_assets; ++j) {
      corr[static_cast<size_t>(i)][static_cast<size_t>(j)] = spec.asset_corr(i, j);
    }
  }
  doc["asset_corr"] = corr;
  doc["weight_mode"] = spec.weight_mode == synth::WeightMode::constant ? "constant" : "random_walk";
  doc["weight_values"] = spec.weight_values;
  doc["weight_step_vol"] = spec.weight_step_vol;
  doc["weight_bounds"] = {{"min", spec.weight_bounds.min}, {"max", spec.weight_bounds.max}};
  doc["obs_noise_var"] = spec.obs_noise_var;
  doc["start_date"] = spec.start_date.to_string();
  if (spec.stress) {
    doc["stress"] = {{"start_day", spec.stress->start_day},
                     {"end_day", spec.stress->end_day},
                     {"equity_crash_drift", spec.stress->equity_crash_drift},
                     {"stress_asset", spec.stress->stress_asset},
                     {"vix",
                      {{"base_spot", spec.stress->vix.base_spot},
                       {"peak_spot", spec.stress->vix.peak_spot},
                       {"calm_contango", spec.stress->vix.calm_contango},
                       {"stress_discount", spec.stress->vix.stress_discount},
                       {"noise_vol", spec.stress->vix.noise_vol}}}};
  }
  return doc;
}

bool scenario_wants_vix(const json& doc) {
  return doc.value("with_vix", false) || doc.contains("stress");
}

}  // namespace peplica
