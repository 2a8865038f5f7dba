#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "peplica/backtest.hpp"
#include "peplica/csv.hpp"
#include "peplica/synth.hpp"

namespace peplica {

/// Usage or configuration problem: the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BenchmarkRef {
  std::string name;
  std::filesystem::path path;
};

enum class ProxyKind { levels, returns };

struct DataConfig {
  std::filesystem::path proxy;
  ProxyKind proxy_kind = ProxyKind::levels;
  std::filesystem::path panel;
  std::optional<std::filesystem::path> vix;
  std::vector<BenchmarkRef> benchmarks;
  CsvOptions csv;
};

/// Bounds as written in the config: scalars broadcast to the panel width once
/// the panel is known; explicit arrays are used as-is.
struct BoundsSpec {
  std::optional<double> scalar_min;
  std::optional<double> scalar_max;
  std::vector<double> min;
  std::vector<double> max;

  bool empty() const { return !scalar_min && !scalar_max && min.empty() && max.empty(); }
  WeightBounds resolve(size_t num_assets) const;
};

struct RunConfig {
  DataConfig data;
  BacktestConfig backtest;
  BoundsSpec bounds;
  std::filesystem::path out_dir = "out";
  std::string log_level = "info";
};

/// Strict parse: unknown keys are ConfigErrors naming the key. Relative data
/// paths resolve against the config file's directory.
RunConfig load_run_config(const std::filesystem::path& path);
RunConfig parse_run_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// ConfigError if any referenced input file is absent.
void validate_paths(const RunConfig& cfg);

/// Reads every input CSV and resolves bounds against the panel width.
/// Mutates cfg.backtest.bounds from cfg.bounds.
BacktestInputs load_inputs(RunConfig& cfg);

synth::ScenarioSpec load_scenario_spec(const std::filesystem::path& path);
synth::ScenarioSpec parse_scenario_spec(const nlohmann::json& doc);
nlohmann::json scenario_spec_to_json(const synth::ScenarioSpec& spec);

/// Whether the scenario JSON asked for a VIX track ("with_vix": true).
bool scenario_wants_vix(const nlohmann::json& doc);

}  // namespace peplica
