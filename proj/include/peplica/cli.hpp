#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "peplica/config.hpp"

namespace peplica::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

/// Fit on the training window, filter through the sample, export the decoded
/// test-period weights, replication track and fitted model.
int cmd_decode(RunConfig cfg);

/// Full pipeline: decode, asymmetry, overlays, sanity, stats, correlations.
/// `af_grid` runs one isolated backtest per adjustment factor.
int cmd_backtest(RunConfig cfg, const std::vector<double>& af_grid = {});

/// Standalone stats table for a returns CSV.
int cmd_stats(const std::filesystem::path& returns_csv, int periods_per_year,
              const std::optional<std::filesystem::path>& out_file);

/// Write a synthetic scenario (panel, nav, true weights, truth.json, and a
/// VIX track when requested) into out_dir.
int cmd_synth(const std::filesystem::path& spec_path, const std::filesystem::path& out_dir,
              std::optional<std::uint64_t> seed_override);

/// Fit on the training window and export the model JSON only.
int cmd_fit(RunConfig cfg);

/// Argument-vector entry point (what main() calls; tests call it directly).
int run(const std::vector<std::string>& args);

}  // namespace peplica::cli
