#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "peplica/decoder.hpp"

namespace peplica {

/// Model parameters as a JSON document with keys transition_cov, obs_var,
/// init_mean, init_cov, bounds.
nlohmann::json model_to_json(const StateSpaceModel& model);
StateSpaceModel model_from_json(const nlohmann::json& doc);

void write_model(const StateSpaceModel& model, const std::filesystem::path& path);
StateSpaceModel read_model(const std::filesystem::path& path);

/// One row per observation date: weights, replicated return, innovation.
void write_decode_csv(const DecodeResult& result, const std::filesystem::path& path);

}  // namespace peplica
