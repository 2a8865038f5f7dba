#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "peplica/timeseries.hpp"

namespace peplica {

enum class MissingPolicy {
  reject,        // any empty cell is an error (default)
  forward_fill,  // fill from the previous row, capped at 5 consecutive fills
};

struct CsvOptions {
  std::string date_column = "date";
  MissingPolicy missing = MissingPolicy::reject;
  int max_forward_fills = 5;
};

/// Loads a panel CSV: header row, ISO-8601 date column, numeric asset columns.
/// Rows come back sorted ascending by date; duplicate dates and unparseable
/// cells are errors naming the file line and column.
AssetPanel load_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

/// Loads a one-column levels CSV as a NAV series (extra columns rejected).
NavSeries load_nav_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

/// Loads a one-column returns CSV.
ReturnSeries load_returns_csv(const std::filesystem::path& path, const CsvOptions& opts = {});

void write_csv(const AssetPanel& panel, const std::filesystem::path& path,
               const std::string& date_column = "date");
void write_csv(const NavSeries& nav, const std::filesystem::path& path,
               const std::string& value_column = "nav");
void write_csv(const ReturnSeries& r, const std::filesystem::path& path,
               const std::string& value_column = "return");

}  // namespace peplica
