#pragma once

#include <stdexcept>

#include "peplica/timeseries.hpp"

namespace peplica {

enum class ApplicationPoint {
  on_output,  // transform the decoded replication's returns (default)
  on_target,  // transform the proxy's returns before fitting/decoding
};

struct AsymmetryConfig {
  double af = 0.9;  // downside adjustment factor, in (0, 1]
  ApplicationPoint application_point = ApplicationPoint::on_output;

  void validate() const {
    if (!(af > 0.0 && af <= 1.0)) throw std::invalid_argument("asymmetry.af must be in (0, 1]");
  }
};

/// Downside compression: r stays put when >= 0, scales by af when negative.
inline ReturnSeries apply_asymmetry(const ReturnSeries& r, const AsymmetryConfig& cfg) {
  cfg.validate();
  std::vector<double> out(r.size());
  for (size_t t = 0; t < r.size(); ++t) {
    out[t] = r[t] >= 0.0 ? r[t] : cfg.af * r[t];
  }
  return ReturnSeries(r.index(), std::move(out));
}

}  // namespace peplica
