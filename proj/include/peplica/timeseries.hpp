#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace peplica {

/// Calendar date at day granularity (no timezone). Backed by the count of
/// days since 1970-01-01 so arithmetic and comparisons are integer ops.
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);

  static Date from_serial(int days_since_epoch);
  /// Parses strict ISO-8601 "YYYY-MM-DD". Throws std::invalid_argument.
  static Date parse(std::string_view iso);

  int serial() const { return days_; }
  int year() const;
  unsigned month() const;
  unsigned day() const;
  /// 1..4, from the calendar month.
  int quarter() const { return (static_cast<int>(month()) - 1) / 3 + 1; }

  Date plus_days(int n) const { return from_serial(days_ + n); }
  bool is_weekend() const;

  std::string to_string() const;

  auto operator<=>(const Date&) const = default;

 private:
  int days_ = 0;
};

/// Strictly increasing, non-empty list of dates shared by every series type.
class DateIndex {
 public:
  explicit DateIndex(std::vector<Date> dates);

  size_t size() const { return dates_.size(); }
  const Date& operator[](size_t i) const { return dates_[i]; }
  const std::vector<Date>& dates() const { return dates_; }
  const Date& front() const { return dates_.front(); }
  const Date& back() const { return dates_.back(); }

  /// Index of the first date >= d, or size() if none.
  size_t lower_bound(const Date& d) const;
  bool contains(const Date& d) const;

  DateIndex slice(size_t first, size_t count) const;

  bool operator==(const DateIndex&) const = default;

 private:
  std::vector<Date> dates_;
};

/// Per-period simple returns (0.01 == 1%). Values must be finite and > -1.
class ReturnSeries {
 public:
  ReturnSeries(DateIndex index, std::vector<double> values);

  const DateIndex& index() const { return index_; }
  const std::vector<double>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  double operator[](size_t i) const { return values_[i]; }

  ReturnSeries slice(size_t first, size_t count) const;

 private:
  DateIndex index_;
  std::vector<double> values_;
};

/// Strictly positive level track (index points or currency units).
class NavSeries {
 public:
  NavSeries(DateIndex index, std::vector<double> values);

  const DateIndex& index() const { return index_; }
  const std::vector<double>& values() const { return values_; }
  size_t size() const { return values_.size(); }
  double operator[](size_t i) const { return values_[i]; }

  NavSeries slice(size_t first, size_t count) const;

 private:
  DateIndex index_;
  std::vector<double> values_;
};

/// Aligned multi-asset return matrix: one row per date, one column per asset.
/// No missing cells; construction rejects non-finite entries.
class AssetPanel {
 public:
  AssetPanel(DateIndex index, std::vector<std::string> asset_names,
             Eigen::MatrixXd returns);

  const DateIndex& index() const { return index_; }
  const std::vector<std::string>& asset_names() const { return asset_names_; }
  const Eigen::MatrixXd& returns() const { return returns_; }
  size_t rows() const { return static_cast<size_t>(returns_.rows()); }
  size_t cols() const { return static_cast<size_t>(returns_.cols()); }
  Eigen::VectorXd row(size_t t) const { return returns_.row(static_cast<Eigen::Index>(t)); }

  /// Column position of an asset name; throws if absent.
  size_t column_of(const std::string& name) const;
  AssetPanel select(const std::vector<std::string>& names) const;
  AssetPanel slice(size_t first, size_t count) const;

 private:
  DateIndex index_;
  std::vector<std::string> asset_names_;
  Eigen::MatrixXd returns_;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

/// Restrict both inputs to their common dates (original order). Throws if the
/// intersection is empty.
std::pair<AssetPanel, NavSeries> align_inner(const AssetPanel& a, const NavSeries& b);
std::pair<ReturnSeries, ReturnSeries> align_inner(const ReturnSeries& a, const ReturnSeries& b);

/// values[t] = nav[t] / nav[t-1] - 1; the output index drops the first date.
ReturnSeries nav_to_returns(const NavSeries& nav);

/// Cumulative compounding from `base`. The base point is stamped one calendar
/// day before the first return date so lengths stay self-describing.
NavSeries returns_to_nav(const ReturnSeries& r, double base);

/// One compounded return per calendar quarter, stamped on the quarter's last
/// available date.
ReturnSeries resample_quarterly(const ReturnSeries& r);

}  // namespace peplica
