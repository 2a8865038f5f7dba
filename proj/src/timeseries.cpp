#include "peplica/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <unordered_set>

namespace peplica {

namespace {

using days = std::chrono::days;
using sys_days = std::chrono::sys_days;

std::chrono::year_month_day to_ymd(int serial) {
  return std::chrono::year_month_day{sys_days{days{serial}}};
}

}  // namespace

Date::Date(int year, unsigned month, unsigned day) {
  std::chrono::year_month_day ymd{std::chrono::year{year},
                                  std::chrono::month{month},
                                  std::chrono::day{day}};
  if (!ymd.ok()) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "invalid calendar date %04d-%02u-%02u", year, month, day);
    throw std::invalid_argument(buf);
  }
  days_ = static_cast<int>(sys_days{ymd}.time_since_epoch().count());
}

Date Date::from_serial(int days_since_epoch) {
  Date d;
  d.days_ = days_since_epoch;
  return d;
}

Date Date::parse(std::string_view iso) {
  int y = 0;
  unsigned m = 0, d = 0;
  char extra = 0;
  std::string s(iso);
  if (std::sscanf(s.c_str(), "%d-%u-%u%c", &y, &m, &d, &extra) != 3 ||
      s.size() != 10 || s[4] != '-' || s[7] != '-') {
    throw std::invalid_argument("unparseable date '" + s + "' (expected YYYY-MM-DD)");
  }
  return Date(y, m, d);
}

int Date::year() const { return static_cast<int>(to_ymd(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(days_).day()); }

bool Date::is_weekend() const {
  std::chrono::weekday wd{sys_days{days{days_}}};
  return wd == std::chrono::Saturday || wd == std::chrono::Sunday;
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

DateIndex::DateIndex(std::vector<Date> dates) : dates_(std::move(dates)) {
  if (dates_.empty()) throw std::invalid_argument("empty date index");
  for (size_t i = 1; i < dates_.size(); ++i) {
    if (!(dates_[i - 1] < dates_[i])) {
      if (dates_[i - 1] == dates_[i]) {
        throw std::invalid_argument("duplicate date " + dates_[i].to_string());
      }
      throw std::invalid_argument("dates not strictly increasing at " + dates_[i].to_string());
    }
  }
}

size_t DateIndex::lower_bound(const Date& d) const {
  return static_cast<size_t>(
      std::lower_bound(dates_.begin(), dates_.end(), d) - dates_.begin());
}

bool DateIndex::contains(const Date& d) const {
  size_t i = lower_bound(d);
  return i < dates_.size() && dates_[i] == d;
}

DateIndex DateIndex::slice(size_t first, size_t count) const {
  if (first + count > dates_.size()) throw std::out_of_range("date index slice out of range");
  return DateIndex(std::vector<Date>(dates_.begin() + static_cast<long>(first),
                                     dates_.begin() + static_cast<long>(first + count)));
}

namespace {

void check_length(size_t index_len, size_t value_len) {
  if (index_len != value_len) {
    throw std::invalid_argument("series length mismatch: " + std::to_string(index_len) +
                                " dates vs " + std::to_string(value_len) + " values");
  }
}

}  // namespace

ReturnSeries::ReturnSeries(DateIndex index, std::vector<double> values)
    : index_(std::move(index)), values_(std::move(values)) {
  check_length(index_.size(), values_.size());
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("non-finite return at " + index_[i].to_string());
    }
    if (values_[i] <= -1.0) {
      throw std::invalid_argument("return <= -100% at " + index_[i].to_string());
    }
  }
}

ReturnSeries ReturnSeries::slice(size_t first, size_t count) const {
  return ReturnSeries(index_.slice(first, count),
                      std::vector<double>(values_.begin() + static_cast<long>(first),
                                          values_.begin() + static_cast<long>(first + count)));
}

NavSeries::NavSeries(DateIndex index, std::vector<double> values)
    : index_(std::move(index)), values_(std::move(values)) {
  check_length(index_.size(), values_.size());
  for (size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
      throw std::invalid_argument("non-positive level at " + index_[i].to_string());
    }
  }
}

NavSeries NavSeries::slice(size_t first, size_t count) const {
  return NavSeries(index_.slice(first, count),
                   std::vector<double>(values_.begin() + static_cast<long>(first),
                                       values_.begin() + static_cast<long>(first + count)));
}

AssetPanel::AssetPanel(DateIndex index, std::vector<std::string> asset_names,
                       Eigen::MatrixXd returns)
    : index_(std::move(index)),
      asset_names_(std::move(asset_names)),
      returns_(std::move(returns)) {
  if (static_cast<size_t>(returns_.rows()) != index_.size()) {
    throw std::invalid_argument("panel row count does not match date index");
  }
  if (static_cast<size_t>(returns_.cols()) != asset_names_.size()) {
    throw std::invalid_argument("panel column count does not match asset names");
  }
  if (asset_names_.empty()) throw std::invalid_argument("panel has no assets");
  std::unordered_set<std::string> seen;
  for (const auto& n : asset_names_) {
    if (!seen.insert(n).second) throw std::invalid_argument("duplicate asset name '" + n + "'");
  }
  for (Eigen::Index t = 0; t < returns_.rows(); ++t) {
    for (Eigen::Index k = 0; k < returns_.cols(); ++k) {
      if (!std::isfinite(returns_(t, k))) {
        throw std::invalid_argument("non-finite return in column '" +
                                    asset_names_[static_cast<size_t>(k)] + "' at " +
                                    index_[static_cast<size_t>(t)].to_string());
      }
    }
  }
}

size_t AssetPanel::column_of(const std::string& name) const {
  auto it = std::find(asset_names_.begin(), asset_names_.end(), name);
  if (it == asset_names_.end()) throw std::invalid_argument("unknown asset '" + name + "'");
  return static_cast<size_t>(it - asset_names_.begin());
}

AssetPanel AssetPanel::select(const std::vector<std::string>& names) const {
  Eigen::MatrixXd sub(returns_.rows(), static_cast<Eigen::Index>(names.size()));
  for (size_t j = 0; j < names.size(); ++j) {
    sub.col(static_cast<Eigen::Index>(j)) = returns_.col(static_cast<Eigen::Index>(column_of(names[j])));
  }
  return AssetPanel(index_, names, std::move(sub));
}

AssetPanel AssetPanel::slice(size_t first, size_t count) const {
  return AssetPanel(index_.slice(first, count), asset_names_,
                    returns_.middleRows(static_cast<Eigen::Index>(first),
                                        static_cast<Eigen::Index>(count)));
}

std::pair<AssetPanel, NavSeries> align_inner(const AssetPanel& a, const NavSeries& b) {
  std::vector<Date> common;
  std::set_intersection(a.index().dates().begin(), a.index().dates().end(),
                        b.index().dates().begin(), b.index().dates().end(),
                        std::back_inserter(common));
  if (common.empty()) throw std::invalid_argument("no common dates between panel and series");

  Eigen::MatrixXd rows(static_cast<Eigen::Index>(common.size()), a.returns().cols());
  std::vector<double> values(common.size());
  for (size_t i = 0; i < common.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) =
        a.returns().row(static_cast<Eigen::Index>(a.index().lower_bound(common[i])));
    values[i] = b[b.index().lower_bound(common[i])];
  }
  DateIndex idx(common);
  return {AssetPanel(idx, a.asset_names(), std::move(rows)), NavSeries(idx, std::move(values))};
}

std::pair<ReturnSeries, ReturnSeries> align_inner(const ReturnSeries& a, const ReturnSeries& b) {
  std::vector<Date> common;
  std::set_intersection(a.index().dates().begin(), a.index().dates().end(),
                        b.index().dates().begin(), b.index().dates().end(),
                        std::back_inserter(common));
  if (common.empty()) throw std::invalid_argument("no common dates between return series");
  std::vector<double> va(common.size()), vb(common.size());
  for (size_t i = 0; i < common.size(); ++i) {
    va[i] = a[a.index().lower_bound(common[i])];
    vb[i] = b[b.index().lower_bound(common[i])];
  }
  DateIndex idx(common);
  return {ReturnSeries(idx, std::move(va)), ReturnSeries(idx, std::move(vb))};
}

ReturnSeries nav_to_returns(const NavSeries& nav) {
  if (nav.size() < 2) throw std::invalid_argument("need at least 2 levels to form returns");
  std::vector<double> values(nav.size() - 1);
  for (size_t t = 1; t < nav.size(); ++t) values[t - 1] = nav[t] / nav[t - 1] - 1.0;
  return ReturnSeries(nav.index().slice(1, nav.size() - 1), std::move(values));
}

NavSeries returns_to_nav(const ReturnSeries& r, double base) {
  if (!(base > 0.0)) throw std::invalid_argument("base level must be positive");
  std::vector<Date> dates;
  dates.reserve(r.size() + 1);
  dates.push_back(r.index().front().plus_days(-1));
  dates.insert(dates.end(), r.index().dates().begin(), r.index().dates().end());

  std::vector<double> levels;
  levels.reserve(r.size() + 1);
  levels.push_back(base);
  double nav = base;
  for (size_t t = 0; t < r.size(); ++t) {
    nav *= 1.0 + r[t];
    levels.push_back(nav);
  }
  return NavSeries(DateIndex(std::move(dates)), std::move(levels));
}

ReturnSeries resample_quarterly(const ReturnSeries& r) {
  std::vector<Date> dates;
  std::vector<double> values;
  size_t t = 0;
  while (t < r.size()) {
    int y = r.index()[t].year();
    int q = r.index()[t].quarter();
    double growth = 1.0;
    size_t last = t;
    while (t < r.size() && r.index()[t].year() == y && r.index()[t].quarter() == q) {
      growth *= 1.0 + r[t];
      last = t;
      ++t;
    }
    dates.push_back(r.index()[last]);
    values.push_back(growth - 1.0);
  }
  return ReturnSeries(DateIndex(std::move(dates)), std::move(values));
}

}  // namespace peplica
