#include "peplica/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace peplica::stats {

namespace {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(std::span<const double> v) {
  double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

}  // namespace

double annual_return(const ReturnSeries& r, int periods_per_year) {
  if (periods_per_year < 1) throw std::invalid_argument("periods_per_year must be >= 1");
  double growth = 1.0;
  for (double x : r.values()) growth *= 1.0 + x;
  double exponent = static_cast<double>(periods_per_year) / static_cast<double>(r.size());
  return std::pow(growth, exponent) - 1.0;
}

double annual_vol(const ReturnSeries& r, int periods_per_year) {
  if (r.size() < 2) throw std::invalid_argument("annual_vol needs at least 2 returns");
  return sample_std(r.values()) * std::sqrt(static_cast<double>(periods_per_year));
}

double sharpe_from_annual(double annual_ret, double annual_vol) {
  if (!(annual_vol > 0.0)) throw std::invalid_argument("undefined Sharpe: zero volatility");
  return annual_ret / annual_vol;
}

double sharpe(const ReturnSeries& r, int periods_per_year) {
  return sharpe_from_annual(annual_return(r, periods_per_year), annual_vol(r, periods_per_year));
}

double sortino(const ReturnSeries& r, int periods_per_year) {
  bool any_negative = false;
  double ss = 0.0;
  for (double x : r.values()) {
    if (x < 0.0) {
      any_negative = true;
      ss += x * x;
    }
  }
  if (!any_negative) throw std::invalid_argument("undefined Sortino: no negative returns");
  double downside = std::sqrt(ss / static_cast<double>(r.size())) *
                    std::sqrt(static_cast<double>(periods_per_year));
  return annual_return(r, periods_per_year) / downside;
}

namespace {

// Central moments m2, m3, m4 about the sample mean.
void central_moments(std::span<const double> v, double& m2, double& m3, double& m4) {
  double m = mean_of(v);
  m2 = m3 = m4 = 0.0;
  for (double x : v) {
    double d = x - m;
    double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  double n = static_cast<double>(v.size());
  m2 /= n;
  m3 /= n;
  m4 /= n;
}

}  // namespace

double skewness(const ReturnSeries& r) {
  if (r.size() < 4) throw std::invalid_argument("skewness needs at least 4 returns");
  double m2, m3, m4;
  central_moments(r.values(), m2, m3, m4);
  if (!(m2 > 0.0)) throw std::invalid_argument("skewness undefined: zero variance");
  double n = static_cast<double>(r.size());
  double g1 = m3 / std::pow(m2, 1.5);
  return g1 * std::sqrt(n * (n - 1.0)) / (n - 2.0);
}

double excess_kurtosis(const ReturnSeries& r) {
  if (r.size() < 4) throw std::invalid_argument("kurtosis needs at least 4 returns");
  double m2, m3, m4;
  central_moments(r.values(), m2, m3, m4);
  if (!(m2 > 0.0)) throw std::invalid_argument("kurtosis undefined: zero variance");
  double n = static_cast<double>(r.size());
  double g2 = m4 / (m2 * m2) - 3.0;
  return ((n + 1.0) * g2 + 6.0) * (n - 1.0) / ((n - 2.0) * (n - 3.0));
}

std::vector<double> underwater(const ReturnSeries& r) {
  std::vector<double> u(r.size());
  double nav = 1.0;
  double peak = 1.0;
  for (size_t t = 0; t < r.size(); ++t) {
    nav *= 1.0 + r[t];
    peak = std::max(peak, nav);
    u[t] = 1.0 - nav / peak;
  }
  return u;
}

double max_drawdown(const ReturnSeries& r) {
  std::vector<double> u = underwater(r);
  return *std::max_element(u.begin(), u.end());
}

namespace {

// Quantile with linear interpolation between order statistics (R type 7).
double quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  double h = (static_cast<double>(v.size()) - 1.0) * p;
  size_t lo = static_cast<size_t>(std::floor(h));
  size_t hi = static_cast<size_t>(std::ceil(h));
  return v[lo] + (h - std::floor(h)) * (v[hi] - v[lo]);
}

}  // namespace

double worst10_dd(const ReturnSeries& r) {
  if (r.size() < 10) throw std::invalid_argument("worst10_dd needs at least 10 returns");
  return quantile(underwater(r), 0.9);
}

double return_over_dd(double annual_ret, double drawdown) {
  if (!(drawdown > 0.0)) throw std::invalid_argument("undefined ratio: zero drawdown");
  return annual_ret / drawdown;
}

double correlation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("correlation inputs differ in length");
  if (a.size() < 2) throw std::invalid_argument("correlation needs at least 2 points");
  double ma = mean_of(a), mb = mean_of(b);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) {
    throw std::invalid_argument("correlation undefined: constant input");
  }
  return sab / std::sqrt(saa * sbb);
}

namespace {

template <typename F>
double metric(const char* name, F&& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw std::invalid_argument(std::string(name) + ": " + e.what());
  }
}

}  // namespace

StatsTable full_table(const ReturnSeries& r, int periods_per_year) {
  StatsTable t;
  t.periods_per_year = periods_per_year;
  t.annual_return = metric("annual_return", [&] { return annual_return(r, periods_per_year); });
  t.annual_vol = metric("annual_vol", [&] { return annual_vol(r, periods_per_year); });
  t.skew = metric("skew", [&] { return skewness(r); });
  t.kurtosis = metric("kurtosis", [&] { return excess_kurtosis(r); });
  t.sharpe = metric("sharpe", [&] { return sharpe_from_annual(t.annual_return, t.annual_vol); });
  t.sortino = metric("sortino", [&] { return sortino(r, periods_per_year); });
  t.max_dd = metric("max_dd", [&] { return max_drawdown(r); });
  t.worst10_dd = metric("worst10_dd", [&] { return worst10_dd(r); });
  t.ret_over_maxdd =
      metric("ret_over_maxdd", [&] { return return_over_dd(t.annual_return, t.max_dd); });
  t.ret_over_worst10dd =
      metric("ret_over_worst10dd", [&] { return return_over_dd(t.annual_return, t.worst10_dd); });
  return t;
}

namespace {

constexpr const char* kMetricOrder[] = {
    "annual_return", "annual_vol", "skew",       "kurtosis",       "sharpe",
    "sortino",       "max_dd",     "worst10_dd", "ret_over_maxdd", "ret_over_worst10dd",
    "periods_per_year"};

double* field_of(StatsTable& t, const std::string& name) {
  if (name == "annual_return") return &t.annual_return;
  if (name == "annual_vol") return &t.annual_vol;
  if (name == "skew") return &t.skew;
  if (name == "kurtosis") return &t.kurtosis;
  if (name == "sharpe") return &t.sharpe;
  if (name == "sortino") return &t.sortino;
  if (name == "max_dd") return &t.max_dd;
  if (name == "worst10_dd") return &t.worst10_dd;
  if (name == "ret_over_maxdd") return &t.ret_over_maxdd;
  if (name == "ret_over_worst10dd") return &t.ret_over_worst10dd;
  return nullptr;
}

}  // namespace

void write_csv(const StatsTable& t, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot write file: " + path.string());
  StatsTable copy = t;
  f << "metric,value\n";
  for (const char* name : kMetricOrder) {
    if (std::string(name) == "periods_per_year") {
      f << name << ',' << t.periods_per_year << '\n';
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6g", *field_of(copy, name));
      f << name << ',' << buf << '\n';
    }
  }
}

StatsTable read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot open file: " + path.string());
  std::string line;
  if (!std::getline(f, line) || line.find("metric") != 0) {
    throw std::invalid_argument("not a stats CSV: " + path.string());
  }
  StatsTable t;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("malformed stats row: " + line);
    std::string name = line.substr(0, comma);
    std::string value = line.substr(comma + 1);
    if (name == "periods_per_year") {
      t.periods_per_year = std::stoi(value);
    } else if (double* field = field_of(t, name)) {
      *field = std::stod(value);
    } else {
      throw std::invalid_argument("unknown stats metric: " + name);
    }
  }
  return t;
}

}  // namespace peplica::stats
