#include "peplica/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace peplica {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double parse_number(const std::string& cell, int line_no, const std::string& column) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    throw std::invalid_argument("unparseable number '" + cell + "' at row " +
                                std::to_string(line_no) + ", column \"" + column + "\"");
  }
  return v;
}

struct RawTable {
  std::vector<std::string> columns;  // asset columns, header order
  std::vector<Date> dates;           // sorted ascending
  std::vector<std::vector<double>> rows;
};

RawTable load_table(const std::filesystem::path& path, const CsvOptions& opts) {
  std::ifstream f(path);
  if (!f.is_open()) throw std::invalid_argument("cannot open file: " + path.string());

  std::string line;
  if (!std::getline(f, line)) throw std::invalid_argument("empty file: " + path.string());
  std::vector<std::string> header = split_line(line);
  if (header.empty()) throw std::invalid_argument("empty header in " + path.string());

  auto date_it = std::find(header.begin(), header.end(), opts.date_column);
  if (date_it == header.end()) {
    throw std::invalid_argument("date column \"" + opts.date_column + "\" not found in " +
                                path.string());
  }
  size_t date_pos = static_cast<size_t>(date_it - header.begin());

  RawTable table;
  for (size_t i = 0; i < header.size(); ++i) {
    if (i != date_pos) table.columns.push_back(header[i]);
  }
  if (table.columns.empty()) {
    throw std::invalid_argument("no value columns in " + path.string());
  }

  struct Row {
    Date date;
    std::vector<double> values;
    int line_no;
  };
  std::vector<Row> rows;
  std::vector<int> fill_streak(table.columns.size(), 0);

  int line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_line(line);
    if (cells.size() != header.size()) {
      throw std::invalid_argument("row " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
    }
    Row row;
    row.line_no = line_no;
    try {
      row.date = Date::parse(cells[date_pos]);
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string(e.what()) + " at row " + std::to_string(line_no));
    }
    size_t j = 0;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i == date_pos) continue;
      if (cells[i].empty()) {
        switch (opts.missing) {
          case MissingPolicy::reject:
            throw std::invalid_argument("missing value at row " + std::to_string(line_no) +
                                        ", column \"" + table.columns[j] + "\"");
          case MissingPolicy::forward_fill:
            if (rows.empty()) {
              throw std::invalid_argument("missing value with no prior row at row " +
                                          std::to_string(line_no) + ", column \"" +
                                          table.columns[j] + "\"");
            }
            if (++fill_streak[j] > opts.max_forward_fills) {
              throw std::invalid_argument("more than " + std::to_string(opts.max_forward_fills) +
                                          " consecutive missing values in column \"" +
                                          table.columns[j] + "\" ending at row " +
                                          std::to_string(line_no));
            }
            row.values.push_back(rows.back().values[j]);
            break;
        }
      } else {
        fill_streak[j] = 0;
        row.values.push_back(parse_number(cells[i], line_no, table.columns[j]));
      }
      ++j;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::invalid_argument("no data rows in " + path.string());

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.date < b.date; });
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].date == rows[i - 1].date) {
      throw std::invalid_argument("duplicate date " + rows[i].date.to_string() + " at row " +
                                  std::to_string(rows[i].line_no));
    }
  }

  for (auto& row : rows) {
    table.dates.push_back(row.date);
    table.rows.push_back(std::move(row.values));
  }
  return table;
}

void require_single_column(const RawTable& table, const std::filesystem::path& path) {
  if (table.columns.size() != 1) {
    throw std::invalid_argument("expected exactly one value column in " + path.string() +
                                ", found " + std::to_string(table.columns.size()));
  }
}

void format_value(std::string& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

}  // namespace

AssetPanel load_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  RawTable table = load_table(path, opts);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(table.rows.size()),
                    static_cast<Eigen::Index>(table.columns.size()));
  for (size_t t = 0; t < table.rows.size(); ++t) {
    for (size_t k = 0; k < table.columns.size(); ++k) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)) = table.rows[t][k];
    }
  }
  return AssetPanel(DateIndex(std::move(table.dates)), std::move(table.columns), std::move(m));
}

NavSeries load_nav_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  RawTable table = load_table(path, opts);
  require_single_column(table, path);
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) values.push_back(row[0]);
  return NavSeries(DateIndex(std::move(table.dates)), std::move(values));
}

ReturnSeries load_returns_csv(const std::filesystem::path& path, const CsvOptions& opts) {
  RawTable table = load_table(path, opts);
  require_single_column(table, path);
  std::vector<double> values;
  values.reserve(table.rows.size());
  for (const auto& row : table.rows) values.push_back(row[0]);
  return ReturnSeries(DateIndex(std::move(table.dates)), std::move(values));
}

void write_csv(const AssetPanel& panel, const std::filesystem::path& path,
               const std::string& date_column) {
  std::ofstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot write file: " + path.string());
  std::string out = date_column;
  for (const auto& n : panel.asset_names()) {
    out += ',';
    out += n;
  }
  out += '\n';
  for (size_t t = 0; t < panel.rows(); ++t) {
    out += panel.index()[t].to_string();
    for (size_t k = 0; k < panel.cols(); ++k) {
      out += ',';
      format_value(out, panel.returns()(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k)));
    }
    out += '\n';
  }
  f << out;
}

namespace {

template <typename Series>
void write_series(const Series& s, const std::filesystem::path& path,
                  const std::string& value_column) {
  std::ofstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot write file: " + path.string());
  std::string out = "date," + value_column + "\n";
  for (size_t t = 0; t < s.size(); ++t) {
    out += s.index()[t].to_string();
    out += ',';
    format_value(out, s[t]);
    out += '\n';
  }
  f << out;
}

}  // namespace

void write_csv(const NavSeries& nav, const std::filesystem::path& path,
               const std::string& value_column) {
  write_series(nav, path, value_column);
}

void write_csv(const ReturnSeries& r, const std::filesystem::path& path,
               const std::string& value_column) {
  write_series(r, path, value_column);
}

}  // namespace peplica
