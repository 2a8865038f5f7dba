#include "peplica/model_io.hpp"

#include <cstdio>
#include <fstream>

namespace peplica {

namespace {

using json = nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty()) throw std::invalid_argument("expected a matrix");
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(rows[0].size());
  Eigen::MatrixXd m(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    if (static_cast<Eigen::Index>(rows[static_cast<size_t>(i)].size()) != nc) {
      throw std::invalid_argument("ragged matrix rows");
    }
    for (Eigen::Index j = 0; j < nc; ++j) {
      m(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)].get<double>();
    }
  }
  return m;
}

}  // namespace

json model_to_json(const StateSpaceModel& model) {
  json doc;
  doc["transition_cov"] = matrix_to_json(model.transition_cov);
  doc["obs_var"] = model.obs_var;
  doc["init_mean"] = std::vector<double>(model.init_mean.data(),
                                         model.init_mean.data() + model.init_mean.size());
  doc["init_cov"] = matrix_to_json(model.init_cov);
  doc["bounds"] = {{"min", model.bounds.min}, {"max", model.bounds.max}};
  return doc;
}

StateSpaceModel model_from_json(const json& doc) {
  StateSpaceModel m;
  m.transition_cov = matrix_from_json(doc.at("transition_cov"));
  m.obs_var = doc.at("obs_var").get<double>();
  std::vector<double> mean = doc.at("init_mean").get<std::vector<double>>();
  m.init_mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  m.init_cov = matrix_from_json(doc.at("init_cov"));
  m.bounds.min = doc.at("bounds").at("min").get<std::vector<double>>();
  m.bounds.max = doc.at("bounds").at("max").get<std::vector<double>>();
  m.validate();
  return m;
}

void write_model(const StateSpaceModel& model, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot write file: " + path.string());
  f << model_to_json(model).dump(2) << '\n';
}

StateSpaceModel read_model(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot open file: " + path.string());
  json doc = json::parse(f);
  return model_from_json(doc);
}

void write_decode_csv(const DecodeResult& result, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f.is_open()) throw std::runtime_error("cannot write file: " + path.string());
  std::string out = "date";
  for (const auto& n : result.asset_names) out += ",w_" + n;
  out += ",replicated_return,innovation\n";
  for (size_t t = 1; t < result.index.size(); ++t) {
    out += result.index[t].to_string();
    for (Eigen::Index k = 0; k < result.weights.cols(); ++k) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), ",%.17g", result.weights(static_cast<Eigen::Index>(t), k));
      out += buf;
    }
    char buf[72];
    std::snprintf(buf, sizeof(buf), ",%.17g,%.17g\n", result.replicated_returns[t - 1],
                  result.innovations[t - 1]);
    out += buf;
  }
  f << out;
}

}  // namespace peplica
