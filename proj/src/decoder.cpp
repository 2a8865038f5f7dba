#include "peplica/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "peplica/nelder_mead.hpp"

namespace peplica {

WeightBounds WeightBounds::uniform(size_t num_assets, double lo, double hi) {
  WeightBounds b;
  b.min.assign(num_assets, lo);
  b.max.assign(num_assets, hi);
  b.validate(num_assets);
  return b;
}

void WeightBounds::validate(size_t num_assets) const {
  if (min.size() != num_assets || max.size() != num_assets) {
    throw std::invalid_argument("bounds arrays do not match asset count");
  }
  for (size_t k = 0; k < num_assets; ++k) {
    if (!(min[k] <= max[k])) {
      throw std::invalid_argument("bounds min > max for asset " + std::to_string(k));
    }
  }
}

StateSpaceModel StateSpaceModel::defaults(const WeightBounds& bounds, double q0, double s0) {
  const size_t k = bounds.size();
  bounds.validate(k);
  StateSpaceModel m;
  m.transition_cov = q0 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                                    static_cast<Eigen::Index>(k));
  m.obs_var = s0;
  m.init_mean.resize(static_cast<Eigen::Index>(k));
  for (size_t i = 0; i < k; ++i) {
    m.init_mean[static_cast<Eigen::Index>(i)] = 0.5 * (bounds.min[i] + bounds.max[i]);
  }
  m.init_cov = 0.25 * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(k),
                                                static_cast<Eigen::Index>(k));
  m.bounds = bounds;
  return m;
}

namespace {

constexpr double kPsdTol = 1e-10;

void require_symmetric_psd(const Eigen::MatrixXd& m, const char* name, bool strict) {
  if (m.rows() != m.cols()) throw std::invalid_argument(std::string(name) + " is not square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + m.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument(std::string(name) + " is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  double min_eig = es.eigenvalues().minCoeff();
  if (strict ? !(min_eig > 0.0) : min_eig < -kPsdTol) {
    throw std::invalid_argument(std::string(name) +
                                (strict ? " is not positive definite" : " is not PSD"));
  }
}

}  // namespace

void StateSpaceModel::validate() const {
  const size_t k = num_assets();
  if (k == 0) throw std::invalid_argument("model has no assets");
  bounds.validate(k);
  if (!(obs_var > 0.0)) throw std::invalid_argument("obs_var must be > 0");
  if (static_cast<size_t>(transition_cov.rows()) != k ||
      static_cast<size_t>(init_cov.rows()) != k) {
    throw std::invalid_argument("model matrix dimensions do not match asset count");
  }
  require_symmetric_psd(transition_cov, "transition_cov", /*strict=*/false);
  // PSD rather than PD so a zero P0 (full confidence in w0) stays usable.
  require_symmetric_psd(init_cov, "init_cov", /*strict=*/false);
  for (size_t i = 0; i < k; ++i) {
    double w = init_mean[static_cast<Eigen::Index>(i)];
    if (w < bounds.min[i] || w > bounds.max[i]) {
      throw std::invalid_argument("init_mean outside bounds for asset " + std::to_string(i));
    }
  }
}

GaussianBelief predict_step(const GaussianBelief& posterior, const Eigen::MatrixXd& Q) {
  return {posterior.mean, posterior.cov + Q};
}

GaussianBelief update_step(const GaussianBelief& prior, double y, const Eigen::VectorXd& r,
                           double obs_var) {
  Eigen::VectorXd pr = prior.cov * r;
  double s = r.dot(pr) + obs_var;
  if (!(s > 0.0)) throw std::runtime_error("degenerate observation: zero predictive variance");
  Eigen::VectorXd gain = pr / s;
  GaussianBelief post;
  post.mean = prior.mean + gain * (y - prior.mean.dot(r));
  post.cov = prior.cov - gain * pr.transpose();
  post.cov = 0.5 * (post.cov + post.cov.transpose()).eval();
  return post;
}

Eigen::VectorXd project_bounds(Eigen::VectorXd mean, const WeightBounds& bounds) {
  bounds.validate(static_cast<size_t>(mean.size()));
  for (Eigen::Index k = 0; k < mean.size(); ++k) {
    mean[k] = std::clamp(mean[k], bounds.min[static_cast<size_t>(k)],
                         bounds.max[static_cast<size_t>(k)]);
  }
  return mean;
}

DecodeResult::DecodeResult(DateIndex idx, std::vector<std::string> names, Eigen::MatrixXd w,
                           std::vector<Eigen::MatrixXd> cov, ReturnSeries repl,
                           NavSeries repl_nav, std::vector<double> innov, double ll)
    : index(std::move(idx)),
      asset_names(std::move(names)),
      weights(std::move(w)),
      weight_cov(std::move(cov)),
      replicated_returns(std::move(repl)),
      replicated_nav(std::move(repl_nav)),
      innovations(std::move(innov)),
      log_likelihood(ll) {
  if (replicated_returns.size() + 1 != index.size()) {
    throw std::invalid_argument("replicated returns must cover every observation");
  }
}

DecodeResult filter(const StateSpaceModel& model, const NavSeries& nav, const AssetPanel& panel) {
  model.validate();
  if (nav.index() != panel.index()) {
    throw std::invalid_argument("nav and panel are not aligned; call align_inner first");
  }
  const size_t T = nav.size();
  if (T < 2) throw std::invalid_argument("need at least 2 aligned observations");
  const auto K = static_cast<Eigen::Index>(panel.cols());
  if (model.init_mean.size() != K) {
    throw std::invalid_argument("model asset count does not match panel");
  }

  Eigen::MatrixXd weights(static_cast<Eigen::Index>(T), K);
  std::vector<Eigen::MatrixXd> covs(T);
  std::vector<double> repl(T - 1), innov(T - 1), repl_nav(T);

  GaussianBelief post{project_bounds(model.init_mean, model.bounds), model.init_cov};
  weights.row(0) = post.mean;
  covs[0] = post.cov;
  repl_nav[0] = nav[0];

  double ll = 0.0;
  constexpr double log_2pi = 1.8378770664093454836;  // log(2*pi)

  for (size_t t = 1; t < T; ++t) {
    const double y = nav[t] / nav[t - 1] - 1.0;
    const Eigen::VectorXd r = panel.row(t);

    GaussianBelief prior = predict_step(post, model.transition_cov);

    const double yhat = post.mean.dot(r);  // pre-update (projected) weights
    const double s = r.dot(prior.cov * r) + model.obs_var;
    ll += -0.5 * (log_2pi + std::log(s) + (y - yhat) * (y - yhat) / s);

    repl[t - 1] = yhat;
    innov[t - 1] = y - yhat;
    repl_nav[t] = repl_nav[t - 1] * (1.0 + yhat);

    if (r.isZero(0.0)) {
      post = std::move(prior);  // no information on a flat factor day
    } else {
      post = update_step(prior, y, r, model.obs_var);
    }
    post.mean = project_bounds(std::move(post.mean), model.bounds);

    weights.row(static_cast<Eigen::Index>(t)) = post.mean;
    covs[t] = post.cov;
  }

  ReturnSeries repl_series(nav.index().slice(1, T - 1), std::move(repl));
  NavSeries repl_nav_series(nav.index(), std::move(repl_nav));
  return DecodeResult(nav.index(), panel.asset_names(), std::move(weights), std::move(covs),
                      std::move(repl_series), std::move(repl_nav_series), std::move(innov), ll);
}

double log_likelihood(const StateSpaceModel& model, const NavSeries& nav,
                      const AssetPanel& panel) {
  return filter(model, nav, panel).log_likelihood;
}

namespace {

// Parameter layout: [log obs_var, log Q_11 .. log Q_KK, (full_q) atanh-corr
// for each pair (i<j) in row-major order].
StateSpaceModel model_from_params(const std::vector<double>& theta, const FitConfig& cfg,
                                  size_t K) {
  const double cap = 1e6;  // keeps exp() finite while the simplex explores
  StateSpaceModel m;
  m.obs_var = std::clamp(std::exp(theta[0]), cfg.obs_var_floor, cap);
  Eigen::VectorXd qdiag(static_cast<Eigen::Index>(K));
  for (size_t k = 0; k < K; ++k) {
    qdiag[static_cast<Eigen::Index>(k)] = std::clamp(std::exp(theta[1 + k]), 0.0, cap);
  }
  Eigen::MatrixXd Q = qdiag.asDiagonal();
  if (cfg.full_q) {
    size_t p = 1 + K;
    for (size_t i = 0; i < K; ++i) {
      for (size_t j = i + 1; j < K; ++j) {
        double rho = std::tanh(theta[p++]);
        double off = rho * std::sqrt(qdiag[static_cast<Eigen::Index>(i)] *
                                     qdiag[static_cast<Eigen::Index>(j)]);
        Q(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = off;
        Q(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = off;
      }
    }
    // PSD repair: floor eigenvalues at zero.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    Q = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    Q = 0.5 * (Q + Q.transpose()).eval();
  }
  m.transition_cov = std::move(Q);

  StateSpaceModel base = StateSpaceModel::defaults(cfg.bounds, 0.0, 1.0);
  m.init_mean = base.init_mean;
  m.init_cov = cfg.init_cov_diag * Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(K),
                                                             static_cast<Eigen::Index>(K));
  m.bounds = cfg.bounds;
  return m;
}

}  // namespace

StateSpaceModel fit_mle(const NavSeries& nav, const AssetPanel& panel, const FitConfig& cfg) {
  if (nav.index() != panel.index()) {
    throw std::invalid_argument("nav and panel are not aligned; call align_inner first");
  }
  const size_t K = panel.cols();
  cfg.bounds.validate(K);
  if (nav.size() < 10 * K) {
    throw std::invalid_argument("training window too short: " + std::to_string(nav.size()) +
                                " observations for " + std::to_string(K) +
                                " assets (need >= " + std::to_string(10 * K) + ")");
  }

  std::vector<double> theta0(1 + K, 0.0);
  theta0[0] = std::log(cfg.start_obs_var);
  for (size_t k = 0; k < K; ++k) theta0[1 + k] = std::log(cfg.start_q);
  if (cfg.full_q) theta0.resize(1 + K + K * (K - 1) / 2, 0.0);  // start at zero correlation

  auto objective = [&](const std::vector<double>& theta) {
    return -log_likelihood(model_from_params(theta, cfg, K), nav, panel);
  };

  NelderMeadOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.rel_tol = cfg.rel_tol;
  NelderMeadResult best = nelder_mead_minimize(objective, theta0, opts);

  // The start point is a simplex vertex, so the best vertex can only improve
  // on it; keep the guarantee explicit anyway.
  if (objective(theta0) < best.fx) best.x = theta0;

  StateSpaceModel fitted = model_from_params(best.x, cfg, K);
  fitted.validate();
  return fitted;
}

SanityReport sanity_check_weights(const DateIndex& index, const Eigen::MatrixXd& weights,
                                  const WeightBounds& historical_bounds,
                                  const SanityConfig& cfg) {
  const size_t T = index.size();
  const size_t K = static_cast<size_t>(weights.cols());
  if (static_cast<size_t>(weights.rows()) != T) {
    throw std::invalid_argument("weight rows do not match date index");
  }
  historical_bounds.validate(K);

  SanityReport report;
  report.at_bound_fraction.assign(K, 0.0);
  report.gross_leverage.resize(T);

  for (size_t t = 0; t < T; ++t) {
    double gross = 0.0;
    for (size_t k = 0; k < K; ++k) {
      double w = weights(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(k));
      gross += std::fabs(w);
      if (std::fabs(w - historical_bounds.min[k]) <= cfg.bound_tol ||
          std::fabs(w - historical_bounds.max[k]) <= cfg.bound_tol) {
        report.at_bound_fraction[k] += 1.0;
      }
    }
    report.gross_leverage[t] = gross;
    if (gross > cfg.leverage_cap) {
      report.flags.push_back({index[t], "leverage", gross});
    }
    if (t > 0) {
      double jump = (weights.row(static_cast<Eigen::Index>(t)) -
                     weights.row(static_cast<Eigen::Index>(t - 1)))
                        .cwiseAbs()
                        .maxCoeff();
      report.max_one_day_jump = std::max(report.max_one_day_jump, jump);
      if (jump > cfg.jump_cap) {
        report.flags.push_back({index[t], "jump", jump});
      }
    }
  }
  for (double& f : report.at_bound_fraction) f /= static_cast<double>(T);
  return report;
}

}  // namespace peplica
