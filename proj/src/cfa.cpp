// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/cfa.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <thread>

#include <Eigen/Cholesky>
#include <nlohmann/json.hpp>

#include "opaque/special_functions.hpp"

namespace opaque {

void CfaModel::validate() const {
  if (n_items < 1 || n_factors < 1)
    throw std::invalid_argument("cfa model: needs items and factors");
  if (static_cast<int>(item_factor.size()) != n_items)
    throw std::invalid_argument("cfa model: item_factor size mismatch");
  std::vector<int> count(n_factors, 0);
  for (int f : item_factor) {
    if (f < 0 || f >= n_factors)
      throw std::invalid_argument("cfa model: item mapped to unknown factor");
    ++count[f];
  }
  for (int f = 0; f < n_factors; ++f)
    if (count[f] < 2)
      throw std::invalid_argument("cfa model: every factor needs at least 2 items");
  if (static_cast<int>(focal_item.size()) != n_factors)
    throw std::invalid_argument("cfa model: one focal item per factor required");
  for (int f = 0; f < n_factors; ++f)
    if (focal_item[f] < 0 || focal_item[f] >= n_items || item_factor[focal_item[f]] != f)
      throw std::invalid_argument("cfa model: focal item must load on its factor");
  if (!item_names.empty() && static_cast<int>(item_names.size()) != n_items)
    throw std::invalid_argument("cfa model: item_names size mismatch");
}

bool CfaModel::loading_fixed(int item) const {
  if (identification != Identification::FirstLoadingFixedToOne) return false;
  // first item of its factor carries the unit loading
  const int f = item_factor[item];
  for (int j = 0; j < item; ++j)
    if (item_factor[j] == f) return false;
  return true;
}

std::vector<int> CfaModel::items_of_factor(int f) const {
  std::vector<int> out;
  for (int j = 0; j < n_items; ++j)
    if (item_factor[j] == f) out.push_back(j);
  return out;
}

const std::string& CfaModel::item_name(int item) const {
  static const std::string empty;
  if (item_names.empty()) {
    (void)empty;
    throw std::logic_error("cfa model: no item names set");
  }
  return item_names[item];
}

CfaModel CfaModel::simple(int n_factors, int items_per_factor, Identification id) {
  CfaModel m;
  m.n_factors = n_factors;
  m.n_items = n_factors * items_per_factor;
  m.item_factor.resize(m.n_items);
  m.item_names.resize(m.n_items);
  for (int j = 0; j < m.n_items; ++j) {
    m.item_factor[j] = j / items_per_factor;
    m.item_names[j] = "y" + std::to_string(j + 1);
  }
  m.identification = id;
  for (int f = 0; f < n_factors; ++f) m.focal_item.push_back(f * items_per_factor);
  m.validate();
  return m;
}

CfaModel CfaModel::from_json(const nlohmann::json& doc) {
  CfaModel m;
  if (!doc.contains("factors"))
    throw std::invalid_argument("cfa model: missing \"factors\" key");
  for (const auto& fac : doc.at("factors")) {
    const int f = m.n_factors++;
    for (const auto& item : fac.at("items")) {
      m.item_names.push_back(item.get<std::string>());
      m.item_factor.push_back(f);
      ++m.n_items;
    }
  }
  const std::string id = doc.value("identification", "latent_variance_fixed");
  if (id == "latent_variance_fixed")
    m.identification = Identification::LatentVarianceFixedToOne;
  else if (id == "first_loading_fixed")
    m.identification = Identification::FirstLoadingFixedToOne;
  else
    throw std::invalid_argument("cfa model: unknown identification \"" + id + "\"");
  m.sign_restrict_focal = doc.value("sign_restrict_focal", false);
  auto item_index = [&m](const std::string& name) {
    for (int j = 0; j < m.n_items; ++j)
      if (m.item_names[j] == name) return j;
    throw std::invalid_argument("cfa model: unknown item \"" + name + "\"");
  };
  if (doc.contains("focal")) {
    for (const auto& name : doc.at("focal"))
      m.focal_item.push_back(item_index(name.get<std::string>()));
  } else {
    for (int f = 0; f < m.n_factors; ++f) m.focal_item.push_back(m.items_of_factor(f)[0]);
  }
  m.validate();
  return m;
}

CfaPriors CfaPriors::from_json(const nlohmann::json& doc) {
  CfaPriors p;
  if (doc.contains("intercept")) p.intercept = prior_from_json(doc.at("intercept"));
  if (doc.contains("loading")) p.loading = prior_from_json(doc.at("loading"));
  if (doc.contains("residual_sd")) p.residual_sd = prior_from_json(doc.at("residual_sd"));
  if (doc.contains("latent_sd")) p.latent_sd = prior_from_json(doc.at("latent_sd"));
  if (doc.contains("lkj_eta")) p.lkj_eta = doc.at("lkj_eta").get<double>();
  if (!(p.lkj_eta > 0.0)) throw std::invalid_argument("cfa priors: lkj_eta must be > 0");
  return p;
}

std::string nu_name(int item) { return "nu[" + std::to_string(item + 1) + "]"; }
std::string lambda_name(int item) { return "lambda[" + std::to_string(item + 1) + "]"; }
std::string theta_name(int item) { return "theta[" + std::to_string(item + 1) + "]"; }
std::string phi_name(int f, int g) {
  if (f > g) std::swap(f, g);
  return "phi[" + std::to_string(f + 1) + "," + std::to_string(g + 1) + "]";
}
std::string psi_name(int f) { return "psi[" + std::to_string(f + 1) + "]"; }

std::vector<std::string> parameter_names(const CfaModel& model) {
  std::vector<std::string> names;
  for (int j = 0; j < model.n_items; ++j) names.push_back(nu_name(j));
  for (int j = 0; j < model.n_items; ++j) names.push_back(lambda_name(j));
  for (int f = 0; f < model.n_factors; ++f)
    for (int g = f + 1; g < model.n_factors; ++g) names.push_back(phi_name(f, g));
  for (int j = 0; j < model.n_items; ++j) names.push_back(theta_name(j));
  if (model.identification == Identification::FirstLoadingFixedToOne)
    for (int f = 0; f < model.n_factors; ++f) names.push_back(psi_name(f));
  return names;
}

std::vector<std::string> free_parameter_names(const CfaModel& model) {
  std::vector<std::string> names;
  for (const auto& n : parameter_names(model)) {
    bool keep = true;
    for (int j = 0; j < model.n_items; ++j)
      if (model.loading_fixed(j) && n == lambda_name(j)) keep = false;
    if (keep) names.push_back(n);
  }
  return names;
}

PosteriorDraws::PosteriorDraws(SampleTable table, int chains, int warmup,
                               int kept_per_chain)
    : table_(std::move(table)), chains_(chains), warmup_(warmup), kept_(kept_per_chain) {}

PosteriorDraws PosteriorDraws::from_table(SampleTable table, int chains, int warmup) {
  const int kept = chains > 0 ? static_cast<int>(table.rows()) / chains : 0;
  return PosteriorDraws(std::move(table), chains, warmup, kept);
}

CfaParams PosteriorDraws::params_at(std::size_t row, const CfaModel& model) const {
  CfaParams p;
  p.intercepts.resize(model.n_items);
  p.loadings.resize(model.n_items);
  p.residual_sd.resize(model.n_items);
  p.factor_corr = Eigen::MatrixXd::Identity(model.n_factors, model.n_factors);
  p.latent_sd = Eigen::VectorXd::Ones(model.n_factors);
  for (int j = 0; j < model.n_items; ++j) {
    p.intercepts[j] = table_.at(row, table_.column_index(nu_name(j)));
    p.loadings[j] = table_.at(row, table_.column_index(lambda_name(j)));
    p.residual_sd[j] = table_.at(row, table_.column_index(theta_name(j)));
  }
  for (int f = 0; f < model.n_factors; ++f)
    for (int g = f + 1; g < model.n_factors; ++g) {
      const double v = table_.at(row, table_.column_index(phi_name(f, g)));
      p.factor_corr(f, g) = p.factor_corr(g, f) = v;
    }
  if (model.identification == Identification::FirstLoadingFixedToOne)
    for (int f = 0; f < model.n_factors; ++f)
      p.latent_sd[f] = table_.at(row, table_.column_index(psi_name(f)));
  return p;
}

Eigen::MatrixXd generate_data(const CfaModel& model, const CfaParams& params, int n,
                              std::uint64_t seed) {
  model.validate();
  const int p = model.n_items;
  const int m = model.n_factors;
  Eigen::LLT<Eigen::MatrixXd> phi_llt(params.factor_corr);
  if (phi_llt.info() != Eigen::Success)
    throw std::domain_error("generate_data: factor correlation matrix not PD");
  const Eigen::MatrixXd phi_lower = phi_llt.matrixL();
  Eigen::MatrixXd data(n, p);
  Eigen::VectorXd z(m), eta(m);
  for (int i = 0; i < n; ++i) {
    Rng rng(seed, {static_cast<std::uint64_t>(i)});
    for (int f = 0; f < m; ++f) z[f] = rng.normal();
    eta = params.latent_sd.asDiagonal() * (phi_lower * z);
    for (int j = 0; j < p; ++j)
      data(i, j) = params.intercepts[j] + params.loadings[j] * eta[model.item_factor[j]] +
                   params.residual_sd[j] * rng.normal();
  }
  return data;
}

double log_likelihood(const CfaModel& model, const CfaParams& params,
                      const Eigen::MatrixXd& data) {
  const int p = model.n_items;
  const auto n = static_cast<double>(data.rows());
  Eigen::MatrixXd lambda = Eigen::MatrixXd::Zero(p, model.n_factors);
  for (int j = 0; j < p; ++j) lambda(j, model.item_factor[j]) = params.loadings[j];
  const Eigen::MatrixXd latent_cov = params.latent_sd.asDiagonal() * params.factor_corr *
                                     params.latent_sd.asDiagonal();
  Eigen::MatrixXd sigma = lambda * latent_cov * lambda.transpose();
  for (int j = 0; j < p; ++j) sigma(j, j) += params.residual_sd[j] * params.residual_sd[j];

  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success)
    throw std::domain_error("log_likelihood: implied covariance not PD");
  double logdet = 0.0;
  for (int j = 0; j < p; ++j) logdet += 2.0 * std::log(llt.matrixL()(j, j));

  const Eigen::MatrixXd centered = data.rowwise() - params.intercepts.transpose();
  const Eigen::MatrixXd solved = llt.solve(centered.transpose());
  const double quad = (centered.transpose().cwiseProduct(solved)).sum();
  return -0.5 * (n * p * std::log(2.0 * M_PI) + n * logdet + quad);
}

namespace {

struct NormalHyper {
  double mean, var;
};

NormalHyper require_normal(const UnivariatePrior& prior, const char* what) {
  if (const auto* n = std::get_if<NormalPrior>(&prior)) return {n->mean, n->variance};
  throw std::invalid_argument(std::string("gibbs_fit: ") + what +
                              " prior must be a normal distribution");
}

struct AdaptiveStep {
  double step = 0.1;
  int attempts = 0;
  int accepts = 0;

  void adapt() {
    if (attempts < 10) return;
    const double rate = static_cast<double>(accepts) / attempts;
    if (rate < 0.20)
      step = std::max(0.01, step * 0.8);
    else if (rate > 0.50)
      step = std::min(1.5, step * 1.25);
    attempts = accepts = 0;
  }
};

struct ChainResult {
  std::vector<double> rows;  // row-major, one row per retained draw
};

// Log target for the latent-score covariance given scores: multivariate
// normal likelihood plus the LKJ density on the correlation part.
double latent_cov_logpdf(const Eigen::MatrixXd& phi, const Eigen::VectorXd& psi,
                         const Eigen::MatrixXd& score_crossprod, double n_rows,
                         double lkj_eta, bool* ok) {
  const Eigen::MatrixXd latent_cov = psi.asDiagonal() * phi * psi.asDiagonal();
  Eigen::LLT<Eigen::MatrixXd> llt(latent_cov);
  if (llt.info() != Eigen::Success) {
    *ok = false;
    return 0.0;
  }
  *ok = true;
  double logdet_cov = 0.0;
  for (int f = 0; f < phi.rows(); ++f) logdet_cov += 2.0 * std::log(llt.matrixL()(f, f));
  double logdet_phi = logdet_cov;
  for (int f = 0; f < phi.rows(); ++f) logdet_phi -= 2.0 * std::log(psi[f]);
  const double quad = llt.solve(score_crossprod).trace();
  return -0.5 * n_rows * logdet_cov - 0.5 * quad + (lkj_eta - 1.0) * logdet_phi;
}

void run_chain(const CfaModel& model, const CfaPriors& priors,
               const Eigen::MatrixXd& data, const FitOptions& options, int chain,
               ChainResult& out) {
  const int n = static_cast<int>(data.rows());
  const int p = model.n_items;
  const int m = model.n_factors;
  const bool free_latent_sd =
      model.identification == Identification::FirstLoadingFixedToOne;
  const NormalHyper nu_prior = require_normal(priors.intercept, "intercept");
  const NormalHyper lam_prior = require_normal(priors.loading, "loading");

  Rng rng(options.seed, {0x636861696eULL, static_cast<std::uint64_t>(chain)});

  // State
  Eigen::VectorXd nu = data.colwise().mean();
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(p);
  Eigen::VectorXd theta_sd(p);
  for (int j = 0; j < p; ++j) {
    const double sd =
        std::sqrt((data.col(j).array() - nu[j]).square().sum() / std::max(1, n - 1));
    theta_sd[j] = std::max(0.5 * sd, 0.1);
  }
  Eigen::MatrixXd phi = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd psi = Eigen::VectorXd::Ones(m);
  Eigen::MatrixXd eta = Eigen::MatrixXd::Zero(n, m);

  std::vector<AdaptiveStep> phi_steps(m * m);
  std::vector<AdaptiveStep> psi_steps(m);

  const int n_pairs = m * (m - 1) / 2;
  const int row_width = 3 * p + n_pairs + (free_latent_sd ? m : 0) + 2;
  out.rows.reserve(static_cast<std::size_t>(options.iters) * row_width);

  Eigen::MatrixXd z(n, m);
  for (int iter = 0; iter < options.warmup + options.iters; ++iter) {
    const bool warming = iter < options.warmup;

    // --- latent scores ---
    {
      const Eigen::MatrixXd latent_cov = psi.asDiagonal() * phi * psi.asDiagonal();
      Eigen::MatrixXd precision = latent_cov.llt().solve(Eigen::MatrixXd::Identity(m, m));
      for (int j = 0; j < p; ++j) {
        const int f = model.item_factor[j];
        precision(f, f) += lam[j] * lam[j] / (theta_sd[j] * theta_sd[j]);
      }
      Eigen::LLT<Eigen::MatrixXd> prec_llt(precision);
      // rhs_i = Lambda^T Theta^-1 (y_i - nu)
      Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(p, m);
      for (int j = 0; j < p; ++j)
        weights(j, model.item_factor[j]) = lam[j] / (theta_sd[j] * theta_sd[j]);
      const Eigen::MatrixXd rhs = (data.rowwise() - nu.transpose()) * weights;  // n x m
      const Eigen::MatrixXd means = prec_llt.solve(rhs.transpose()).transpose();
      for (int i = 0; i < n; ++i)
        for (int f = 0; f < m; ++f) z(i, f) = rng.normal();
      const Eigen::MatrixXd lower_inv =
          prec_llt.matrixL().solve(Eigen::MatrixXd::Identity(m, m));
      eta = means + z * lower_inv;
    }
    const Eigen::MatrixXd score_crossprod = eta.transpose() * eta;

    // --- intercepts, loadings, residual SDs per item ---
    for (int j = 0; j < p; ++j) {
      const int f = model.item_factor[j];
      const auto x = eta.col(f);
      const auto y = data.col(j);
      const double theta2 = theta_sd[j] * theta_sd[j];

      {
        const double resid_sum = y.sum() - lam[j] * x.sum();
        const double prec = n / theta2 + 1.0 / nu_prior.var;
        const double mean = (resid_sum / theta2 + nu_prior.mean / nu_prior.var) / prec;
        nu[j] = mean + rng.normal() / std::sqrt(prec);
      }
      if (!model.loading_fixed(j)) {
        const double xx = x.squaredNorm();
        const double xy = x.dot(y) - nu[j] * x.sum();
        const double prec = xx / theta2 + 1.0 / lam_prior.var;
        const double mean = (xy / theta2 + lam_prior.mean / lam_prior.var) / prec;
        const bool truncate = model.sign_restrict_focal &&
                              model.identification ==
                                  Identification::LatentVarianceFixedToOne &&
                              model.focal_item[f] == j;
        if (truncate)
          lam[j] = truncated_normal_below(rng, mean, 1.0 / std::sqrt(prec), 0.0);
        else
          lam[j] = mean + rng.normal() / std::sqrt(prec);
      }
      {
        // Inverse-gamma proposal from the likelihood, Metropolis-corrected to
        // target the declared prior on the SD scale.
        const double ssr = (y.array() - nu[j] - lam[j] * x.array()).square().sum();
        const double g = rng.gamma(0.5 * n, 1.0);
        const double v_prop = 0.5 * ssr / g;
        const double s_prop = std::sqrt(v_prop);
        const double log_acc = prior_log_density(priors.residual_sd, s_prop) +
                               std::log(s_prop) -
                               prior_log_density(priors.residual_sd, theta_sd[j]) -
                               std::log(theta_sd[j]);
        if (std::log(rng.uniform01()) < log_acc) theta_sd[j] = s_prop;
      }
    }

    // --- factor correlations, one random-walk step per free pair ---
    if (m >= 2) {
      bool ok = false;
      double cur_logpdf =
          latent_cov_logpdf(phi, psi, score_crossprod, n, priors.lkj_eta, &ok);
      for (int a = 0; a < m; ++a) {
        for (int b = a + 1; b < m; ++b) {
          AdaptiveStep& st = phi_steps[a * m + b];
          ++st.attempts;
          const double old = phi(a, b);
          const double proposal = old + st.step * rng.normal();
          const double u = rng.uniform01();
          if (std::fabs(proposal) < 1.0) {
            phi(a, b) = phi(b, a) = proposal;
            bool prop_ok = false;
            const double prop_logpdf =
                latent_cov_logpdf(phi, psi, score_crossprod, n, priors.lkj_eta, &prop_ok);
            if (prop_ok && std::log(u) < prop_logpdf - cur_logpdf) {
              cur_logpdf = prop_logpdf;
              ++st.accepts;
            } else {
              phi(a, b) = phi(b, a) = old;
            }
          }
          if (warming && st.attempts >= 25) st.adapt();
        }
      }
    }

    // --- latent SDs (free only under first-loading identification) ---
    if (free_latent_sd) {
      bool ok = false;
      double cur_logpdf =
          latent_cov_logpdf(phi, psi, score_crossprod, n, priors.lkj_eta, &ok);
      for (int f = 0; f < m; ++f) {
        AdaptiveStep& st = psi_steps[f];
        ++st.attempts;
        const double old = psi[f];
        const double proposal = old * std::exp(st.step * rng.normal());
        const double u = rng.uniform01();
        psi[f] = proposal;
        bool prop_ok = false;
        const double prop_logpdf =
            latent_cov_logpdf(phi, psi, score_crossprod, n, priors.lkj_eta, &prop_ok);
        const double log_acc = prop_logpdf - cur_logpdf +
                               prior_log_density(priors.latent_sd, proposal) -
                               prior_log_density(priors.latent_sd, old) +
                               std::log(proposal) - std::log(old);
        if (prop_ok && std::log(u) < log_acc) {
          cur_logpdf = prop_logpdf;
          ++st.accepts;
        } else {
          psi[f] = old;
        }
        if (warming && st.attempts >= 25) st.adapt();
      }
    }

    if (!warming) {
      for (int j = 0; j < p; ++j) out.rows.push_back(nu[j]);
      for (int j = 0; j < p; ++j) out.rows.push_back(lam[j]);
      for (int a = 0; a < m; ++a)
        for (int b = a + 1; b < m; ++b) out.rows.push_back(phi(a, b));
      for (int j = 0; j < p; ++j) out.rows.push_back(theta_sd[j]);
      if (free_latent_sd)
        for (int f = 0; f < m; ++f) out.rows.push_back(psi[f]);
      out.rows.push_back(static_cast<double>(chain + 1));
      out.rows.push_back(static_cast<double>(iter - options.warmup + 1));
    }
  }
}

}  // namespace

PosteriorDraws gibbs_fit(const CfaModel& model, const CfaPriors& priors,
                         const Eigen::MatrixXd& data, const FitOptions& options) {
  model.validate();
  if (data.cols() != model.n_items)
    throw std::invalid_argument("gibbs_fit: data column count != items");
  if (data.rows() < 2) throw std::invalid_argument("gibbs_fit: needs at least 2 rows");
  if (!data.allFinite()) throw std::invalid_argument("gibbs_fit: non-finite data");
  if (options.chains < 1) throw std::invalid_argument("gibbs_fit: needs >= 1 chain");
  if (options.chains < 2 && !options.quiet)
    std::cerr << "warning: single-chain run; between-chain diagnostics unavailable\n";
  if (!prior_support_is_positive(priors.residual_sd))
    throw std::invalid_argument("gibbs_fit: residual SD prior must have positive support");

  std::vector<ChainResult> results(options.chains);
  if (options.workers > 1 && options.chains > 1) {
    std::vector<std::thread> threads;
    for (int c = 0; c < options.chains; ++c)
      threads.emplace_back(run_chain, std::cref(model), std::cref(priors),
                           std::cref(data), std::cref(options), c, std::ref(results[c]));
    for (auto& t : threads) t.join();
  } else {
    for (int c = 0; c < options.chains; ++c)
      run_chain(model, priors, data, options, c, results[c]);
  }

  std::vector<std::string> columns = parameter_names(model);
  columns.push_back("chain");
  columns.push_back("iter");
  SampleTable table(columns);
  for (const auto& res : results) {
    const std::size_t width = columns.size();
    for (std::size_t r = 0; r * width < res.rows.size(); ++r)
      table.add_row(std::span<const double>(res.rows.data() + r * width, width));
  }
  return PosteriorDraws(std::move(table), options.chains, options.warmup, options.iters);
}

PosteriorDraws relabel(const PosteriorDraws& draws, const CfaModel& model) {
  const SampleTable& in = draws.table();
  SampleTable out(in.columns());

  std::vector<std::size_t> lambda_idx(model.n_items);
  for (int j = 0; j < model.n_items; ++j)
    lambda_idx[j] = in.column_index(lambda_name(j));
  std::vector<std::size_t> focal_idx(model.n_factors);
  for (int f = 0; f < model.n_factors; ++f)
    focal_idx[f] = in.column_index(lambda_name(model.focal_item[f]));

  std::vector<double> row(in.cols());
  std::vector<double> sign(model.n_factors, 1.0);
  for (std::size_t r = 0; r < in.rows(); ++r) {
    for (std::size_t c = 0; c < in.cols(); ++c) row[c] = in.at(r, c);
    for (int f = 0; f < model.n_factors; ++f)
      sign[f] = row[focal_idx[f]] < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < model.n_items; ++j)
      row[lambda_idx[j]] *= sign[model.item_factor[j]];
    for (int a = 0; a < model.n_factors; ++a)
      for (int b = a + 1; b < model.n_factors; ++b)
        row[in.column_index(phi_name(a, b))] *= sign[a] * sign[b];
    out.add_row(row);
  }
  return PosteriorDraws(std::move(out), draws.chains(), draws.warmup(),
                        draws.kept_per_chain());
}

CfaParams sample_params_from_priors(const CfaModel& model, const CfaPriors& priors,
                                    Rng& rng) {
  model.validate();
  if (!prior_support_is_positive(priors.residual_sd))
    throw std::invalid_argument("cfa priors: residual SD prior must be positive");
  CfaParams p;
  p.intercepts.resize(model.n_items);
  p.loadings.resize(model.n_items);
  p.residual_sd.resize(model.n_items);
  for (int j = 0; j < model.n_items; ++j) {
    p.intercepts[j] = sample_prior(priors.intercept, rng);
    p.loadings[j] = model.loading_fixed(j) ? 1.0 : sample_prior(priors.loading, rng);
    p.residual_sd[j] = sample_prior(priors.residual_sd, rng);
  }
  p.factor_corr = lkj_onion_sample(model.n_factors, priors.lkj_eta, rng);
  p.latent_sd = Eigen::VectorXd::Ones(model.n_factors);
  if (model.identification == Identification::FirstLoadingFixedToOne)
    for (int f = 0; f < model.n_factors; ++f)
      p.latent_sd[f] = sample_prior(priors.latent_sd, rng);
  return p;
}

Eigen::MatrixXd lkj_onion_sample(int dim, double eta, Rng& rng) {
  if (dim < 1) throw std::invalid_argument("lkj: dim must be positive");
  Eigen::MatrixXd r = Eigen::MatrixXd::Identity(dim, dim);
  if (dim == 1) return r;
  double beta = eta + 0.5 * (dim - 2);
  {
    const double u = rng.beta(beta, beta);
    r(0, 1) = r(1, 0) = 2.0 * u - 1.0;
  }
  for (int k = 2; k < dim; ++k) {
    beta -= 0.5;
    const double y = rng.beta(0.5 * k, beta);
    Eigen::VectorXd u(k);
    double norm2 = 0.0;
    do {
      for (int i = 0; i < k; ++i) u[i] = rng.normal();
      norm2 = u.squaredNorm();
    } while (norm2 <= 0.0);
    u *= std::sqrt(y / norm2);
    const Eigen::MatrixXd top = r.topLeftCorner(k, k);
    const Eigen::MatrixXd lower = Eigen::LLT<Eigen::MatrixXd>(top).matrixL();
    const Eigen::VectorXd new_corr = lower * u;
    r.block(k, 0, 1, k) = new_corr.transpose();
    r.block(0, k, k, 1) = new_corr;
  }
  return r;
}

}  // namespace opaque
