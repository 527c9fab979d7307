// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/sbc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "opaque/special_functions.hpp"

namespace opaque {

SbcConfig SbcConfig::from_json(const nlohmann::json& doc) {
  SbcConfig c;
  c.model = CfaModel::from_json(doc.at("model"));
  if (doc.contains("priors")) c.priors = CfaPriors::from_json(doc.at("priors"));
  c.n_sims = doc.value("n_sims", c.n_sims);
  c.n_obs = doc.value("n_obs", c.n_obs);
  c.fit.chains = doc.value("chains", c.fit.chains);
  c.fit.warmup = doc.value("warmup", c.fit.warmup);
  c.fit.iters = doc.value("iters", c.fit.iters);
  c.thin = doc.value("thin", c.thin);
  c.relabel = doc.value("relabel", c.relabel);
  c.seed = doc.value("seed", c.seed);
  if (c.n_sims < 1) throw std::invalid_argument("sbc: n_sims must be >= 1");
  const int thinned = c.fit.chains * c.fit.iters / std::max(1, c.thin);
  if (thinned < 20) throw std::invalid_argument("sbc: thinned posterior size must be >= 20");
  return c;
}

const char* sign_verdict_name(SignVerdict v) {
  switch (v) {
    case SignVerdict::Identity: return "identity";
    case SignVerdict::VorX: return "v-or-x";
    case SignVerdict::Indeterminate: return "indeterminate";
  }
  return "?";
}

int rank_statistic(double true_value, std::span<const double> thinned_draws) {
  int rank = 0;
  for (double d : thinned_draws)
    if (d < true_value) ++rank;
  return rank;
}

namespace {

double pearson(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double saa = 0.0, sbb = 0.0, sab = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
    sab += (a[i] - ma) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0))
    throw std::invalid_argument("sign_pattern_detect: degenerate variance");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

SignDiagnostics sign_pattern_detect(std::span<const std::pair<double, double>> pairs) {
  if (pairs.size() < 30)
    throw std::invalid_argument("sign_pattern_detect: needs at least 30 pairs");
  std::vector<double> t(pairs.size()), m(pairs.size()), ta(pairs.size()), ma(pairs.size());
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    t[i] = pairs[i].first;
    m[i] = pairs[i].second;
    ta[i] = std::fabs(t[i]);
    ma[i] = std::fabs(m[i]);
  }
  SignDiagnostics d;
  d.corr_signed = pearson(t, m);
  d.corr_abs = pearson(ta, ma);
  if (d.corr_abs - std::fabs(d.corr_signed) > 0.3 && d.corr_abs > 0.6)
    d.verdict = SignVerdict::VorX;
  else if (d.corr_signed > 0.8)
    d.verdict = SignVerdict::Identity;
  else
    d.verdict = SignVerdict::Indeterminate;
  return d;
}

double chi_square_uniformity_pvalue(std::span<const int> ranks, int n_rank_values,
                                    int bins) {
  if (n_rank_values < bins) bins = n_rank_values;
  std::vector<int> observed(bins, 0);
  std::vector<int> values_per_bin(bins, 0);
  for (int v = 0; v < n_rank_values; ++v)
    ++values_per_bin[static_cast<int>(static_cast<long long>(v) * bins / n_rank_values)];
  for (int r : ranks) {
    if (r < 0 || r >= n_rank_values)
      throw std::invalid_argument("uniformity: rank out of range");
    ++observed[static_cast<int>(static_cast<long long>(r) * bins / n_rank_values)];
  }
  const double n = static_cast<double>(ranks.size());
  double stat = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double expected = n * values_per_bin[b] / n_rank_values;
    const double diff = observed[b] - expected;
    stat += diff * diff / expected;
  }
  return chi_square_sf(stat, bins - 1);
}

namespace {

struct SimOutcome {
  bool excluded = false;
  std::vector<double> true_values;  // per free parameter
  std::vector<double> post_means;
  std::vector<double> post_sds;
  std::vector<int> ranks;
};

double true_value_of(const std::string& name, const CfaParams& params,
                     const CfaModel& model) {
  for (int j = 0; j < model.n_items; ++j) {
    if (name == nu_name(j)) return params.intercepts[j];
    if (name == lambda_name(j)) return params.loadings[j];
    if (name == theta_name(j)) return params.residual_sd[j];
  }
  for (int f = 0; f < model.n_factors; ++f) {
    if (name == psi_name(f)) return params.latent_sd[f];
    for (int g = f + 1; g < model.n_factors; ++g)
      if (name == phi_name(f, g)) return params.factor_corr(f, g);
  }
  throw std::logic_error("sbc: unknown parameter name " + name);
}

void run_sim(const SbcConfig& config, const std::vector<std::string>& params, int sim,
             SimOutcome& out) {
  Rng prior_rng(config.seed, {0x736263ULL, static_cast<std::uint64_t>(sim), 1});
  const CfaParams truth =
      sample_params_from_priors(config.model, config.priors, prior_rng);

  Rng key_rng(config.seed, {0x736263ULL, static_cast<std::uint64_t>(sim), 2});
  const std::uint64_t data_seed = key_rng.next();
  const std::uint64_t fit_seed = key_rng.next();

  const Eigen::MatrixXd data = generate_data(config.model, truth, config.n_obs, data_seed);

  FitOptions fit = config.fit;
  fit.seed = fit_seed;
  fit.workers = 1;
  fit.quiet = true;
  PosteriorDraws draws = gibbs_fit(config.model, config.priors, data, fit);
  if (config.relabel &&
      config.model.identification == Identification::LatentVarianceFixedToOne)
    draws = relabel(draws, config.model);

  out.true_values.reserve(params.size());
  for (const auto& name : params) {
    const std::vector<double> col = draws.column(name);
    for (double v : col)
      if (!std::isfinite(v)) {
        out.excluded = true;
        return;
      }
    std::vector<double> thinned;
    thinned.reserve(col.size() / config.thin + 1);
    for (std::size_t i = config.thin - 1; i < col.size(); i += config.thin)
      thinned.push_back(col[i]);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= col.size();
    double var = 0.0;
    for (double v : col) var += (v - mean) * (v - mean);
    var /= std::max<std::size_t>(1, col.size() - 1);
    const double tv = true_value_of(name, truth, config.model);
    out.true_values.push_back(tv);
    out.post_means.push_back(mean);
    out.post_sds.push_back(std::sqrt(var));
    out.ranks.push_back(rank_statistic(tv, thinned));
  }
}

}  // namespace

SbcReport sbc_run(const SbcConfig& config) {
  config.model.validate();
  if (config.n_sims < 1) throw std::invalid_argument("sbc: n_sims must be >= 1");
  if (config.thin < 1) throw std::invalid_argument("sbc: thin must be >= 1");

  const std::vector<std::string> params = free_parameter_names(config.model);
  const int total_draws = config.fit.chains * config.fit.iters;
  const int thinned = total_draws / config.thin;
  if (thinned < 1) throw std::invalid_argument("sbc: no draws left after thinning");

  std::vector<SimOutcome> outcomes(config.n_sims);
  const int workers = std::max(1, config.workers);
  if (workers == 1 || config.n_sims == 1) {
    for (int s = 0; s < config.n_sims; ++s) run_sim(config, params, s, outcomes[s]);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < workers; ++w)
      threads.emplace_back([&, w]() {
        for (int s = w; s < config.n_sims; s += workers)
          run_sim(config, params, s, outcomes[s]);
      });
    for (auto& t : threads) t.join();
  }

  SbcReport report;
  report.params = params;
  report.records.resize(params.size());
  report.n_rank_values = thinned + 1;
  for (int s = 0; s < config.n_sims; ++s) {
    if (outcomes[s].excluded) {
      ++report.excluded_sims;
      continue;
    }
    for (std::size_t k = 0; k < params.size(); ++k)
      report.records[k].push_back({s, outcomes[s].true_values[k],
                                   outcomes[s].post_means[k], outcomes[s].post_sds[k],
                                   outcomes[s].ranks[k]});
  }

  // Uniformity per parameter; the combined decision is Bonferroni over the
  // per-parameter tests. Records within a simulation are dependent across
  // parameters, so a chi-square over naively pooled ranks would be invalid
  // (its variance is inflated); Bonferroni stays conservative under any
  // dependence.
  double min_p = 1.0;
  for (std::size_t k = 0; k < params.size(); ++k) {
    std::vector<int> ranks;
    for (const auto& rec : report.records[k]) ranks.push_back(rec.rank);
    const double p =
        ranks.empty() ? 0.0 : chi_square_uniformity_pvalue(ranks, report.n_rank_values);
    report.uniformity_pvalues.push_back(p);
    min_p = std::min(min_p, p);
  }
  report.pooled_uniformity_pvalue =
      std::min(1.0, static_cast<double>(params.size()) * min_p);

  // Sign diagnostics over free loadings.
  std::vector<std::pair<double, double>> pooled_pairs;
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].rfind("lambda[", 0) != 0) continue;
    std::vector<std::pair<double, double>> pairs;
    for (const auto& rec : report.records[k])
      pairs.emplace_back(rec.true_value, rec.post_mean);
    pooled_pairs.insert(pooled_pairs.end(), pairs.begin(), pairs.end());
    SignDiagnostics d;
    if (pairs.size() >= 30) d = sign_pattern_detect(pairs);
    report.loading_sign.emplace_back(params[k], d);
  }
  if (pooled_pairs.size() >= 30) report.pooled_sign = sign_pattern_detect(pooled_pairs);
  return report;
}

std::string SbcReport::to_csv() const {
  std::string out = "param,sim,true_value,post_mean,post_sd,rank\n";
  for (std::size_t k = 0; k < params.size(); ++k) {
    // names like phi[1,2] carry a comma and need CSV quoting
    const bool quoted = params[k].find(',') != std::string::npos;
    const std::string name = quoted ? "\"" + params[k] + "\"" : params[k];
    for (const auto& rec : records[k]) {
      out += name;
      out += ',';
      out += std::to_string(rec.sim);
      out += ',';
      out += format_double(rec.true_value);
      out += ',';
      out += format_double(rec.post_mean);
      out += ',';
      out += format_double(rec.post_sd);
      out += ',';
      out += std::to_string(rec.rank);
      out += '\n';
    }
  }
  return out;
}

void SbcReport::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << to_csv();
}

}  // namespace opaque
