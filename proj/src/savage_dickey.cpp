// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/savage_dickey.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "opaque/kde.hpp"

namespace opaque {

namespace {

KdeModel fit_joint(const std::vector<std::vector<double>>& cols,
                   const std::vector<double>& weights) {
  if (cols.size() == 1) {
    return weights.empty() ? KdeModel::fit(cols[0])
                           : KdeModel::fit_weighted(cols[0], weights);
  }
  return weights.empty() ? KdeModel::fit(cols[0], cols[1])
                         : KdeModel::fit_weighted(cols[0], cols[1], weights);
}

double log_kde_at(const KdeModel& model, const std::vector<double>& point) {
  return model.dim() == 1 ? model.log_eval(point[0])
                          : model.log_eval(point[0], point[1]);
}

std::vector<std::vector<double>> gather_columns(const SampleTable& t,
                                                const std::vector<std::string>& names) {
  if (names.empty() || names.size() > 2)
    throw std::invalid_argument("savage-dickey: supports one or two focal/nuisance entries");
  std::vector<std::vector<double>> out;
  out.reserve(names.size());
  for (const auto& n : names) out.push_back(t.column(n));
  return out;
}

}  // namespace

double naive_prior_density_at_null(const std::vector<UnivariatePrior>& declared) {
  double d = 1.0;
  for (const auto& p : declared) d *= prior_density(p, 0.0);
  return d;
}

double naive_prior_density_at_null(const StructuredPriorAssignment& declared,
                                   const std::vector<std::pair<int, int>>& focal) {
  std::vector<UnivariatePrior> priors;
  priors.reserve(focal.size());
  for (const auto& e : focal) priors.push_back(declared.prior_for(e));
  return naive_prior_density_at_null(priors);
}

double constrained_prior_density_at_null(const SampleTable& prior_samples,
                                         const std::vector<std::string>& focal) {
  if (prior_samples.rows() < 10'000)
    throw std::invalid_argument(
        "savage-dickey: needs at least 10^4 accepted prior draws");
  const auto cols = gather_columns(prior_samples, focal);
  const KdeModel kde = fit_joint(cols, {});
  return cols.size() == 1 ? kde.eval(0.0) : kde.eval(0.0, 0.0);
}

double constrained_prior_density_at_null(const RejectionResult& prior_samples,
                                         const std::vector<std::pair<int, int>>& focal) {
  std::vector<std::string> names;
  names.reserve(focal.size());
  for (const auto& [i, j] : focal)
    names.push_back(prior_samples.pattern().entry_label(i, j));
  return constrained_prior_density_at_null(prior_samples.to_table(), names);
}

double correction_term(const SampleTable& full_prior, const SampleTable& restricted_prior,
                       const std::vector<std::string>& focal,
                       const std::vector<std::string>& nuisance,
                       const SampleTable& posterior_nuisance, double window) {
  if (nuisance.empty()) return 0.0;
  if (!(window > 0.0)) throw std::invalid_argument("correction_term: window must be > 0");

  const auto restricted_cols = gather_columns(restricted_prior, nuisance);
  const KdeModel restricted_kde = fit_joint(restricted_cols, {});

  // Conditional slice of the full prior: draws with every focal entry inside
  // the window, weighted linearly by distance from the null.
  std::vector<std::size_t> focal_idx;
  for (const auto& f : focal) focal_idx.push_back(full_prior.column_index(f));
  std::vector<std::size_t> nuis_idx;
  for (const auto& nu : nuisance) nuis_idx.push_back(full_prior.column_index(nu));

  std::vector<std::vector<double>> slice_cols(nuisance.size());
  std::vector<double> weights;
  for (std::size_t r = 0; r < full_prior.rows(); ++r) {
    double w = 1.0;
    for (std::size_t f : focal_idx) {
      const double v = std::fabs(full_prior.at(r, f));
      if (v >= window) {
        w = 0.0;
        break;
      }
      w *= 1.0 - v / window;
    }
    if (w <= 0.0) continue;
    weights.push_back(w);
    for (std::size_t k = 0; k < nuis_idx.size(); ++k)
      slice_cols[k].push_back(full_prior.at(r, nuis_idx[k]));
  }
  if (weights.size() < 30)
    throw std::runtime_error(
        "correction_term: empty (or too thin) conditional slice; widen the window or "
        "increase the number of prior draws");
  const KdeModel conditional_kde = fit_joint(slice_cols, weights);

  // log E_post[ p_restricted(z) / p_full(z | focal ~ 0) ] via log-sum-exp.
  const std::size_t n_post = posterior_nuisance.rows();
  if (n_post == 0) throw std::invalid_argument("correction_term: empty posterior draws");
  std::vector<std::size_t> post_idx;
  for (const auto& nu : nuisance) post_idx.push_back(posterior_nuisance.column_index(nu));
  std::vector<double> log_ratios(n_post);
  double max_lr = -std::numeric_limits<double>::infinity();
  std::vector<double> point(nuisance.size());
  for (std::size_t r = 0; r < n_post; ++r) {
    for (std::size_t k = 0; k < post_idx.size(); ++k)
      point[k] = posterior_nuisance.at(r, post_idx[k]);
    log_ratios[r] = log_kde_at(restricted_kde, point) - log_kde_at(conditional_kde, point);
    max_lr = std::max(max_lr, log_ratios[r]);
  }
  double sum = 0.0;
  for (double lr : log_ratios) sum += std::exp(lr - max_lr);
  return max_lr + std::log(sum) - std::log(static_cast<double>(n_post));
}

double correction_term(const RejectionResult& full_prior,
                       const RejectionResult& restricted_prior,
                       const SampleTable& posterior_nuisance, double window) {
  // Focal entries are the ones free in the full pattern but fixed in the
  // restricted pattern; nuisance entries are shared free entries present in
  // the posterior table.
  std::vector<std::string> focal;
  std::vector<std::string> nuisance;
  const auto& restricted = restricted_prior.pattern();
  for (const auto& [i, j] : full_prior.free_entries()) {
    const std::string label = full_prior.pattern().entry_label(i, j);
    if (!restricted.is_free(i, j))
      focal.push_back(label);
    else if (posterior_nuisance.has_column(label))
      nuisance.push_back(label);
  }
  if (focal.empty())
    throw std::invalid_argument(
        "correction_term: restricted pattern does not fix any full-pattern entry");
  return correction_term(full_prior.to_table(), restricted_prior.to_table(), focal,
                         nuisance, posterior_nuisance, window);
}

BayesFactorReport savage_dickey(const SavageDickeyInput& input, SavageDickeyMode mode) {
  if (input.posterior_samples == nullptr)
    throw std::invalid_argument("savage_dickey: posterior samples are required");
  if (input.focal.empty() || input.focal.size() > 2)
    throw std::invalid_argument("savage_dickey: one or two focal entries supported");
  if (input.declared.size() != input.focal.size())
    throw std::invalid_argument("savage_dickey: one declared prior per focal entry");

  BayesFactorReport report;
  report.log_prior_density_at_null_naive =
      std::log(naive_prior_density_at_null(input.declared));

  {
    const auto cols = gather_columns(*input.posterior_samples, input.focal);
    const KdeModel post_kde = fit_joint(cols, {});
    std::vector<double> zero(input.focal.size(), 0.0);
    report.log_posterior_density_at_null = log_kde_at(post_kde, zero);
  }

  report.log_bf10_naive =
      report.log_prior_density_at_null_naive - report.log_posterior_density_at_null;

  if (mode == SavageDickeyMode::Corrected) {
    if (input.prior_samples == nullptr)
      throw std::invalid_argument(
          "savage_dickey: corrected mode needs constrained prior samples");
    report.log_prior_density_at_null_constrained =
        std::log(constrained_prior_density_at_null(*input.prior_samples, input.focal));
    report.log_correction = 0.0;
    if (!input.nuisance.empty()) {
      if (input.restricted_prior_samples == nullptr)
        throw std::invalid_argument(
            "savage_dickey: correction needs restricted prior samples");
      report.log_correction =
          correction_term(*input.prior_samples, *input.restricted_prior_samples,
                          input.focal, input.nuisance, *input.posterior_samples,
                          input.window);
    }
    report.log_bf10_corrected = report.log_prior_density_at_null_constrained -
                                report.log_posterior_density_at_null +
                                report.log_correction;
  } else {
    report.log_prior_density_at_null_constrained =
        std::numeric_limits<double>::quiet_NaN();
    report.log_correction = 0.0;
    report.log_bf10_corrected = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace opaque
