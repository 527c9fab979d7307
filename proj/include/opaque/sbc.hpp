// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_SBC_HPP
#define OPAQUE_SBC_HPP

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "opaque/cfa.hpp"

namespace opaque {

struct SbcConfig {
  CfaModel model;
  CfaPriors priors;
  int n_sims = 100;
  int n_obs = 200;
  FitOptions fit{1, 300, 600, 0, 1};  // chains, warmup, iters, seed (derived), workers
  int thin = 10;
  std::uint64_t seed = 1;
  int workers = 1;
  bool relabel = true;

  static SbcConfig from_json(const nlohmann::json& doc);
};

enum class SignVerdict { Identity, VorX, Indeterminate };

const char* sign_verdict_name(SignVerdict v);

struct SignDiagnostics {
  double corr_signed = 0.0;  // corr(true, posterior mean)
  double corr_abs = 0.0;     // corr(|true|, |posterior mean|)
  SignVerdict verdict = SignVerdict::Indeterminate;
};

struct SbcRecord {
  int sim = 0;
  double true_value = 0.0;
  double post_mean = 0.0;
  double post_sd = 0.0;
  int rank = 0;
};

struct SbcReport {
  std::vector<std::string> params;               // free parameters, table order
  std::vector<std::vector<SbcRecord>> records;   // per parameter, sim order
  int n_rank_values = 0;                         // L + 1
  int excluded_sims = 0;
  std::vector<double> uniformity_pvalues;        // per parameter
  double pooled_uniformity_pvalue = 0.0;         // Bonferroni-combined
  std::vector<std::pair<std::string, SignDiagnostics>> loading_sign;
  SignDiagnostics pooled_sign;                   // all free loadings pooled

  std::string to_csv() const;  // param,sim,true_value,post_mean,post_sd,rank
  void write_csv(const std::string& path) const;
};

/// Draw parameters from the prior, simulate data, refit, and record the rank
/// of each true value among thinned posterior draws. Sims run as independent
/// work items keyed by (seed, sim index), so reports are byte-identical for
/// any worker count. Sims producing a non-finite draw are dropped and counted.
SbcReport sbc_run(const SbcConfig& config);

/// Count of draws strictly below the true value; uniform on {0..L} when the
/// sampler is calibrated.
int rank_statistic(double true_value, std::span<const double> thinned_draws);

/// V/X detector on (true value, posterior mean) pairs. Requires >= 30 pairs
/// and nondegenerate variances.
SignDiagnostics sign_pattern_detect(std::span<const std::pair<double, double>> pairs);

/// Chi-square uniformity test of ranks over {0..n_rank_values-1} using
/// equal-width bins (expected counts follow the per-bin value counts).
double chi_square_uniformity_pvalue(std::span<const int> ranks, int n_rank_values,
                                    int bins = 20);

}  // namespace opaque

#endif  // OPAQUE_SBC_HPP
