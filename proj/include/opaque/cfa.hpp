// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_CFA_HPP
#define OPAQUE_CFA_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "opaque/distributions.hpp"
#include "opaque/rng.hpp"
#include "opaque/sample_table.hpp"

namespace opaque {

enum class Identification { FirstLoadingFixedToOne, LatentVarianceFixedToOne };

/// Simple-structure confirmatory factor model: every item loads on exactly
/// one factor, every factor has at least two items.
struct CfaModel {
  int n_items = 0;
  int n_factors = 0;
  std::vector<int> item_factor;  // item -> factor
  Identification identification = Identification::LatentVarianceFixedToOne;
  bool sign_restrict_focal = false;   // truncate the focal loading at 0
  std::vector<int> focal_item;        // per factor; default first item of the factor
  std::vector<std::string> item_names;

  void validate() const;
  bool loading_fixed(int item) const;
  std::vector<int> items_of_factor(int f) const;
  const std::string& item_name(int item) const;

  static CfaModel simple(int n_factors, int items_per_factor,
                         Identification id = Identification::LatentVarianceFixedToOne);
  static CfaModel from_json(const nlohmann::json& doc);
};

struct CfaParams {
  Eigen::VectorXd intercepts;   // p
  Eigen::VectorXd loadings;     // p (fixed loadings hold 1)
  Eigen::MatrixXd factor_corr;  // m x m, unit diagonal
  Eigen::VectorXd residual_sd;  // p, positive
  Eigen::VectorXd latent_sd;    // m (all 1 under LatentVarianceFixedToOne)
};

struct CfaPriors {
  UnivariatePrior intercept = NormalPrior{0.0, 1000.0};
  UnivariatePrior loading = NormalPrior{0.0, 100.0};
  UnivariatePrior residual_sd = GammaPrior{1.0, 0.5};
  UnivariatePrior latent_sd = GammaPrior{1.0, 0.5};  // only when latent SDs are free
  double lkj_eta = 1.0;

  static CfaPriors from_json(const nlohmann::json& doc);
};

struct FitOptions {
  int chains = 3;
  int warmup = 500;
  int iters = 1000;
  std::uint64_t seed = 1;
  int workers = 1;
  bool quiet = false;  // suppress the single-chain warning (batch runs)
};

/// Tabular MCMC output; one row per retained draw with columns nu[i],
/// lambda[i], phi[j,k], theta[i] (and psi[f] when latent SDs are free),
/// plus chain and iter.
class PosteriorDraws {
 public:
  PosteriorDraws() = default;
  PosteriorDraws(SampleTable table, int chains, int warmup, int kept_per_chain);

  const SampleTable& table() const { return table_; }
  int chains() const { return chains_; }
  int warmup() const { return warmup_; }
  int kept_per_chain() const { return kept_; }
  std::size_t rows() const { return table_.rows(); }

  std::vector<double> column(const std::string& name) const { return table_.column(name); }
  CfaParams params_at(std::size_t row, const CfaModel& model) const;

  void write_csv(const std::string& path) const { table_.write_csv(path); }
  static PosteriorDraws from_table(SampleTable table, int chains, int warmup);

 private:
  SampleTable table_;
  int chains_ = 0, warmup_ = 0, kept_ = 0;
};

std::string nu_name(int item);          // "nu[i]", 1-based
std::string lambda_name(int item);      // "lambda[i]"
std::string theta_name(int item);       // "theta[i]"
std::string phi_name(int f, int g);     // "phi[j,k]", j<k 1-based
std::string psi_name(int f);            // "psi[f]"

/// Rows drawn from y = nu + Lambda eta + eps; latent covariance
/// diag(latent_sd) Phi diag(latent_sd), residual covariance diag(theta^2).
/// Row i is keyed by (seed, i), so any worker split reproduces it.
Eigen::MatrixXd generate_data(const CfaModel& model, const CfaParams& params, int n,
                              std::uint64_t seed);

/// Conjugate Gibbs sampler with Metropolis steps where conjugacy fails:
/// latent scores and intercept/loading conditionals are normal, residual
/// variances use an inverse-gamma proposal corrected by Metropolis-Hastings
/// so the declared SD-scale prior is targeted exactly, and the factor
/// correlations take a per-entry random-walk step against the LKJ density
/// (proposals rejected when non positive definite; step adapted to 20-50%
/// acceptance during warmup).
PosteriorDraws gibbs_fit(const CfaModel& model, const CfaPriors& priors,
                         const Eigen::MatrixXd& data, const FitOptions& options);

/// Marginal multivariate-normal log likelihood with latents integrated out.
/// Throws std::domain_error when the implied covariance is not PD.
double log_likelihood(const CfaModel& model, const CfaParams& params,
                      const Eigen::MatrixXd& data);

/// Per draw and per factor, when the focal loading is negative, negate the
/// factor's loadings and the corresponding rows/columns of Phi. Idempotent;
/// leaves the likelihood of every draw unchanged.
PosteriorDraws relabel(const PosteriorDraws& draws, const CfaModel& model);

/// Exact draw from the prior (LKJ factor correlations via the onion method).
CfaParams sample_params_from_priors(const CfaModel& model, const CfaPriors& priors,
                                    Rng& rng);

/// LKJ(eta) correlation matrix via the onion method.
Eigen::MatrixXd lkj_onion_sample(int dim, double eta, Rng& rng);

/// Parameter names in table order (nu, lambda, phi, theta[, psi]).
std::vector<std::string> parameter_names(const CfaModel& model);
/// The subset that is free (drops fixed loadings).
std::vector<std::string> free_parameter_names(const CfaModel& model);

}  // namespace opaque

#endif  // OPAQUE_CFA_HPP
