// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_SAVAGE_DICKEY_HPP
#define OPAQUE_SAVAGE_DICKEY_HPP

#include <string>
#include <vector>

#include "opaque/distributions.hpp"
#include "opaque/prior_lab.hpp"
#include "opaque/sample_table.hpp"

namespace opaque {

enum class SavageDickeyMode { Naive, Corrected };

struct SavageDickeyInput {
  std::vector<std::string> focal;             // column names, e.g. "y2~~y4"
  std::vector<UnivariatePrior> declared;      // declared univariate priors, per focal
  const SampleTable* prior_samples = nullptr;      // constrained prior draws
  const SampleTable* posterior_samples = nullptr;  // required

  // Correction inputs (Corrected mode only; empty nuisance means none).
  std::vector<std::string> nuisance;
  const SampleTable* restricted_prior_samples = nullptr;
  double window = 0.05;
};

struct BayesFactorReport {
  double log_prior_density_at_null_naive = 0.0;
  double log_prior_density_at_null_constrained = 0.0;
  double log_posterior_density_at_null = 0.0;
  double log_correction = 0.0;
  double log_bf10_naive = 0.0;
  double log_bf10_corrected = 0.0;
};

/// Product of declared univariate densities at 0, ignoring any constraint.
double naive_prior_density_at_null(const std::vector<UnivariatePrior>& declared);
double naive_prior_density_at_null(const StructuredPriorAssignment& declared,
                                   const std::vector<std::pair<int, int>>& focal);

/// Joint KDE of the accepted constrained draws over the focal columns,
/// evaluated at the zero vector. Needs at least 10^4 accepted draws and at
/// most two focal entries (1-D or 2-D KDE).
double constrained_prior_density_at_null(const SampleTable& prior_samples,
                                         const std::vector<std::string>& focal);
double constrained_prior_density_at_null(const RejectionResult& prior_samples,
                                         const std::vector<std::pair<int, int>>& focal);

/// log of the Monte Carlo average, over posterior nuisance draws, of
/// density_restricted(nuisance) / density_full(nuisance | |focal| < window).
/// The conditional density uses the slice of full-prior draws with every
/// focal entry inside the window, triangularly reweighted by focal distance.
double correction_term(const SampleTable& full_prior, const SampleTable& restricted_prior,
                       const std::vector<std::string>& focal,
                       const std::vector<std::string>& nuisance,
                       const SampleTable& posterior_nuisance, double window = 0.05);
double correction_term(const RejectionResult& full_prior,
                       const RejectionResult& restricted_prior,
                       const SampleTable& posterior_nuisance, double window = 0.05);

/// log BF10 = log p(focal=0 | prior) - log p(focal=0 | posterior), with the
/// prior term naive or constrained per mode, plus the correction term in
/// Corrected mode. The report carries every component; the two modes always
/// share the identical posterior term.
BayesFactorReport savage_dickey(const SavageDickeyInput& input, SavageDickeyMode mode);

}  // namespace opaque

#endif  // OPAQUE_SAVAGE_DICKEY_HPP
