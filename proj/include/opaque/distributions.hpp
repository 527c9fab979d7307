// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_DISTRIBUTIONS_HPP
#define OPAQUE_DISTRIBUTIONS_HPP

#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "opaque/rng.hpp"

namespace opaque {

// Univariate prior families. Normal is parameterized with a variance,
// matching the convention used for every normal prior in this project.
struct UniformSymmetric {};                                // Uniform(-1, 1)
struct BetaOnMinusOneOne { double a = 1.0, b = 1.0; };     // 2*Beta(a,b) - 1
struct NormalPrior { double mean = 0.0, variance = 1.0; };
struct GammaPrior { double shape = 1.0, rate = 1.0; };
struct LognormalPrior { double meanlog = 0.0, sdlog = 1.0; };

using UnivariatePrior = std::variant<UniformSymmetric, BetaOnMinusOneOne,
                                     NormalPrior, GammaPrior, LognormalPrior>;

/// Throws std::invalid_argument when a hyperparameter is out of range.
void validate_prior(const UnivariatePrior& p);

double sample_prior(const UnivariatePrior& p, Rng& rng);
double prior_density(const UnivariatePrior& p, double x);   // 0 outside support
double prior_log_density(const UnivariatePrior& p, double x);

bool prior_support_is_positive(const UnivariatePrior& p);   // support in (0, inf)
bool prior_support_in_open_unit(const UnivariatePrior& p);  // support in (-1, 1)

/// Parse `{"family":"uniform"|"beta"|"normal"|"gamma"|"lognormal", ...}`.
UnivariatePrior prior_from_json(const nlohmann::json& j);
std::string prior_to_string(const UnivariatePrior& p);

}  // namespace opaque

#endif  // OPAQUE_DISTRIBUTIONS_HPP
