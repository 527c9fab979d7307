// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/distributions.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "opaque/special_functions.hpp"

namespace opaque {

void validate_prior(const UnivariatePrior& p) {
  std::visit(
      [](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, BetaOnMinusOneOne>) {
          if (!(d.a > 0.0 && d.b > 0.0))
            throw std::invalid_argument("beta prior: shape parameters must be > 0");
        } else if constexpr (std::is_same_v<T, NormalPrior>) {
          if (!(d.variance > 0.0))
            throw std::invalid_argument("normal prior: variance must be > 0");
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          if (!(d.shape > 0.0 && d.rate > 0.0))
            throw std::invalid_argument("gamma prior: shape and rate must be > 0");
        } else if constexpr (std::is_same_v<T, LognormalPrior>) {
          if (!(d.sdlog > 0.0))
            throw std::invalid_argument("lognormal prior: sdlog must be > 0");
        }
      },
      p);
}

double sample_prior(const UnivariatePrior& p, Rng& rng) {
  return std::visit(
      [&rng](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          return rng.uniform(-1.0, 1.0);
        } else if constexpr (std::is_same_v<T, BetaOnMinusOneOne>) {
          return 2.0 * rng.beta(d.a, d.b) - 1.0;
        } else if constexpr (std::is_same_v<T, NormalPrior>) {
          return rng.normal(d.mean, std::sqrt(d.variance));
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          return rng.gamma(d.shape, d.rate);
        } else {
          return rng.lognormal(d.meanlog, d.sdlog);
        }
      },
      p);
}

double prior_density(const UnivariatePrior& p, double x) {
  return std::visit(
      [x](const auto& d) -> double {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          return (x > -1.0 && x < 1.0) ? 0.5 : 0.0;
        } else if constexpr (std::is_same_v<T, BetaOnMinusOneOne>) {
          if (x <= -1.0 || x >= 1.0) return 0.0;
          return beta_pdf(0.5 * (x + 1.0), d.a, d.b) * 0.5;  // Jacobian of 2u-1
        } else if constexpr (std::is_same_v<T, NormalPrior>) {
          return norm_pdf(x, d.mean, std::sqrt(d.variance));
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          return gamma_pdf(x, d.shape, d.rate);
        } else {
          return lognormal_pdf(x, d.meanlog, d.sdlog);
        }
      },
      p);
}

double prior_log_density(const UnivariatePrior& p, double x) {
  const double f = prior_density(p, x);
  return f > 0.0 ? std::log(f) : -std::numeric_limits<double>::infinity();
}

bool prior_support_is_positive(const UnivariatePrior& p) {
  return std::holds_alternative<GammaPrior>(p) ||
         std::holds_alternative<LognormalPrior>(p);
}

bool prior_support_in_open_unit(const UnivariatePrior& p) {
  return std::holds_alternative<UniformSymmetric>(p) ||
         std::holds_alternative<BetaOnMinusOneOne>(p);
}

UnivariatePrior prior_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw std::invalid_argument("prior: expected an object with a \"family\" key");
  const std::string family = j.at("family").get<std::string>();
  UnivariatePrior p;
  if (family == "uniform") {
    p = UniformSymmetric{};
  } else if (family == "beta") {
    p = BetaOnMinusOneOne{j.at("a").get<double>(), j.at("b").get<double>()};
  } else if (family == "normal") {
    p = NormalPrior{j.at("mean").get<double>(), j.at("variance").get<double>()};
  } else if (family == "gamma") {
    p = GammaPrior{j.at("shape").get<double>(), j.at("rate").get<double>()};
  } else if (family == "lognormal") {
    p = LognormalPrior{j.at("meanlog").get<double>(), j.at("sdlog").get<double>()};
  } else {
    throw std::invalid_argument("prior: unknown family \"" + family + "\"");
  }
  validate_prior(p);
  return p;
}

std::string prior_to_string(const UnivariatePrior& p) {
  std::ostringstream os;
  std::visit(
      [&os](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, UniformSymmetric>) {
          os << "Uniform(-1,1)";
        } else if constexpr (std::is_same_v<T, BetaOnMinusOneOne>) {
          os << "Beta(" << d.a << "," << d.b << ") on (-1,1)";
        } else if constexpr (std::is_same_v<T, NormalPrior>) {
          os << "Normal(" << d.mean << "," << d.variance << ")";
        } else if constexpr (std::is_same_v<T, GammaPrior>) {
          os << "Gamma(" << d.shape << "," << d.rate << ")";
        } else {
          os << "Lognormal(" << d.meanlog << "," << d.sdlog << ")";
        }
      },
      p);
  return os.str();
}

}  // namespace opaque
