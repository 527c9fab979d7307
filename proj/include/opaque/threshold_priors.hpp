// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_THRESHOLD_PRIORS_HPP
#define OPAQUE_THRESHOLD_PRIORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "opaque/rng.hpp"

namespace opaque {

enum class ThresholdTranslation { Reorder, LognormalIncrement };

/// Declared Normal(mean, sd^2) prior on every threshold, plus the translation
/// the estimator applies to enforce the order constraint.
struct ThresholdPriorSpec {
  int n_thresholds = 3;
  double mean = 0.0;
  double sd = 1.0;
  ThresholdTranslation translation = ThresholdTranslation::Reorder;

  void validate() const;
};

/// Density of the k-th order statistic (1-based) of n iid draws from the
/// base normal:
///   n!/((k-1)!(n-k)!) * f(x) * F(x)^(k-1) * (1-F(x))^(n-k),
/// with f and F carrying the full location/scale of the base distribution.
double order_stat_density(const ThresholdPriorSpec& spec, int k, double x);

/// n iid base draws sorted ascending; float-resolution ties are redrawn.
std::vector<double> sample_reordered(const ThresholdPriorSpec& spec, Rng& rng);

/// Thresholds built from a base draw plus lognormal increments:
/// g1 ~ Normal, log(g_{k+1} - g_k) ~ Normal, same hyperparameters.
std::vector<double> sample_lognormal_increments(const ThresholdPriorSpec& spec, Rng& rng);

/// Implied density of threshold k under the lognormal-increment translation.
/// k=1 is the base normal exactly; k=2 is a 1-D adaptive quadrature of the
/// normal x lognormal convolution; k=3 is Monte Carlo smoothed by a binned
/// KDE (the 2-D integral is avoided on purpose), so it carries a seed and a
/// draw count.
double lognormal_increment_density(const ThresholdPriorSpec& spec, int k, double x,
                                   std::uint64_t seed = 1,
                                   std::size_t mc_draws = 1'000'000);

struct ThresholdDensityCurve {
  std::string label;         // "declared", "g1", "g2", ...
  int which = 0;             // 0 for the declared base curve, else k
  std::vector<double> grid;
  std::vector<double> density;

  double trapezoid_mass() const;
};

/// Density curves for every threshold plus the declared base density
/// (grid of 1024 points spanning mean +/- 6 sd, extended right for the
/// lognormal-increment translation to cover its heavy tail).
std::vector<ThresholdDensityCurve> emit_curves(const ThresholdPriorSpec& spec,
                                               std::uint64_t seed = 1);

}  // namespace opaque

#endif  // OPAQUE_THRESHOLD_PRIORS_HPP
