// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/threshold_priors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "opaque/quadrature.hpp"
#include "opaque/special_functions.hpp"

namespace opaque {

void ThresholdPriorSpec::validate() const {
  if (n_thresholds < 1)
    throw std::invalid_argument("threshold spec: n_thresholds must be >= 1");
  if (!(sd > 0.0)) throw std::invalid_argument("threshold spec: sd must be > 0");
}

double order_stat_density(const ThresholdPriorSpec& spec, int k, double x) {
  spec.validate();
  const int n = spec.n_thresholds;
  if (k < 1 || k > n) throw std::invalid_argument("order_stat_density: k out of range");
  const double z = (x - spec.mean) / spec.sd;
  const double f = norm_pdf(x, spec.mean, spec.sd);
  const double cdf = norm_cdf(z);
  const double sf = norm_sf(z);
  const double log_coef =
      std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(k)) -
      std::lgamma(static_cast<double>(n - k + 1));
  double density = std::exp(log_coef) * f;
  if (k > 1) density *= std::pow(cdf, k - 1);
  if (n - k > 0) density *= std::pow(sf, n - k);
  return density;
}

std::vector<double> sample_reordered(const ThresholdPriorSpec& spec, Rng& rng) {
  spec.validate();
  std::vector<double> draws(spec.n_thresholds);
  for (;;) {
    for (auto& d : draws) d = rng.normal(spec.mean, spec.sd);
    std::sort(draws.begin(), draws.end());
    bool strict = true;
    for (std::size_t i = 1; i < draws.size(); ++i)
      if (!(draws[i - 1] < draws[i])) strict = false;
    if (strict) return draws;
  }
}

std::vector<double> sample_lognormal_increments(const ThresholdPriorSpec& spec,
                                                Rng& rng) {
  spec.validate();
  std::vector<double> g(spec.n_thresholds);
  for (;;) {
    g[0] = rng.normal(spec.mean, spec.sd);
    bool strict = true;
    for (int k = 1; k < spec.n_thresholds; ++k) {
      g[k] = g[k - 1] + rng.lognormal(spec.mean, spec.sd);
      if (!(g[k - 1] < g[k])) strict = false;
    }
    if (strict) return g;
  }
}

namespace {

// Convolution density of g2 = g1 + exp(e), g1 and e both Normal(mean, sd^2).
// Substituting the increment t = e^u turns logN(t) dt into the normal density
// in u, leaving a smooth Gaussian-product integrand.
double second_threshold_density(const ThresholdPriorSpec& spec, double x) {
  const double mu = spec.mean;
  const double sigma = spec.sd;
  // The integrand is nonzero only where BOTH normal factors live: u within
  // mu +/- 9 sd, and the increment e^u within (x - mu) +/- 9 sd. Using the
  // intersection keeps the bump visible to the quadrature at every x.
  const double max_increment = x - mu + 9.0 * sigma;
  if (max_increment <= 0.0) return 0.0;
  const double min_increment = x - mu - 9.0 * sigma;
  double lo = mu - 9.0 * sigma;
  if (min_increment > 0.0) lo = std::max(lo, std::log(min_increment));
  const double hi = std::min(mu + 9.0 * sigma, std::log(max_increment));
  if (!(hi > lo)) return 0.0;
  const auto integrand = [&](double u) {
    return norm_pdf(x - std::exp(u), mu, sigma) * norm_pdf(u, mu, sigma);
  };
  const auto result = integrate_adaptive(integrand, lo, hi, {1e-10, 48});
  if (!result.converged)
    throw std::runtime_error("lognormal_increment_density: quadrature tolerance not reached");
  return result.value;
}

// Binned Gaussian KDE over Monte Carlo draws; resolution is fine enough that
// the binning error is far below the smoothing bandwidth.
class BinnedKde {
 public:
  explicit BinnedKde(const std::vector<double>& draws) {
    lo_ = *std::min_element(draws.begin(), draws.end());
    hi_ = *std::max_element(draws.begin(), draws.end());
    const double pad = 1e-9 * (hi_ - lo_) + 1e-12;
    lo_ -= pad;
    hi_ += pad;
    n_ = static_cast<double>(draws.size());
    double mean = 0.0;
    for (double d : draws) mean += d;
    mean /= n_;
    double var = 0.0;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= (n_ - 1.0);
    // Robust scale: the heavy right tail would otherwise inflate the
    // bandwidth past the structure near the mode.
    std::vector<double> sorted = draws;
    std::sort(sorted.begin(), sorted.end());
    const double q1 = sorted[sorted.size() / 4];
    const double q3 = sorted[(3 * sorted.size()) / 4];
    const double scale = std::min(std::sqrt(var), (q3 - q1) / 1.34);
    bandwidth_ = 0.9 * scale * std::pow(n_, -0.2);
    // bins much finer than the bandwidth, or the binning dominates the error
    const auto bins = static_cast<std::size_t>(
        std::min(8.0e6, std::max(1024.0, (hi_ - lo_) / (0.25 * bandwidth_))));
    width_ = (hi_ - lo_) / static_cast<double>(bins);
    counts_.assign(bins, 0.0);
    for (double d : draws) {
      const auto b = static_cast<std::size_t>((d - lo_) / width_);
      counts_[std::min(b, counts_.size() - 1)] += 1.0;
    }
  }

  double eval(double x) const {
    const double cut = 8.0 * bandwidth_;
    const auto first =
        static_cast<long>(std::floor((x - cut - lo_) / width_));
    const auto last = static_cast<long>(std::ceil((x + cut - lo_) / width_));
    double sum = 0.0;
    for (long b = std::max(0L, first);
         b <= std::min(static_cast<long>(counts_.size()) - 1, last); ++b) {
      const double center = lo_ + (b + 0.5) * width_;
      const double z = (x - center) / bandwidth_;
      sum += counts_[b] * std::exp(-0.5 * z * z);
    }
    return sum / (n_ * bandwidth_ * 2.5066282746310005024);
  }

 private:
  double lo_ = 0.0, hi_ = 0.0, width_ = 0.0, bandwidth_ = 0.0, n_ = 0.0;
  std::vector<double> counts_;
};

std::vector<double> draw_kth_threshold(const ThresholdPriorSpec& spec, int k,
                                       std::uint64_t seed, std::size_t mc_draws) {
  std::vector<double> out(mc_draws);
  for (std::size_t i = 0; i < mc_draws; ++i) {
    Rng rng(seed, {0x746872ULL, static_cast<std::uint64_t>(k), i});
    double g = rng.normal(spec.mean, spec.sd);
    for (int step = 1; step < k; ++step) g += rng.lognormal(spec.mean, spec.sd);
    out[i] = g;
  }
  return out;
}

}  // namespace

double lognormal_increment_density(const ThresholdPriorSpec& spec, int k, double x,
                                   std::uint64_t seed, std::size_t mc_draws) {
  spec.validate();
  if (k < 1 || k > spec.n_thresholds)
    throw std::invalid_argument("lognormal_increment_density: k out of range");
  if (k == 1) return norm_pdf(x, spec.mean, spec.sd);
  if (k == 2) return second_threshold_density(spec, x);
  const BinnedKde kde(draw_kth_threshold(spec, k, seed, mc_draws));
  return kde.eval(x);
}

double ThresholdDensityCurve::trapezoid_mass() const {
  double mass = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    mass += 0.5 * (grid[i] - grid[i - 1]) * (density[i] + density[i - 1]);
  return mass;
}

namespace {

std::vector<double> uniform_grid(double lo, double hi, int points) {
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return g;
}

// Uniform core plus geometric right tail; the lognormal increments put real
// mass far beyond mean + 6 sd.
std::vector<double> tailed_grid(double lo, double core_hi, double tail_hi,
                                int core_points, int tail_points) {
  std::vector<double> g = uniform_grid(lo, core_hi, core_points);
  const double ratio = std::pow(tail_hi / core_hi, 1.0 / tail_points);
  double x = core_hi;
  for (int i = 0; i < tail_points; ++i) {
    x *= ratio;
    g.push_back(x);
  }
  return g;
}

}  // namespace

std::vector<ThresholdDensityCurve> emit_curves(const ThresholdPriorSpec& spec,
                                               std::uint64_t seed) {
  spec.validate();
  const double lo = spec.mean - 6.0 * spec.sd;
  const double hi = spec.mean + 6.0 * spec.sd;
  std::vector<ThresholdDensityCurve> curves;

  ThresholdDensityCurve declared;
  declared.label = "declared";
  declared.which = 0;
  declared.grid = uniform_grid(lo, hi, 1024);
  for (double x : declared.grid)
    declared.density.push_back(norm_pdf(x, spec.mean, spec.sd));
  curves.push_back(std::move(declared));

  for (int k = 1; k <= spec.n_thresholds; ++k) {
    ThresholdDensityCurve c;
    c.label = "g" + std::to_string(k);
    c.which = k;
    if (spec.translation == ThresholdTranslation::Reorder) {
      c.grid = uniform_grid(lo, hi, 1024);
      for (double x : c.grid) c.density.push_back(order_stat_density(spec, k, x));
    } else if (k == 1) {
      c.grid = uniform_grid(lo, hi, 1024);
      for (double x : c.grid) c.density.push_back(norm_pdf(x, spec.mean, spec.sd));
    } else {
      // Per-increment right edge at the 1-2.3e-4 lognormal quantile keeps the
      // truncated mass inside the 1e-3 normalization budget.
      const double increment_edge = std::exp(spec.mean + 3.5 * spec.sd);
      const double tail_hi = hi + (k - 1) * increment_edge;
      c.grid = tailed_grid(lo, hi, tail_hi, 768, 256);
      if (k == 2) {
        for (double x : c.grid) c.density.push_back(second_threshold_density(spec, x));
      } else {
        const BinnedKde kde(draw_kth_threshold(spec, k, seed, 1'000'000));
        for (double x : c.grid) c.density.push_back(kde.eval(x));
      }
    }
    curves.push_back(std::move(c));
  }
  return curves;
}

}  // namespace opaque
