// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/kde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace opaque {

namespace {

constexpr double kLogSqrt2Pi = 0.9189385332046727417803297;

struct Moments {
  double mean = 0.0;
  double sd = 0.0;
};

Moments weighted_moments(std::span<const double> xs, std::span<const double> w) {
  double wsum = 0.0, mean = 0.0;
  if (w.empty()) {
    for (double x : xs) mean += x;
    wsum = static_cast<double>(xs.size());
    mean /= wsum;
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      wsum += w[i];
      mean += w[i] * xs[i];
    }
    mean /= wsum;
  }
  double ss = 0.0;
  if (w.empty()) {
    for (double x : xs) ss += (x - mean) * (x - mean);
    ss /= (xs.size() - 1);
  } else {
    for (std::size_t i = 0; i < xs.size(); ++i) ss += w[i] * (xs[i] - mean) * (xs[i] - mean);
    ss /= wsum;
  }
  return {mean, std::sqrt(ss)};
}

double effective_n(std::span<const double> w, std::size_t n) {
  if (w.empty()) return static_cast<double>(n);
  double s = 0.0, s2 = 0.0;
  for (double wi : w) {
    s += wi;
    s2 += wi * wi;
  }
  return s * s / s2;
}

}  // namespace

KdeModel KdeModel::fit_impl(std::span<const double> xs, std::span<const double> ys,
                            std::span<const double> weights) {
  if (xs.size() < 30) throw std::invalid_argument("kde: needs at least 30 points");
  if (!ys.empty() && ys.size() != xs.size())
    throw std::invalid_argument("kde: dimension size mismatch");
  if (!weights.empty()) {
    if (weights.size() != xs.size())
      throw std::invalid_argument("kde: weight size mismatch");
    for (double w : weights)
      if (!(w >= 0.0) || !std::isfinite(w))
        throw std::invalid_argument("kde: weights must be finite and nonnegative");
  }
  for (double x : xs)
    if (!std::isfinite(x)) throw std::invalid_argument("kde: non-finite point");
  for (double y : ys)
    if (!std::isfinite(y)) throw std::invalid_argument("kde: non-finite point");

  KdeModel m;
  m.dim_ = ys.empty() ? 1 : 2;
  m.n_ = xs.size();
  m.xs_.assign(xs.begin(), xs.end());
  m.ys_.assign(ys.begin(), ys.end());
  m.weights_.assign(weights.begin(), weights.end());
  m.weight_sum_ = weights.empty()
                      ? static_cast<double>(m.n_)
                      : std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(m.weight_sum_ > 0.0)) throw std::invalid_argument("kde: zero total weight");

  const double neff = effective_n(weights, m.n_);
  const Moments mx = weighted_moments(xs, weights);
  if (!(mx.sd > 0.0)) throw std::invalid_argument("kde: zero variance in dimension 0");
  if (m.dim_ == 1) {
    m.bandwidth_[0] = 1.06 * mx.sd * std::pow(neff, -0.2);
  } else {
    const Moments my = weighted_moments(ys, weights);
    if (!(my.sd > 0.0)) throw std::invalid_argument("kde: zero variance in dimension 1");
    m.bandwidth_[0] = mx.sd * std::pow(neff, -1.0 / 6.0);
    m.bandwidth_[1] = my.sd * std::pow(neff, -1.0 / 6.0);
  }
  return m;
}

KdeModel KdeModel::fit(std::span<const double> xs) { return fit_impl(xs, {}, {}); }

KdeModel KdeModel::fit(std::span<const double> xs, std::span<const double> ys) {
  return fit_impl(xs, ys, {});
}

KdeModel KdeModel::fit_weighted(std::span<const double> xs,
                                std::span<const double> weights) {
  return fit_impl(xs, {}, weights);
}

KdeModel KdeModel::fit_weighted(std::span<const double> xs, std::span<const double> ys,
                                std::span<const double> weights) {
  return fit_impl(xs, ys, weights);
}

double KdeModel::eval(double x) const {
  if (dim_ != 1) throw std::invalid_argument("kde: 1-D eval on 2-D model");
  const double h = bandwidth_[0];
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double z = (x - xs_[i]) / h;
    const double k = std::exp(-0.5 * z * z);
    sum += weights_.empty() ? k : weights_[i] * k;
  }
  return sum / (weight_sum_ * h) * std::exp(-kLogSqrt2Pi);
}

double KdeModel::eval(double x, double y) const {
  if (dim_ != 2) throw std::invalid_argument("kde: 2-D eval on 1-D model");
  const double hx = bandwidth_[0];
  const double hy = bandwidth_[1];
  double sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double zx = (x - xs_[i]) / hx;
    const double zy = (y - ys_[i]) / hy;
    const double k = std::exp(-0.5 * (zx * zx + zy * zy));
    sum += weights_.empty() ? k : weights_[i] * k;
  }
  return sum / (weight_sum_ * hx * hy) * std::exp(-2.0 * kLogSqrt2Pi);
}

double KdeModel::log_eval(double x) const {
  if (dim_ != 1) throw std::invalid_argument("kde: 1-D eval on 2-D model");
  const double h = bandwidth_[0];
  // log-sum-exp over kernel exponents so far-tail evaluations stay finite.
  double max_e = -std::numeric_limits<double>::infinity();
  std::vector<double> es(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double z = (x - xs_[i]) / h;
    es[i] = -0.5 * z * z + (weights_.empty() ? 0.0 : std::log(weights_[i]));
    max_e = std::max(max_e, es[i]);
  }
  if (!std::isfinite(max_e)) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double e : es) sum += std::exp(e - max_e);
  return max_e + std::log(sum) - std::log(weight_sum_ * h) - kLogSqrt2Pi;
}

double KdeModel::log_eval(double x, double y) const {
  if (dim_ != 2) throw std::invalid_argument("kde: 2-D eval on 1-D model");
  const double hx = bandwidth_[0];
  const double hy = bandwidth_[1];
  double max_e = -std::numeric_limits<double>::infinity();
  std::vector<double> es(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const double zx = (x - xs_[i]) / hx;
    const double zy = (y - ys_[i]) / hy;
    es[i] = -0.5 * (zx * zx + zy * zy) + (weights_.empty() ? 0.0 : std::log(weights_[i]));
    max_e = std::max(max_e, es[i]);
  }
  if (!std::isfinite(max_e)) return -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  for (double e : es) sum += std::exp(e - max_e);
  return max_e + std::log(sum) - std::log(weight_sum_ * hx * hy) - 2.0 * kLogSqrt2Pi;
}

double KdeModel::min_point(int d) const {
  const auto& v = d == 0 ? xs_ : ys_;
  return *std::min_element(v.begin(), v.end());
}

double KdeModel::max_point(int d) const {
  const auto& v = d == 0 ? xs_ : ys_;
  return *std::max_element(v.begin(), v.end());
}

}  // namespace opaque
