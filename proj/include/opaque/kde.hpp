// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_KDE_HPP
#define OPAQUE_KDE_HPP

#include <span>
#include <vector>

namespace opaque {

/// Gaussian product-kernel density estimate in one or two dimensions with
/// Silverman bandwidths: h = 1.06 * sd * n^(-1/5) in 1-D and
/// h_d = sd_d * n^(-1/6) per dimension in 2-D.
///
/// Weighted fits use the same rules with n replaced by the effective sample
/// size (sum w)^2 / sum(w^2). Immutable after fit.
class KdeModel {
 public:
  static KdeModel fit(std::span<const double> xs);
  static KdeModel fit(std::span<const double> xs, std::span<const double> ys);
  static KdeModel fit_weighted(std::span<const double> xs,
                               std::span<const double> weights);
  static KdeModel fit_weighted(std::span<const double> xs, std::span<const double> ys,
                               std::span<const double> weights);

  int dim() const { return dim_; }
  std::size_t size() const { return n_; }
  double bandwidth(int d) const { return bandwidth_[d]; }

  double eval(double x) const;
  double eval(double x, double y) const;
  double log_eval(double x) const;
  double log_eval(double x, double y) const;

  double min_point(int d) const;
  double max_point(int d) const;

 private:
  KdeModel() = default;
  static KdeModel fit_impl(std::span<const double> xs, std::span<const double> ys,
                           std::span<const double> weights);

  int dim_ = 0;
  std::size_t n_ = 0;
  std::vector<double> xs_, ys_, weights_;  // weights_ empty means equal weights
  double weight_sum_ = 0.0;
  double bandwidth_[2] = {0.0, 0.0};
};

}  // namespace opaque

#endif  // OPAQUE_KDE_HPP
