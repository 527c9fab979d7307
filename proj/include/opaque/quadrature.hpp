// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_QUADRATURE_HPP
#define OPAQUE_QUADRATURE_HPP

#include <functional>

namespace opaque {

struct QuadratureRule {
  double abs_tol = 1e-8;
  int max_depth = 40;
};

struct IntegrationResult {
  double value = 0.0;
  bool converged = true;  // false when max_depth was hit somewhere
};

/// Adaptive Simpson on [lo, hi]. Throws std::domain_error when f evaluates
/// to a non-finite value.
IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                     double hi, QuadratureRule rule = {});

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 QuadratureRule rule = {});

/// Tensor-product Simpson on a fixed n x n grid (n made odd internally).
double integrate2d(const std::function<double(double, double)>& f, double xlo,
                   double xhi, double ylo, double yhi, int n = 512);

}  // namespace opaque

#endif  // OPAQUE_QUADRATURE_HPP
