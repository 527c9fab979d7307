// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_TESTS_TESTUTIL_HPP
#define OPAQUE_TESTS_TESTUTIL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "opaque/matrix_pattern.hpp"

namespace testutil {

// Cofactor-expansion determinant: the implementation-independent oracle used
// against both the closed forms and the factorization path.
inline double brute_force_det(const opaque::SymmetricMatrix& m) {
  const int n = m.dim();
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = m(i, j);
  std::function<double(const std::vector<std::vector<double>>&)> det =
      [&det](const std::vector<std::vector<double>>& mat) -> double {
    const int k = static_cast<int>(mat.size());
    if (k == 1) return mat[0][0];
    double sum = 0.0;
    for (int c = 0; c < k; ++c) {
      std::vector<std::vector<double>> minor(k - 1, std::vector<double>(k - 1));
      for (int i = 1; i < k; ++i) {
        int cc = 0;
        for (int j = 0; j < k; ++j) {
          if (j == c) continue;
          minor[i - 1][cc++] = mat[i][j];
        }
      }
      sum += (c % 2 == 0 ? 1.0 : -1.0) * mat[0][c] * det(minor);
    }
    return sum;
  };
  return det(a);
}

// One-sample Kolmogorov-Smirnov statistic against a given CDF.
inline double ks_statistic(std::vector<double> samples,
                           const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
  }
  return d;
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double sample_sd(std::span<const double> xs) {
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace testutil

#endif  // OPAQUE_TESTS_TESTUTIL_HPP
