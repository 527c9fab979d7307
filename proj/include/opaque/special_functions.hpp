// Apache License, Version 2.0, refer to LICENSE.txt

#ifndef OPAQUE_SPECIAL_FUNCTIONS_HPP
#define OPAQUE_SPECIAL_FUNCTIONS_HPP

#include "opaque/rng.hpp"

namespace opaque {

double norm_pdf(double x);                       // standard normal density
double norm_pdf(double x, double mean, double sd);
double norm_log_pdf(double x, double mean, double sd);
double norm_cdf(double x);                       // standard normal CDF
double norm_sf(double x);                        // 1 - CDF, accurate in the tail
double norm_quantile(double p);                  // inverse CDF, p in (0,1)

double log_beta(double a, double b);
double beta_pdf(double x, double a, double b);   // on (0,1)

// Regularized incomplete gamma functions P(a,x) and Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double chi_square_sf(double x, double dof);      // upper tail probability

double lognormal_pdf(double x, double meanlog, double sdlog);
double lognormal_log_pdf(double x, double meanlog, double sdlog);
double gamma_pdf(double x, double shape, double rate);
double gamma_log_pdf(double x, double shape, double rate);

/// Draw from N(mean, sd^2) truncated to [lo, +inf).
double truncated_normal_below(Rng& rng, double mean, double sd, double lo);

}  // namespace opaque

#endif  // OPAQUE_SPECIAL_FUNCTIONS_HPP
