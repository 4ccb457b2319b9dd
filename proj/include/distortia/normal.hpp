#pragma once

#include <cmath>

#include "distortia/errors.hpp"

// Standard normal CDF/quantile. The quantile uses Acklam's rational
// approximation refined by Newton steps on the erfc-based CDF, giving
// close to full double precision across both tails.

namespace distortia {

inline double norm_pdf(double z) {
  static const double inv_sqrt_2pi = 0.3989422804014326779;
  return inv_sqrt_2pi * std::exp(-0.5 * z * z);
}

inline double norm_cdf(double z) { return 0.5 * std::erfc(-z * M_SQRT1_2); }

/// Survival function 1 - Phi(z), accurate for large positive z.
inline double norm_sf(double z) { return 0.5 * std::erfc(z * M_SQRT1_2); }

namespace detail {

inline double acklam_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - plow) {
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace detail

/// Inverse survival function: z with norm_sf(z) = q, for q in (0, 1].
/// Stable in the far upper tail (q down to ~1e-300).
inline double norm_isf(double q) {
  if (!(q > 0.0) || q > 1.0) throw ValidationError("norm_isf: q must be in (0,1]");
  if (q > 0.5) return -norm_isf(1.0 - q);
  double z = -detail::acklam_quantile(q);
  // Newton on the survival function; sf and pdf shrink together in the
  // tail so the correction stays well-scaled.
  for (int i = 0; i < 3; ++i) {
    double err = norm_sf(z) - q;
    double dz = err / norm_pdf(z);
    z += dz;
    if (std::abs(dz) < 1e-15 * (1.0 + std::abs(z))) break;
  }
  return z;
}

/// Inverse CDF: z with norm_cdf(z) = p, for p in (0, 1).
inline double norm_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) throw ValidationError("norm_quantile: p must be in (0,1)");
  return p <= 0.5 ? -norm_isf(p) : norm_isf(1.0 - p);
}

}  // namespace distortia
