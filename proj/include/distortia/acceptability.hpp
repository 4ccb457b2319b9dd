#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "distortia/choquet.hpp"
#include "distortia/errors.hpp"
#include "distortia/semigroup.hpp"

namespace distortia {

enum class AlphaStatus { zero, interior, at_cap, infinite };

inline const char* to_string(AlphaStatus s) {
  switch (s) {
    case AlphaStatus::zero: return "zero";
    case AlphaStatus::interior: return "interior";
    case AlphaStatus::at_cap: return "at_cap";
    default: return "infinite";
  }
}

struct AlphaResult {
  double value = 0.0;
  AlphaStatus status = AlphaStatus::zero;
  double bracket_lo = 0.0;  // f(bracket_lo) >= 0 > f(bracket_hi) when interior
  double bracket_hi = 0.0;
  int evaluations = 0;
};

/// Acceptability index: alpha = sup{t >= 0 : f(t) >= 0} where
/// f(t) = int x d(Psi_t(D_X(x))). f is nonincreasing and continuous in t,
/// so bisection is exact up to tol. All nonnegative samples give +inf
/// (arbitrage consistency); negative mean gives 0 (expectation
/// consistency).
inline AlphaResult alpha(const Semigroup& s, const EmpiricalDistribution& d,
                         double tol = 1e-9, double t_max = 50.0) {
  if (!(tol >= 1e-10) || !(tol <= 1e-2))
    throw ValidationError("alpha: tol must lie in [1e-10, 1e-2]");
  if (!(t_max > 0.0)) throw ValidationError("alpha: t_max must be positive");

  AlphaResult res;
  if (d.values.front() >= 0.0) {
    res.value = kInf;
    res.status = AlphaStatus::infinite;
    return res;
  }

  const size_t n = d.size();
  std::vector<double> u(n, 0.0);  // H at the cumulative probabilities
  for (size_t i = 0; i + 1 < n; ++i) u[i] = s.h(d.cum_probs[i]);

  auto f = [&](double t) {
    ++res.evaluations;
    double sum = 0.0, prev = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double cur;
      if (i + 1 == n) {
        cur = 1.0;
      } else {
        double v = u[i] + t;
        cur = v >= s.h_high() ? 1.0 : s.h_inverse(v);
      }
      sum += d.values[i] * (cur - prev);
      prev = cur;
    }
    return sum;
  };

  const double mean = d.mean();  // f(0) along the exact identity path
  double scale = 0.0, prevp = 0.0;
  for (size_t i = 0; i < n; ++i) {
    scale += std::abs(d.values[i]) * (d.cum_probs[i] - prevp);
    prevp = d.cum_probs[i];
  }
  // A mean within rounding noise of zero is treated as zero.
  const double mean_tol = 16.0 * 2.220446049250313e-16 * scale;
  if (mean < -mean_tol) {
    res.status = AlphaStatus::zero;
    res.bracket_hi = tol;
    return res;
  }
  if (mean <= mean_tol && f(tol) < 0.0) {
    res.status = AlphaStatus::zero;
    res.bracket_hi = tol;
    return res;
  }

  double lo = 0.0, hi = 1.0;
  while (true) {
    if (hi >= t_max) {
      if (f(t_max) >= 0.0) {
        res.value = t_max;
        res.status = AlphaStatus::at_cap;
        res.bracket_lo = res.bracket_hi = t_max;
        return res;
      }
      hi = t_max;
      break;
    }
    if (f(hi) < 0.0) break;
    lo = hi;
    hi *= 2.0;
  }
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    if (f(mid) >= 0.0)
      lo = mid;
    else
      hi = mid;
  }
  res.value = 0.5 * (lo + hi);
  res.status = AlphaStatus::interior;
  res.bracket_lo = lo;
  res.bracket_hi = hi;
  return res;
}

/// Probability-weighted population Sharpe ratio.
inline double sharpe(const EmpiricalDistribution& d) {
  double mu = d.mean();
  double m2 = 0.0, prev = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    m2 += d.values[i] * d.values[i] * (d.cum_probs[i] - prev);
    prev = d.cum_probs[i];
  }
  double var = m2 - mu * mu;
  if (!(var > 0.0))
    throw NumericError("sharpe ratio undefined: zero variance sample");
  return mu / std::sqrt(var);
}

/// mean / V@R_lambda with the lower (left-continuous) quantile convention.
inline double raroc(const EmpiricalDistribution& d, double lambda = 0.05) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw ValidationError("raroc: lambda must lie in (0,1)");
  double mu = d.mean();
  double q = d.values.back();
  for (size_t i = 0; i < d.size(); ++i)
    if (d.cum_probs[i] >= lambda) {
      q = d.values[i];
      break;
    }
  double var_at_risk = -q;
  if (var_at_risk > 0.0) return mu / var_at_risk;
  return mu > 0.0 ? kInf : 0.0;  // no capital at risk
}

/// mean / expected negative part.
inline double glr(const EmpiricalDistribution& d) {
  double mu = d.mean();
  double neg = 0.0, prev = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    neg += std::max(-d.values[i], 0.0) * (d.cum_probs[i] - prev);
    prev = d.cum_probs[i];
  }
  if (neg > 0.0) return mu / neg;
  return mu > 0.0 ? kInf : 0.0;
}

/// mean / rho with rho = -distorted_expectation (a Weighted-V@R coherent
/// risk measure).
inline double craroc(const EmpiricalDistribution& d, const Distortion& psi) {
  double mu = d.mean();
  double rho = -distorted_expectation(d, psi);
  if (rho > 0.0) return mu / rho;
  return mu > 0.0 ? kInf : 0.0;
}

}  // namespace distortia
