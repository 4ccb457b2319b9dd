#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <vector>

#include "distortia/errors.hpp"

namespace distortia {

namespace detail {

inline constexpr std::array<double, 8> kGL15Nodes = {
    0.0,
    0.20119409399743451,
    0.39415134707756339,
    0.57097217260853883,
    0.72441773136017007,
    0.84820658341042721,
    0.93727339240070595,
    0.98799251802048538};

inline constexpr std::array<double, 8> kGL15Weights = {
    0.2025782419255609,
    0.19843148532711125,
    0.18616100001556188,
    0.16626920581699378,
    0.13957067792615391,
    0.10715922046717177,
    0.070366047488108069,
    0.030753241996118647};

}  // namespace detail

/// 15-node Gauss-Legendre rule on [a, b].
template <std::invocable<double> F>
double gauss_legendre_15(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = detail::kGL15Weights[0] * f(mid);
  for (int i = 1; i < 8; ++i) {
    const double dx = half * detail::kGL15Nodes[i];
    sum += detail::kGL15Weights[i] * (f(mid - dx) + f(mid + dx));
  }
  return sum * half;
}

/// Adaptive bisection built on GL15; error estimated by comparing the
/// whole-interval rule against the two half-interval rules.
template <std::invocable<double> F>
double adaptive_integrate(F&& f, double a, double b, double abs_tol,
                          int max_depth = 60) {
  struct Frame {
    double a, b, whole;
    int depth;
  };
  double whole = gauss_legendre_15(f, a, b);
  std::vector<Frame> stack{{a, b, whole, 0}};
  double total = 0.0;
  while (!stack.empty()) {
    Frame fr = stack.back();
    stack.pop_back();
    const double m = 0.5 * (fr.a + fr.b);
    const double left = gauss_legendre_15(f, fr.a, m);
    const double right = gauss_legendre_15(f, m, fr.b);
    const double err = std::abs(left + right - fr.whole);
    if (!std::isfinite(err))
      throw NumericError("adaptive_integrate: non-finite integrand near [" +
                         std::to_string(fr.a) + ", " + std::to_string(fr.b) + "]");
    if (err <= abs_tol || fr.depth >= max_depth || m <= fr.a || m >= fr.b) {
      total += left + right;
    } else {
      stack.push_back({fr.a, m, left, fr.depth + 1});
      stack.push_back({m, fr.b, right, fr.depth + 1});
    }
  }
  return total;
}

/// Outcome of probing an endpoint-singular integral by geometric halving.
struct TailProbe {
  bool divergent = false;
  double value = 0.0;  // cumulative integral (a lower bound when divergent)
  Confidence confidence = Confidence::numeric_confident;
  double last_ratio = 0.0;  // decay ratio of the last increments
};

/// Probes integral of f over (0, eps0] (toward_zero) or [1-eps0, 1)
/// (toward one), where f may blow up at the endpoint. Increments are taken
/// over geometrically halving offsets; an integrable singularity shows
/// geometrically decaying increments, a non-integrable one does not.
/// Divergence is declared when the cumulative value passes `cap`, when the
/// integrand overflows doubles, or when the probing floor is reached with
/// non-decaying increments. The floor is 1e-290 toward zero and the
/// last offset with 1-eps representable toward one.
template <std::invocable<double> F>
TailProbe probe_tail_integral(F&& f, double eps0, bool toward_zero,
                              double abs_tol = 1e-11, double cap = 1e6) {
  TailProbe out;
  double eps = eps0;
  double prev_inc = -1.0;
  int calm = 0;  // consecutive geometric-decay observations
  for (int k = 0; k < 2000; ++k) {
    const double lo = toward_zero ? eps * 0.5 : 1.0 - eps;
    const double hi = toward_zero ? eps : 1.0 - eps * 0.5;
    if (!(lo < hi)) break;                           // offsets no longer representable
    if (toward_zero && eps * 0.5 < 1e-290) break;    // probing floor
    const double inc = gauss_legendre_15(f, lo, hi);
    if (!std::isfinite(inc)) {
      // The integrand blew past double range while increments were not
      // settling: treat as divergent.
      out.divergent = true;
      out.confidence = out.last_ratio >= 0.9 ? Confidence::numeric_confident
                                             : Confidence::numeric_borderline;
      return out;
    }
    out.value += inc;
    if (prev_inc > 0.0 && inc > 0.0) {
      out.last_ratio = inc / prev_inc;
      calm = (out.last_ratio <= 0.9) ? calm + 1 : 0;
      if (calm >= 5 && out.last_ratio < 1.0) {
        const double tail_bound = inc * out.last_ratio / (1.0 - out.last_ratio);
        if (tail_bound < abs_tol) {
          out.value += tail_bound;
          out.divergent = false;
          out.confidence = out.last_ratio <= 0.85 ? Confidence::numeric_confident
                                                  : Confidence::numeric_borderline;
          return out;
        }
      }
      if (out.value > cap) {
        out.divergent = true;
        out.confidence = out.last_ratio >= 0.9 ? Confidence::numeric_confident
                                               : Confidence::numeric_borderline;
        return out;
      }
    }
    prev_inc = inc;
    eps *= 0.5;
  }
  // Floor reached: classify by the increment decay observed so far.
  if (out.last_ratio >= 0.9) {
    out.divergent = true;
    out.confidence = out.last_ratio >= 0.97 ? Confidence::numeric_confident
                                            : Confidence::numeric_borderline;
  } else {
    out.divergent = false;
    if (prev_inc > 0.0 && out.last_ratio > 0.0 && out.last_ratio < 1.0)
      out.value += prev_inc * out.last_ratio / (1.0 - out.last_ratio);
    out.confidence = out.last_ratio <= 0.85 ? Confidence::numeric_confident
                                            : Confidence::numeric_borderline;
  }
  return out;
}

}  // namespace distortia
