#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <vector>

#include "distortia/distortion.hpp"
#include "distortia/errors.hpp"

namespace distortia {

/// Sorted empirical P&L atoms with cumulative probabilities.
struct EmpiricalDistribution {
  std::vector<double> values;     // nondecreasing
  std::vector<double> cum_probs;  // strictly increasing, back() == 1

  size_t size() const { return values.size(); }

  double mean() const {
    double m = 0.0, prev = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      m += values[i] * (cum_probs[i] - prev);
      prev = cum_probs[i];
    }
    return m;
  }
};

inline EmpiricalDistribution from_samples(
    std::vector<double> values,
    const std::optional<std::vector<double>>& weights = std::nullopt) {
  if (values.empty()) throw ValidationError("empty sample");
  std::vector<double> w;
  if (weights) {
    if (weights->size() != values.size())
      throw ValidationError("weights must match sample length");
    for (double wi : *weights)
      if (!(wi > 0.0)) throw ValidationError("weights must be positive");
    w = *weights;
  } else {
    w.assign(values.size(), 1.0);
  }
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return values[a] < values[b]; });
  EmpiricalDistribution d;
  d.values.reserve(values.size());
  d.cum_probs.reserve(values.size());
  double total = 0.0;
  for (double wi : w) total += wi;
  double acc = 0.0;
  for (size_t i : order) {
    if (!std::isfinite(values[i])) throw ValidationError("sample values must be finite");
    acc += w[i];
    d.values.push_back(values[i]);
    d.cum_probs.push_back(acc / total);
  }
  d.cum_probs.back() = 1.0;
  return d;
}

/// Choquet integral int x d(Psi(D_X(x))) over the empirical atoms:
/// sum v_i (Psi(P_i) - Psi(P_{i-1})) with Psi(P_0) = Psi(0) = 0, so a jump
/// Psi(0+) > 0 loads the worst outcome.
inline double distorted_expectation(const EmpiricalDistribution& d, const Distortion& psi) {
  double sum = 0.0, prev = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    double cur = psi(d.cum_probs[i]);
    sum += d.values[i] * (cur - prev);
    prev = cur;
  }
  return sum;
}

/// Conjugate Phi(x) = sup_{y in [0,1]} [Psi(y) - x y]; convex nonincreasing
/// with Phi(0) = 1. Exact knot scan for piecewise-linear distortions,
/// golden-section otherwise.
inline double conjugate_phi(const Distortion& psi, double x) {
  if (!(x >= 0.0)) throw ValidationError("conjugate_phi: x must be >= 0");
  double best = std::max(psi.d0plus(), 1.0 - x);  // y -> 0+ and y = 1
  if (const auto* pts = psi.pl_points()) {
    for (const auto& [px, py] : *pts) best = std::max(best, py - x * px);
    return best;
  }
  auto f = [&](double y) { return psi(y) - x * y; };
  const double invphi = 0.6180339887498949, invphi2 = 0.3819660112501051;
  double a = 0.0, b = 1.0;
  double c = a + invphi2 * (b - a), dpt = a + invphi * (b - a);
  double fc = f(c), fd = f(dpt);
  for (int i = 0; i < 90; ++i) {
    if (fc >= fd) {
      b = dpt;
      dpt = c;
      fd = fc;
      c = a + invphi2 * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = dpt;
      fc = fd;
      dpt = a + invphi * (b - a);
      fd = f(dpt);
    }
  }
  return std::max(best, std::max(fc, fd));
}

/// Per-atom density of the extreme measure: the Psi-increment divided by
/// the plain probability increment. Reweighting the atoms by this density
/// turns the distorted expectation back into an ordinary mean.
inline std::vector<double> extreme_density(const EmpiricalDistribution& d,
                                           const Distortion& psi) {
  std::vector<double> w(d.size());
  double prev_p = 0.0, prev_psi = 0.0;
  for (size_t i = 0; i < d.size(); ++i) {
    double cur = psi(d.cum_probs[i]);
    w[i] = (cur - prev_psi) / (d.cum_probs[i] - prev_p);
    prev_p = d.cum_probs[i];
    prev_psi = cur;
  }
  return w;
}

}  // namespace distortia
