#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "distortia/acceptability.hpp"
#include "distortia/choquet.hpp"
#include "distortia/errors.hpp"
#include "distortia/normal.hpp"
#include "distortia/semigroup.hpp"

namespace distortia {

/// Discounted net gains per scenario (rows) and asset (columns).
struct ScenarioMatrix {
  std::vector<std::vector<double>> gains;
  std::vector<double> probs;

  size_t scenarios() const { return gains.size(); }
  size_t assets() const { return gains.empty() ? 0 : gains.front().size(); }
};

inline ScenarioMatrix make_scenario_matrix(std::vector<std::vector<double>> gains,
                                           std::vector<double> probs = {}) {
  ScenarioMatrix m;
  if (gains.size() < 2) throw ValidationError("scenario matrix needs at least 2 scenarios");
  size_t d = gains.front().size();
  if (d < 1) throw ValidationError("scenario matrix needs at least 1 asset");
  for (const auto& row : gains)
    if (row.size() != d) throw ValidationError("ragged scenario matrix");
  if (probs.empty()) {
    probs.assign(gains.size(), 1.0 / static_cast<double>(gains.size()));
  } else {
    if (probs.size() != gains.size())
      throw ValidationError("scenario probabilities must match scenario count");
    double total = 0.0;
    for (double p : probs) {
      if (!(p > 0.0)) throw ValidationError("scenario probabilities must be positive");
      total += p;
    }
    for (double& p : probs) p /= total;
  }
  m.gains = std::move(gains);
  m.probs = std::move(probs);
  return m;
}

struct PortfolioOptions {
  int starts = 16;
  std::uint64_t seed = 0;
  double index_tol = 1e-7;
  double t_max = 50.0;
  double angle_tol = 1e-6;  // compass stop, radians
};

struct PortfolioStart {
  std::vector<double> start;
  std::vector<double> direction;
  double alpha = 0.0;
  AlphaStatus status = AlphaStatus::zero;
};

struct PortfolioSolution {
  std::vector<double> direction;
  double alpha_star = 0.0;
  AlphaStatus status = AlphaStatus::zero;
  std::vector<PortfolioStart> starts;
  bool uniqueness_flag = false;  // all interior rays within 1e-2 radians
  bool arbitrage = false;
  int objective_evaluations = 0;
};

namespace detail {

inline void normalize(std::vector<double>& h) {
  double n2 = 0.0;
  for (double v : h) n2 += v * v;
  double n = std::sqrt(n2);
  for (double& v : h) v /= n;
}

inline double angle_between(const std::vector<double>& a, const std::vector<double>& b) {
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return std::acos(std::clamp(dot, -1.0, 1.0));
}

/// Orthonormal basis of the tangent space at unit vector h (d-1 vectors).
inline std::vector<std::vector<double>> tangent_basis(const std::vector<double>& h) {
  size_t d = h.size();
  std::vector<std::vector<double>> basis;
  basis.push_back(h);
  for (size_t axis = 0; axis < d && basis.size() < d; ++axis) {
    std::vector<double> v(d, 0.0);
    v[axis] = 1.0;
    for (const auto& b : basis) {
      double dot = 0.0;
      for (size_t i = 0; i < d; ++i) dot += v[i] * b[i];
      for (size_t i = 0; i < d; ++i) v[i] -= dot * b[i];
    }
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (n2 > 1e-12) {
      for (double& x : v) x /= std::sqrt(n2);
      basis.push_back(std::move(v));
    }
  }
  basis.erase(basis.begin());
  return basis;
}

/// Seeded Kronecker sequence mapped through the normal quantile: a
/// deterministic, well-spread set of unit vectors.
inline std::vector<std::vector<double>> sphere_starts(size_t d, int count,
                                                      std::uint64_t seed) {
  static const double primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29,
                                  31, 37, 41, 43, 47, 53, 59, 61, 67, 71};
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<double> offset(d);
  for (double& o : offset)
    o = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  std::vector<std::vector<double>> starts;
  for (int k = 0; k < count; ++k) {
    std::vector<double> h(d);
    for (size_t i = 0; i < d; ++i) {
      double alpha = std::sqrt(primes[i % 20]);
      double u = offset[i] + (k + 1) * alpha;
      u -= std::floor(u);
      h[i] = norm_quantile(std::clamp(u, 1e-12, 1.0 - 1e-12));
    }
    double n2 = 0.0;
    for (double v : h) n2 += v * v;
    if (n2 < 1e-12) {
      h.assign(d, 0.0);
      h[0] = 1.0;
    } else {
      normalize(h);
    }
    starts.push_back(std::move(h));
  }
  return starts;
}

}  // namespace detail

/// Maximizes h -> alpha(<h, gains>) over the unit sphere by deterministic
/// multistart compass search with geodesic steps and a shrinking step
/// size. The objective is scale invariant, so the sphere restriction
/// loses nothing. A direction with nonnegative gains in every scenario
/// and a positive gain in some scenario means arbitrage: alpha is +inf
/// there and the search stops and reports it.
inline PortfolioSolution optimize(const Semigroup& s, const ScenarioMatrix& m,
                                  PortfolioOptions opts = {}) {
  const size_t d = m.assets();
  const size_t n = m.scenarios();
  if (d < 1 || n < 2) throw ValidationError("portfolio: need d >= 1 assets, n >= 2 scenarios");
  if (opts.starts < 1) throw ValidationError("portfolio: starts must be >= 1");

  PortfolioSolution sol;

  auto objective = [&](const std::vector<double>& h) -> AlphaResult {
    ++sol.objective_evaluations;
    std::vector<double> x(n);
    double biggest = 0.0;
    for (size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (size_t j = 0; j < d; ++j) dot += h[j] * m.gains[i][j];
      x[i] = dot;
      biggest = std::max(biggest, std::abs(dot));
    }
    if (biggest == 0.0) return {0.0, AlphaStatus::zero, 0.0, 0.0, 0};
    EmpiricalDistribution dist = from_samples(x, m.probs);
    return alpha(s, dist, opts.index_tol, opts.t_max);
  };

  auto run_compass = [&](std::vector<double> h, double& fbest,
                         AlphaStatus& status) -> std::vector<double> {
    AlphaResult r = objective(h);
    fbest = r.value;
    status = r.status;
    if (r.status == AlphaStatus::infinite) return h;
    double step = 0.4;
    while (step > opts.angle_tol) {
      bool improved = false;
      auto basis = detail::tangent_basis(h);
      for (const auto& e : basis) {
        for (double sign : {1.0, -1.0}) {
          std::vector<double> cand(d);
          for (size_t i = 0; i < d; ++i)
            cand[i] = std::cos(step) * h[i] + sign * std::sin(step) * e[i];
          detail::normalize(cand);
          AlphaResult rc = objective(cand);
          if (rc.status == AlphaStatus::infinite) {
            fbest = rc.value;
            status = rc.status;
            return cand;
          }
          if (rc.value > fbest) {
            h = std::move(cand);
            fbest = rc.value;
            status = rc.status;
            improved = true;
            break;
          }
        }
        if (improved) break;
      }
      if (!improved) step *= 0.5;
    }
    return h;
  };

  std::vector<std::vector<double>> starts;
  if (d == 1) {
    starts = {{1.0}, {-1.0}};
  } else {
    starts = detail::sphere_starts(d, opts.starts, opts.seed);
    // The index is zero on the whole negative-mean cap (no climb signal);
    // flip any start pointing into it. Expectation consistency makes the
    // optimum lie in the nonnegative-mean hemisphere.
    std::vector<double> mu(d, 0.0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < d; ++j) mu[j] += m.probs[i] * m.gains[i][j];
    for (auto& st : starts) {
      double dot = 0.0;
      for (size_t j = 0; j < d; ++j) dot += st[j] * mu[j];
      if (dot < 0.0)
        for (double& v : st) v = -v;
    }
  }

  double best = -1.0;
  for (auto& st : starts) {
    PortfolioStart rec;
    rec.start = st;
    double f = 0.0;
    AlphaStatus status = AlphaStatus::zero;
    if (d == 1) {
      AlphaResult r = objective(st);
      rec.direction = st;
      f = r.value;
      status = r.status;
    } else {
      rec.direction = run_compass(st, f, status);
    }
    rec.alpha = f;
    rec.status = status;
    sol.starts.push_back(rec);
    if (status == AlphaStatus::infinite) {
      sol.direction = rec.direction;
      sol.alpha_star = kInf;
      sol.status = AlphaStatus::infinite;
      sol.arbitrage = true;
      sol.uniqueness_flag = false;
      return sol;
    }
    if (f > best || sol.direction.empty()) {
      best = f;
      sol.direction = rec.direction;
      sol.alpha_star = f;
      sol.status = status;
    }
  }

  // Uniqueness: every interior-converged ray within 1e-2 radians of the
  // best one (antipodal rays count as the same direction up to sign only
  // when alpha agrees; we compare rays as returned).
  sol.uniqueness_flag = true;
  for (const auto& st : sol.starts) {
    if (st.status != AlphaStatus::interior) continue;
    if (detail::angle_between(st.direction, sol.direction) > 1e-2) {
      sol.uniqueness_flag = false;
      break;
    }
  }
  return sol;
}

}  // namespace distortia
