#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "distortia/distortion.hpp"
#include "distortia/errors.hpp"
#include "distortia/generator.hpp"
#include "distortia/semigroup.hpp"

// Recovery of the generator ("logarithm") of a concave distortion Psi that
// is the time-1 map of a semigroup. Orbits x, Psi(x), Psi^2(x), ... are
// tracked in loss coordinates w = 1-x for tail accuracy; the derivative
// product is accumulated in log space; the tail anchor G(x_n) is taken
// from a locally fitted power-law time coordinate ell(u) = c u^beta in
// u = -ln w. When the left derivative at 1 is positive the fit returns
// beta ~ 0 and c ~ -ln Psi'_-(1), i.e. the classical anchor; the power-law
// form extends the estimate to slope-zero tails (where the classical
// constant degenerates) and is exact for w -> w^q tails.

namespace distortia {

struct LogRecoveryOptions {
  std::vector<double> grid;                  // empty -> default_recovery_grid()
  std::function<double(double)> derivative;  // optional analytic Psi'(x)
  double tail_cut = 1e-18;  // stop the orbit once 1 - x_n drops below this
  double asym_cut = 1e-4;   // tail fit window must start below this
  int max_steps = 10000;
  double rel_tol = 1e-8;        // successive-estimate stop
  double accuracy = 1e-9;       // semigroup accuracy for the roundtrip
  bool compute_roundtrip = true;
};

struct ConcavityReport {
  bool pass = true;
  double x_left = 0.0, x_mid = 0.0, x_right = 0.0;  // worst triple
  double violation = 0.0;  // chord minus midpoint value (positive = bad)
  double tolerance = 0.0;
};

struct LogRecovery {
  std::vector<double> grid;
  std::vector<double> g_estimates;
  std::vector<int> iterations;
  double psi_prime_at_1 = 1.0;  // observed tail multiplier exp(-du)
  bool trivial = false;
  ConcavityReport concavity;
  double jump_factor = 1.0;  // local estimate ratio at the worst triple
  double roundtrip_error = 0.0;
  std::vector<Knot> knots;  // hull-projected export
};

inline std::vector<double> default_recovery_grid() {
  std::vector<double> xs;
  for (int i = 0; i <= 180; ++i) xs.push_back(0.05 + 0.005 * i);
  for (int k = 5; k <= 40; ++k) {
    for (double m : {1.0, 1.5}) {
      double w = m * std::pow(0.5, k);
      if (w >= 1e-12 && w < 0.05) {
        xs.push_back(w);
        xs.push_back(1.0 - w);
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

namespace detail {

/// Integral of v^-beta over [a, b], stable across beta = 1.
inline double power_time(double beta, double a, double b) {
  double lr = std::log(b / a);
  double q = (1.0 - beta) * lr;
  double f = std::abs(q) < 1e-8 ? lr * (1.0 + 0.5 * q + q * q / 6.0)
                                : lr * std::expm1(q) / q;
  return std::pow(a, 1.0 - beta) * f;
}

/// Fits ell(u) = c u^beta to the last three tail points using the time-1
/// flow identity int du/ell = 1 over each step.
inline void fit_tail_model(double u0, double u1, double u2, double& c, double& beta) {
  auto D = [&](double b) { return power_time(b, u1, u2) - power_time(b, u0, u1); };
  double root = 0.0;
  bool found = false;
  double lo = -60.0, hi = 60.0;
  const int nscan = 481;
  double prev_b = lo, prev_v = D(lo);
  for (int i = 1; i < nscan; ++i) {
    double b = lo + (hi - lo) * i / (nscan - 1);
    double v = D(b);
    if (v == 0.0) {
      root = b;
      found = true;
      break;
    }
    if (std::isfinite(prev_v) && std::isfinite(v) && (prev_v < 0.0) != (v < 0.0)) {
      double a_ = prev_b, b_ = b, va = prev_v;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a_ + b_);
        double vm = D(m);
        if ((va < 0.0) == (vm < 0.0)) {
          a_ = m;
          va = vm;
        } else {
          b_ = m;
        }
      }
      root = 0.5 * (a_ + b_);
      found = true;
      break;
    }
    prev_b = b;
    prev_v = v;
  }
  beta = found ? root : 0.0;
  c = power_time(beta, u1, u2);
}

struct Orbit {
  double estimate = 0.0;
  int steps = 0;
  double last_du = 0.0;
};

inline Orbit recover_point(const Distortion& psi, const LogRecoveryOptions& opts,
                           double x) {
  Orbit out;
  double w = 1.0 - x;
  std::vector<double> us{-std::log(w)};
  double logp = 0.0;
  double prev_est = -1.0;
  bool have_est = false;
  for (int n = 0; n < opts.max_steps; ++n) {
    double wn = psi.loss(w);
    if (!(wn > 0.0) || wn >= w) {
      // underflow or a fixed point; emit what the tail gave us
      break;
    }
    double dv;
    if (opts.derivative && w > 1e-12)
      dv = opts.derivative(1.0 - w);
    else
      dv = psi.derivative_at_loss(w);
    if (!(dv > 0.0) || !std::isfinite(dv))
      throw NumericError("recover_generator: nonpositive derivative in orbit product at x=" +
                         std::to_string(1.0 - w));
    logp += std::log(dv);
    w = wn;
    us.push_back(-std::log(w));
    out.steps = n + 1;
    bool window_ready =
        us.size() >= 4 && std::exp(-us[us.size() - 3]) < opts.asym_cut;
    if (!window_ready) continue;
    double c, beta;
    fit_tail_model(us[us.size() - 3], us[us.size() - 2], us.back(), c, beta);
    double un = us.back();
    double est = std::exp(-un + std::log(c) + beta * std::log(un) - logp);
    out.estimate = est;
    out.last_du = us.back() - us[us.size() - 2];
    if (have_est && std::abs(est / prev_est - 1.0) < opts.rel_tol) return out;
    prev_est = est;
    have_est = true;
    if (w < opts.tail_cut) return out;
    if (w < 1e-290) return out;
  }
  if (!have_est && us.size() >= 4) {
    double c, beta;
    fit_tail_model(us[us.size() - 3], us[us.size() - 2], us.back(), c, beta);
    out.estimate = std::exp(-us.back() + std::log(c) + beta * std::log(us.back()) - logp);
    out.last_du = us.back() - us[us.size() - 2];
  }
  return out;
}

inline std::vector<Knot> concave_hull_knots(const std::vector<double>& xs,
                                            const std::vector<double>& gs) {
  std::vector<size_t> hull;
  auto below = [&](size_t p, size_t q, size_t r) {
    return (gs[q] - gs[p]) * (xs[r] - xs[p]) <= (gs[r] - gs[p]) * (xs[q] - xs[p]);
  };
  for (size_t i = 0; i < xs.size(); ++i) {
    while (hull.size() >= 2 && below(hull[hull.size() - 2], hull.back(), i))
      hull.pop_back();
    hull.push_back(i);
  }
  std::vector<Knot> knots;
  knots.reserve(hull.size());
  for (size_t i : hull) knots.push_back({xs[i], std::max(gs[i], 1e-300)});
  return knots;
}

}  // namespace detail

/// Recovers the generator of the semigroup through Psi (if one exists).
/// Precondition: Psi has no plateau at 1 (positive left derivative in the
/// operational sense); a plateau is reported as a precondition error.
inline LogRecovery recover_generator(const Distortion& psi, LogRecoveryOptions opts = {}) {
  // Plateau detection: the operational form of the Psi'_-(1) > 0 hypothesis.
  for (int k = 2; k <= 45; ++k) {
    if (psi.loss(std::pow(0.5, k)) == 0.0)
      throw ValidationError(
          "recover_generator: Psi is flat at 1 (left derivative not positive); "
          "no unique generator recovery is available for such distortions");
  }
  LogRecovery out;
  out.grid = opts.grid.empty() ? default_recovery_grid() : opts.grid;

  double max_excess = 0.0;
  for (int i = 1; i <= 19; ++i) {
    double x = i * 0.05;
    max_excess = std::max(max_excess, psi(x) - x);
  }
  if (max_excess < 1e-13) {
    out.trivial = true;
    out.g_estimates.assign(out.grid.size(), 0.0);
    out.iterations.assign(out.grid.size(), 0);
    out.psi_prime_at_1 = 1.0;
    out.roundtrip_error = 0.0;
    return out;
  }

  out.g_estimates.resize(out.grid.size());
  out.iterations.resize(out.grid.size());
  for (size_t i = 0; i < out.grid.size(); ++i) {
    auto orbit = detail::recover_point(psi, opts, out.grid[i]);
    out.g_estimates[i] = orbit.estimate;
    out.iterations[i] = orbit.steps;
  }
  {
    auto ref = detail::recover_point(psi, opts, 0.5);
    out.psi_prime_at_1 = std::max(std::exp(-ref.last_du), 1e-300);
  }

  // Concavity of the estimates: midpoint-above-chord on consecutive triples.
  double gmax = *std::max_element(out.g_estimates.begin(), out.g_estimates.end());
  out.concavity.tolerance = 1e-3 * gmax;
  size_t worst = 1;
  for (size_t i = 1; i + 1 < out.grid.size(); ++i) {
    double x0 = out.grid[i - 1], x1 = out.grid[i], x2 = out.grid[i + 1];
    double chord = out.g_estimates[i - 1] +
                   (out.g_estimates[i + 1] - out.g_estimates[i - 1]) * (x1 - x0) / (x2 - x0);
    double v = chord - out.g_estimates[i];
    if (v > out.concavity.violation) {
      out.concavity.violation = v;
      worst = i;
    }
  }
  out.concavity.x_left = out.grid[worst - 1];
  out.concavity.x_mid = out.grid[worst];
  out.concavity.x_right = out.grid[worst + 1];
  out.concavity.pass = out.concavity.violation <= out.concavity.tolerance;

  // Local jump evidence: bisect inside the worst triple toward the point
  // where the estimate ratio concentrates, then measure across +-1e-6.
  {
    double lo = out.concavity.x_left, hi = out.concavity.x_right;
    double glo = out.g_estimates[worst - 1], ghi = out.g_estimates[worst + 1];
    while (hi - lo > 4e-6 && glo > 0.0 && ghi > 0.0) {
      double mid = 0.5 * (lo + hi);
      double gm = detail::recover_point(psi, opts, mid).estimate;
      if (!(gm > 0.0)) break;
      double rl = std::max(gm / glo, glo / gm);
      double rr = std::max(ghi / gm, gm / ghi);
      if (rl >= rr) {
        hi = mid;
        ghi = gm;
      } else {
        lo = mid;
        glo = gm;
      }
    }
    if (glo > 0.0 && ghi > 0.0) {
      double r = ghi / glo;
      out.jump_factor = std::max(r, 1.0 / r);
    }
  }

  out.knots = detail::concave_hull_knots(out.grid, out.g_estimates);
  if (opts.compute_roundtrip) {
    out.roundtrip_error = kInf;
    try {
      Generator g = make_knot_generator(out.knots, "knots:<recovered>");
      Semigroup sg = build_semigroup(g, opts.accuracy);
      double err = 0.0;
      for (double x : out.grid) err = std::max(err, std::abs(sg.psi(1.0, x) - psi(x)));
      out.roundtrip_error = err;
    } catch (const std::exception&) {
      // left at +inf; the concavity report carries the diagnosis
    }
  }
  return out;
}

struct ExistenceReport {
  bool plausible = false;
  bool trivial = false;
  std::string evidence;
  LogRecovery recovery;
};

/// Necessary-condition diagnostic (not a proof): a distortion passing the
/// recovery with concave estimates and a small roundtrip defect is
/// "plausible"; a concavity break or roundtrip failure rejects it.
inline ExistenceReport existence_check(const Distortion& psi, LogRecoveryOptions opts = {}) {
  ExistenceReport rep;
  rep.recovery = recover_generator(psi, std::move(opts));
  rep.trivial = rep.recovery.trivial;
  char buf[256];
  if (rep.trivial) {
    rep.plausible = true;
    rep.evidence =
        "distortion is the identity: recovered generator is identically zero "
        "(the trivial flow, outside the positive-generator class)";
    return rep;
  }
  bool roundtrip_ok = rep.recovery.roundtrip_error <= 1e-3;
  rep.plausible = rep.recovery.concavity.pass && roundtrip_ok;
  if (!rep.recovery.concavity.pass) {
    std::snprintf(buf, sizeof(buf),
                  "estimates break concavity at x=%.6g (violation %.3g > tol %.3g, "
                  "local jump factor %.4g); ",
                  rep.recovery.concavity.x_mid, rep.recovery.concavity.violation,
                  rep.recovery.concavity.tolerance, rep.recovery.jump_factor);
    rep.evidence += buf;
  }
  std::snprintf(buf, sizeof(buf), "roundtrip |Psi_1^rebuilt - Psi| = %.3g (limit 1e-3). ",
                rep.recovery.roundtrip_error);
  rep.evidence += buf;
  rep.evidence += rep.plausible
                      ? "verdict: plausible (necessary conditions met; heuristic, not a proof)"
                      : "verdict: rejected (necessary condition failed)";
  return rep;
}

}  // namespace distortia
