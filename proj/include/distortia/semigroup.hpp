#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "distortia/distortion.hpp"
#include "distortia/errors.hpp"
#include "distortia/generator.hpp"
#include "distortia/quadrature.hpp"

namespace distortia {

inline double default_accuracy() { return 1e-9; }

namespace detail {

// Cubic Hermite basis on [0,1].
inline double hermite(double t, double y0, double y1, double m0, double m1, double dx) {
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * dx * m0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * dx * m1;
}

inline double hermite_deriv(double t, double y0, double y1, double m0, double m1, double dx) {
  double t2 = t * t;
  return ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * dx * m0 +
          (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * dx * m1) / dx;
}

}  // namespace detail

/// The flow Psi_t(x) = H^{-1}(H(x) + t) where H(x) = int_{1/2}^x ds/G(s).
/// H is tabulated on an adaptively refined grid with monotone cubic
/// interpolation; the endpoint behavior (finite vs infinite H limits) is
/// classified by the shared tail-probe heuristic.
class Semigroup {
 public:
  double accuracy() const { return accuracy_; }
  const Generator& generator() const { return gen_; }

  double h_low() const { return h_low_; }
  double h_high() const { return h_high_; }
  bool low_divergent() const { return low_divergent_; }
  bool high_divergent() const { return high_divergent_; }
  Confidence tail_confidence() const { return tail_confidence_; }

  /// H(x) for x in (0,1); falls back to direct quadrature outside the
  /// tabulated range (rare, deep-tail queries).
  double h(double x) const {
    if (x <= 0.0) return h_low_;
    if (x >= 1.0) return h_high_;
    if (x < xs_.front())
      return hs_.front() - adaptive_integrate([this](double s) { return inv_g(s); }, x,
                                              xs_.front(), accuracy_ * 0.01);
    if (x > xs_.back())
      return hs_.back() + adaptive_integrate([this](double s) { return inv_g(s); },
                                             xs_.back(), x, accuracy_ * 0.01);
    size_t i = piece_index(x);
    double dx = xs_[i + 1] - xs_[i];
    double t = (x - xs_[i]) / dx;
    return detail::hermite(t, hs_[i], hs_[i + 1], ms_[i], ms_[i + 1], dx);
  }

  /// x with H(x) = v. Values outside the tabulated H range resolve through
  /// the slow quadrature path; beyond the representable neighborhood of the
  /// endpoints the result saturates at the outermost table nodes.
  double h_inverse(double v) const {
    if (v <= hs_.front()) {
      if (v <= h_low_) return 0.0;
      return invert_below_table(v);
    }
    if (v >= hs_.back()) {
      if (v >= h_high_) return 1.0;
      return invert_above_table(v);
    }
    size_t lo = 0, hi = hs_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (hs_[mid] <= v ? lo : hi) = mid;
    }
    double dx = xs_[lo + 1] - xs_[lo];
    double t = std::clamp((v - hs_[lo]) / (hs_[lo + 1] - hs_[lo]), 0.0, 1.0);
    double tlo = 0.0, thi = 1.0;
    for (int it = 0; it < 60; ++it) {
      double f = detail::hermite(t, hs_[lo], hs_[lo + 1], ms_[lo], ms_[lo + 1], dx) - v;
      (f <= 0.0 ? tlo : thi) = t;
      double d = detail::hermite_deriv(t, hs_[lo], hs_[lo + 1], ms_[lo], ms_[lo + 1], dx);
      double tn = t - f / (d * dx);
      if (!(tn > tlo) || !(tn < thi)) tn = 0.5 * (tlo + thi);
      if (std::abs(tn - t) < 1e-17) { t = tn; break; }
      t = tn;
    }
    return xs_[lo] + t * dx;
  }

  double psi(double t, double x) const {
    check_t(t);
    if (!(x >= 0.0) || !(x <= 1.0))
      throw ValidationError("psi: x must lie in [0,1], got " + std::to_string(x));
    if (x == 1.0) return 1.0;
    if (t == 0.0) return x;
    if (x == 0.0) {
      if (low_divergent_) return 0.0;
      double v = h_low_ + t;
      return v >= h_high_ ? 1.0 : h_inverse(v);
    }
    double v = h(x) + t;
    if (v >= h_high_) return 1.0;
    double y = h_inverse(v);
    return std::clamp(y, x, 1.0);
  }

  /// Generalized inverse inf{x : Psi_t(x) >= y}; at y=1 this is the left
  /// edge of the absorption plateau when one exists.
  double psi_inverse(double t, double y) const {
    check_t(t);
    if (!(y > 0.0) || !(y <= 1.0))
      throw ValidationError("psi_inverse: y must lie in (0,1], got " + std::to_string(y));
    if (t == 0.0) return y;
    if (y == 1.0) {
      if (high_divergent_) return 1.0;
      double v = h_high_ - t;
      return v <= h_low_ ? 0.0 : h_inverse(v);
    }
    double v = h(y) - t;
    if (v <= h_low_) return 0.0;
    return std::min(h_inverse(v), y);
  }

  /// Psi_t(0+); positive exactly when the left tail integral converges.
  double d0plus(double t) const {
    check_t(t);
    if (low_divergent_ || t == 0.0) return 0.0;
    double v = h_low_ + t;
    return v >= h_high_ ? 1.0 : h_inverse(v);
  }

  Distortion distortion_at(double t) const;

 private:
  friend Semigroup build_semigroup(const Generator& g, double accuracy);
  Semigroup(Generator g, double accuracy) : gen_(std::move(g)), accuracy_(accuracy) {}

  void check_t(double t) const {
    if (!(t >= 0.0)) throw ValidationError("flow time t must be >= 0");
  }

  double inv_g(double s) const {
    double g = gen_(s);
    if (!(g > 0.0) || !std::isfinite(g))
      throw NumericError("non-finite or nonpositive generator value at x=" +
                         std::to_string(s));
    return 1.0 / g;
  }

  size_t piece_index(double x) const {
    size_t lo = 0, hi = xs_.size() - 1;
    while (hi - lo > 1) {
      size_t mid = (lo + hi) / 2;
      (xs_[mid] <= x ? lo : hi) = mid;
    }
    return lo;
  }

  double invert_below_table(double v) const {
    // Geometric bracket below the table, then bisection on the slow h().
    double hi = xs_.front(), hhi = hs_.front();
    double lo = hi;
    double hlo = hhi;
    while (hlo > v) {
      hi = lo;
      hhi = hlo;
      lo *= 0.25;
      if (lo < 1e-280) return lo;
      hlo = h(lo);
    }
    for (int i = 0; i < 200; ++i) {
      double m = 0.5 * (lo + hi);
      if (hi - lo < accuracy_ * 0.5) break;
      (h(m) <= v ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
  }

  double invert_above_table(double v) const {
    double lo = xs_.back();
    double hi = lo + 0.5 * (1.0 - lo);
    while (h(hi) < v) {
      lo = hi;
      hi = hi + 0.5 * (1.0 - hi);
      if (1.0 - hi < 1e-15) return hi;
    }
    for (int i = 0; i < 200; ++i) {
      double m = 0.5 * (lo + hi);
      if (hi - lo < accuracy_ * 0.5) break;
      (h(m) <= v ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
  }

  Generator gen_;
  double accuracy_;
  std::vector<double> xs_, hs_, ms_;  // nodes, H values, clamped slopes 1/G
  double h_low_ = -kInf, h_high_ = kInf;
  bool low_divergent_ = true, high_divergent_ = true;
  Confidence tail_confidence_ = Confidence::numeric_confident;
};

namespace detail {

struct SemigroupDist final : DistImpl {
  std::shared_ptr<const Semigroup> sg;
  double t;
  double eval(double p) const override { return sg->psi(t, p); }
  double d0plus() const override { return sg->d0plus(t); }
  double slope_at_1() const override {
    if (!sg->high_divergent()) return 0.0;  // absorption plateau
    const auto& ep = sg->generator().endpoints();
    if (ep.confidence == Confidence::analytic && ep.g1 == 0.0)
      return std::exp(ep.s1 * t);  // boundary-slope law exp(t G'_-(1))
    // Richardson on moderate offsets; smaller ones drown in table noise.
    std::vector<double> q;
    for (int k = 6; k <= 18; ++k) {
      double h = std::pow(0.5, k);
      q.push_back((1.0 - sg->psi(t, 1.0 - h)) / h);
    }
    std::vector<double> r = q;
    for (int j = 1; j <= 2; ++j) {
      std::vector<double> next;
      double p2 = std::pow(2.0, j);
      for (size_t i = 0; i + 1 < r.size(); ++i)
        next.push_back((p2 * r[i + 1] - r[i]) / (p2 - 1.0));
      r = std::move(next);
    }
    return std::max(0.0, r.back());
  }
  std::string describe() const override {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "@t=%.15g", t);
    return sg->generator().spec() + buf;
  }
};

}  // namespace detail

/// Builds the semigroup of a generator. accuracy is the target absolute
/// error of Psi_t evaluations, in [1e-12, 1e-3].
inline Semigroup build_semigroup(const Generator& g, double accuracy = default_accuracy()) {
  if (!(accuracy >= 1e-12) || !(accuracy <= 1e-3))
    throw ValidationError("semigroup accuracy must lie in [1e-12, 1e-3]");
  Semigroup sg(g, accuracy);

  auto inv_g = [&sg](double s) { return sg.inv_g(s); };

  // Base grid: anchor 1/2, geometric approach to both endpoints, plus the
  // generator's own kinks so every quadrature piece is smooth. Points in a
  // floor-clipped zone (clipped knot extrapolations, G ~ 1e-300) are left
  // to the tail probes, which classify them as impassable immediately.
  std::vector<double> base{0.5};
  for (int k = 1; k <= 42; ++k) {
    base.push_back(std::pow(0.5, k));
    base.push_back(1.0 - std::pow(0.5, k));
  }
  for (double kx : g.interior_knots())
    if (kx > base.front() && kx < 1.0 - std::pow(0.5, 42)) base.push_back(kx);
  std::sort(base.begin(), base.end());
  base.erase(std::unique(base.begin(), base.end()), base.end());
  {
    auto degenerate = [&g](double x) { return g(x) <= 1e-250; };
    size_t lo = 0, hi = base.size();
    while (lo < base.size() && base[lo] < 0.5 && degenerate(base[lo])) ++lo;
    while (hi > 0 && base[hi - 1] > 0.5 && degenerate(base[hi - 1])) --hi;
    base = std::vector<double>(base.begin() + lo, base.begin() + hi);
  }

  // Per-interval quadrature with relative-error splitting, then an
  // interpolation-error pass that keeps splitting until the cubic matches
  // direct quadrature at piece midpoints to accuracy/10.
  struct Piece {
    double a, b, dh;
  };
  std::vector<Piece> pieces;
  {
    std::vector<Piece> stack;
    for (size_t i = base.size() - 1; i > 0; --i) {
      double a = base[i - 1], b = base[i];
      stack.push_back({a, b, gauss_legendre_15(inv_g, a, b)});
    }
    while (!stack.empty()) {
      Piece p = stack.back();
      stack.pop_back();
      double m = 0.5 * (p.a + p.b);
      double left = gauss_legendre_15(inv_g, p.a, m);
      double right = gauss_legendre_15(inv_g, m, p.b);
      double err = std::abs(left + right - p.dh);
      if (!std::isfinite(err))
        throw NumericError("semigroup quadrature failed on [" + std::to_string(p.a) +
                           ", " + std::to_string(p.b) + "]");
      if ((err <= 1e-13 * std::abs(left + right) + 1e-16) || m <= p.a || m >= p.b) {
        pieces.push_back(p);
      } else {
        stack.push_back({m, p.b, right});
        stack.push_back({p.a, m, left});
      }
    }
    std::sort(pieces.begin(), pieces.end(),
              [](const Piece& u, const Piece& v) { return u.a < v.a; });
  }

  // Interpolation refinement.
  {
    std::vector<Piece> refined;
    refined.reserve(pieces.size() * 2);
    std::vector<Piece> stack(pieces.rbegin(), pieces.rend());
    const double itol = accuracy / 10.0;
    while (!stack.empty()) {
      Piece p = stack.back();
      stack.pop_back();
      double m = 0.5 * (p.a + p.b);
      if (m <= p.a || m >= p.b) {
        refined.push_back(p);
        continue;
      }
      double left = gauss_legendre_15(inv_g, p.a, m);
      double dx = p.b - p.a;
      double interp = detail::hermite(0.5, 0.0, p.dh, 1.0 / sg.gen_(p.a), 1.0 / sg.gen_(p.b), dx);
      if (std::abs(interp - left) <= itol) {
        refined.push_back(p);
      } else {
        stack.push_back({m, p.b, p.dh - left});
        stack.push_back({p.a, m, left});
      }
    }
    std::sort(refined.begin(), refined.end(),
              [](const Piece& u, const Piece& v) { return u.a < v.a; });
    pieces = std::move(refined);
  }

  // Assemble node arrays anchored at H(1/2) = 0.
  sg.xs_.resize(pieces.size() + 1);
  sg.hs_.resize(pieces.size() + 1);
  sg.ms_.resize(pieces.size() + 1);
  sg.xs_[0] = pieces.front().a;
  for (size_t i = 0; i < pieces.size(); ++i) sg.xs_[i + 1] = pieces[i].b;
  size_t anchor = 0;
  for (size_t i = 0; i < sg.xs_.size(); ++i)
    if (sg.xs_[i] == 0.5) anchor = i;
  sg.hs_[anchor] = 0.0;
  for (size_t i = anchor; i > 0; --i) sg.hs_[i - 1] = sg.hs_[i] - pieces[i - 1].dh;
  for (size_t i = anchor; i < pieces.size(); ++i) sg.hs_[i + 1] = sg.hs_[i] + pieces[i].dh;
  for (size_t i = 0; i < sg.xs_.size(); ++i) sg.ms_[i] = 1.0 / sg.gen_(sg.xs_[i]);
  // Fritsch-Carlson clamp keeps every cubic piece monotone.
  for (size_t i = 0; i + 1 < sg.xs_.size(); ++i) {
    double sigma = (sg.hs_[i + 1] - sg.hs_[i]) / (sg.xs_[i + 1] - sg.xs_[i]);
    sg.ms_[i] = std::min(sg.ms_[i], 3.0 * sigma);
    sg.ms_[i + 1] = std::min(sg.ms_[i + 1], 3.0 * sigma);
  }

  // Endpoint classification.
  TailProbe low = probe_tail_integral(inv_g, sg.xs_.front(), true, accuracy / 100.0);
  TailProbe high = probe_tail_integral(inv_g, std::pow(0.5, 42), false, accuracy / 100.0);
  sg.low_divergent_ = low.divergent;
  sg.high_divergent_ = high.divergent;
  sg.h_low_ = low.divergent ? -kInf : sg.hs_.front() - low.value;
  sg.h_high_ = high.divergent ? kInf : sg.hs_.back() + high.value;
  sg.tail_confidence_ = std::max(low.confidence, high.confidence);
  return sg;
}

inline Distortion Semigroup::distortion_at(double t) const {
  check_t(t);
  if (t == 0.0) return identity_distortion();
  auto impl = std::make_shared<detail::SemigroupDist>();
  impl->sg = std::make_shared<Semigroup>(*this);
  impl->t = t;
  return Distortion(std::move(impl));
}

/// Euler composition (I + (t/n) G)^n (x) with G extended by zero outside
/// (0,1) and iterates clamped to [0,1]; converges to Psi_t(x) as n grows.
inline double euler_composition(const Generator& g, double t, int n, double x) {
  if (n < 1) throw ValidationError("euler_composition: n must be >= 1");
  if (!(t >= 0.0)) throw ValidationError("euler_composition: t must be >= 0");
  if (!(x >= 0.0) || !(x <= 1.0))
    throw ValidationError("euler_composition: x must lie in [0,1]");
  const double step = t / n;
  double y = x;
  for (int i = 0; i < n; ++i) {
    double gy = (y > 0.0 && y < 1.0) ? g(y) : 0.0;
    y = std::clamp(y + step * gy, 0.0, 1.0);
  }
  return y;
}

}  // namespace distortia
