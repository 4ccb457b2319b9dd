#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "distortia/errors.hpp"
#include "distortia/normal.hpp"

namespace distortia {

namespace detail {

struct DistImpl {
  virtual ~DistImpl() = default;
  virtual double eval(double p) const = 0;  // p in (0,1)
  /// 1 - eval(1-w); override where a cancellation-free form exists.
  virtual double loss(double w) const { return 1.0 - eval(1.0 - w); }
  virtual bool has_derivative() const { return false; }
  virtual double derivative(double) const {
    throw NumericError("distortion has no analytic derivative");
  }
  /// Psi'(1-w) in loss coordinates, usable deep in the tail where 1-w is
  /// not representable; default is a central difference on loss().
  virtual double derivative_at_loss(double w) const {
    double step = w * 1e-6;
    return (loss(w + step) - loss(w - step)) / (2.0 * step);
  }
  virtual double d0plus() const {
    double a = eval(std::pow(0.5, 38));
    double b = eval(std::pow(0.5, 39));
    return std::clamp(2.0 * b - a, 0.0, 1.0);
  }
  virtual double slope_at_1() const {
    // One-sided quotients at h = 2^-k with Richardson extrapolation.
    // A quotient that is exactly zero means a plateau at 1.
    std::vector<double> q;
    for (int k = 8; k <= 26; ++k) {
      double h = std::pow(0.5, k);
      double l = loss(h);
      if (l == 0.0) return 0.0;
      q.push_back(l / h);
    }
    std::vector<double> r = q;
    for (int j = 1; j <= 3; ++j) {
      std::vector<double> next;
      double p2 = std::pow(2.0, j);
      for (size_t i = 0; i + 1 < r.size(); ++i)
        next.push_back((p2 * r[i + 1] - r[i]) / (p2 - 1.0));
      r = std::move(next);
    }
    return std::max(0.0, r.back());
  }
  virtual const std::vector<std::pair<double, double>>* pl_points() const { return nullptr; }
  virtual std::string describe() const = 0;
};

}  // namespace detail

/// A concave increasing distortion [0,1]->[0,1] with Psi(0)=0, Psi(1)=1.
/// The value at exactly 0 is 0 by convention; a jump at 0 is recorded as
/// d0plus = Psi(0+).
class Distortion {
 public:
  explicit Distortion(std::shared_ptr<const detail::DistImpl> impl) : impl_(std::move(impl)) {}

  double operator()(double p) const {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    return impl_->eval(p);
  }
  /// 1 - Psi(1-w), accurate for small w.
  double loss(double w) const {
    if (w <= 0.0) return 0.0;
    if (w >= 1.0) return 1.0;
    return impl_->loss(w);
  }
  double d0plus() const { return impl_->d0plus(); }
  double left_slope_at_1() const { return impl_->slope_at_1(); }
  bool has_derivative() const { return impl_->has_derivative(); }
  double derivative(double x) const { return impl_->derivative(x); }
  double derivative_at_loss(double w) const { return impl_->derivative_at_loss(w); }
  const std::vector<std::pair<double, double>>* pl_points() const { return impl_->pl_points(); }
  std::string describe() const { return impl_->describe(); }

 private:
  std::shared_ptr<const detail::DistImpl> impl_;
};

namespace detail {

struct IdentityDist final : DistImpl {
  double eval(double p) const override { return p; }
  double loss(double w) const override { return w; }
  bool has_derivative() const override { return true; }
  double derivative(double) const override { return 1.0; }
  double derivative_at_loss(double) const override { return 1.0; }
  double d0plus() const override { return 0.0; }
  double slope_at_1() const override { return 1.0; }
  std::string describe() const override { return "identity"; }
};

struct PowerDist final : DistImpl {
  double p;  // Psi(x) = x^p, p in (0,1]
  explicit PowerDist(double p_) : p(p_) {}
  double eval(double x) const override { return std::pow(x, p); }
  double loss(double w) const override { return -std::expm1(p * std::log1p(-w)); }
  bool has_derivative() const override { return true; }
  double derivative(double x) const override { return p * std::pow(x, p - 1.0); }
  double derivative_at_loss(double w) const override {
    return p * std::exp((p - 1.0) * std::log1p(-w));
  }
  double d0plus() const override { return 0.0; }
  double slope_at_1() const override { return p; }
  std::string describe() const override {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "pow(%.15g)", p);
    return buf;
  }
};

struct ClampDist final : DistImpl {
  double c;  // Psi(x) = min(c x, 1), c >= 1
  explicit ClampDist(double c_) : c(c_) {}
  double eval(double x) const override { return std::min(c * x, 1.0); }
  double loss(double w) const override { return std::max(c * w - (c - 1.0), 0.0); }
  bool has_derivative() const override { return true; }
  double derivative(double x) const override { return x * c < 1.0 ? c : 0.0; }
  double derivative_at_loss(double w) const override {
    return w > 1.0 - 1.0 / c ? c : 0.0;
  }
  double d0plus() const override { return 0.0; }
  double slope_at_1() const override { return c > 1.0 ? 0.0 : 1.0; }
  std::string describe() const override {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "clamp(%.15g)", c);
    return buf;
  }
};

struct WangShiftDist final : DistImpl {
  double t;  // Psi(x) = Phi(Phi^-1(x) + t), t >= 0
  explicit WangShiftDist(double t_) : t(t_) {}
  double eval(double x) const override { return norm_cdf(norm_quantile(x) + t); }
  double loss(double w) const override { return norm_sf(norm_isf(w) + t); }
  bool has_derivative() const override { return true; }
  double derivative(double x) const override {
    double z = norm_quantile(x);
    return std::exp(-t * z - 0.5 * t * t);
  }
  double derivative_at_loss(double w) const override {
    double z = norm_isf(w);
    return std::exp(-t * z - 0.5 * t * t);
  }
  double d0plus() const override { return 0.0; }
  double slope_at_1() const override { return t > 0.0 ? 0.0 : 1.0; }
  std::string describe() const override {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "wangshift(%.15g)", t);
    return buf;
  }
};

struct PowerComplementDist final : DistImpl {
  double q;  // Psi(x) = 1 - (1-x)^q, q >= 1
  explicit PowerComplementDist(double q_) : q(q_) {}
  double eval(double x) const override { return -std::expm1(q * std::log1p(-x)); }
  double loss(double w) const override { return std::pow(w, q); }
  bool has_derivative() const override { return true; }
  double derivative(double x) const override {
    return q * std::exp((q - 1.0) * std::log1p(-x));
  }
  double derivative_at_loss(double w) const override { return q * std::pow(w, q - 1.0); }
  double d0plus() const override { return 0.0; }
  double slope_at_1() const override { return q > 1.0 ? 0.0 : 1.0; }
  std::string describe() const override {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "powc(%.15g)", q);
    return buf;
  }
};

struct PiecewiseLinearDist final : DistImpl {
  std::vector<std::pair<double, double>> pts;  // includes (0, d0plus) and (1, 1)
  double eval(double p) const override {
    auto it = std::upper_bound(pts.begin(), pts.end(), p,
                               [](double v, const auto& q) { return v < q.first; });
    size_t i = static_cast<size_t>(it - pts.begin());
    if (i == 0) return pts.front().second;
    if (i == pts.size()) return pts.back().second;
    const auto& [x0, y0] = pts[i - 1];
    const auto& [x1, y1] = pts[i];
    return y0 + (y1 - y0) * (p - x0) / (x1 - x0);
  }
  double loss(double w) const override {
    const auto& [x0, y0] = pts[pts.size() - 2];
    double s = (1.0 - y0) / (1.0 - x0);
    if (1.0 - w >= x0) return s * w;
    return 1.0 - eval(1.0 - w);
  }
  bool has_derivative() const override { return true; }
  double derivative(double x) const override {
    auto it = std::upper_bound(pts.begin(), pts.end(), x,
                               [](double v, const auto& q) { return v < q.first; });
    size_t i = static_cast<size_t>(it - pts.begin());
    if (i == 0) i = 1;
    if (i == pts.size()) i = pts.size() - 1;
    return (pts[i].second - pts[i - 1].second) / (pts[i].first - pts[i - 1].first);
  }
  double derivative_at_loss(double w) const override {
    const auto& [x0, y0] = pts[pts.size() - 2];
    if (1.0 - w >= x0) return (1.0 - y0) / (1.0 - x0);
    return derivative(1.0 - w);
  }
  double d0plus() const override { return pts.front().second; }
  double slope_at_1() const override {
    const auto& [x0, y0] = pts[pts.size() - 2];
    return (1.0 - y0) / (1.0 - x0);
  }
  const std::vector<std::pair<double, double>>* pl_points() const override { return &pts; }
  std::string describe() const override { return "piecewise-linear"; }
};

struct CrarocDist final : DistImpl {
  std::shared_ptr<const DistImpl> base;
  double t;  // Psi_t(x) = (x + t Psi(x)) / (1 + t)
  double eval(double x) const override { return (x + t * base->eval(x)) / (1.0 + t); }
  double loss(double w) const override { return (w + t * base->loss(w)) / (1.0 + t); }
  bool has_derivative() const override { return base->has_derivative(); }
  double derivative(double x) const override {
    return (1.0 + t * base->derivative(x)) / (1.0 + t);
  }
  double derivative_at_loss(double w) const override {
    return (1.0 + t * base->derivative_at_loss(w)) / (1.0 + t);
  }
  double d0plus() const override { return t * base->d0plus() / (1.0 + t); }
  double slope_at_1() const override { return (1.0 + t * base->slope_at_1()) / (1.0 + t); }
  std::string describe() const override {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "craroc(%.15g,%s)", t, base->describe().c_str());
    return buf;
  }
};

}  // namespace detail

inline Distortion identity_distortion() {
  return Distortion(std::make_shared<detail::IdentityDist>());
}

/// Psi(x) = x^p with p in (0,1]; p = e^{-t} gives the AIMAX family member.
inline Distortion power_distortion(double p) {
  if (!(p > 0.0) || p > 1.0)
    throw ValidationError("power distortion exponent must lie in (0,1]");
  if (p == 1.0) return identity_distortion();
  return Distortion(std::make_shared<detail::PowerDist>(p));
}

/// Psi(x) = min(c x, 1) with c >= 1; c = e^t gives the CV@R family member.
inline Distortion clamp_distortion(double c) {
  if (!(c >= 1.0)) throw ValidationError("clamp distortion factor must be >= 1");
  return Distortion(std::make_shared<detail::ClampDist>(c));
}

/// Psi(x) = Phi(Phi^-1(x) + t) with t >= 0 (Wang transform).
inline Distortion wang_distortion(double t) {
  if (!(t >= 0.0)) throw ValidationError("wang distortion shift must be >= 0");
  return Distortion(std::make_shared<detail::WangShiftDist>(t));
}

/// Psi(x) = 1 - (1-x)^q with q >= 1; q = e^t gives the AIMIN family member.
inline Distortion power_complement_distortion(double q) {
  if (!(q >= 1.0)) throw ValidationError("complement-power exponent must be >= 1");
  return Distortion(std::make_shared<detail::PowerComplementDist>(q));
}

/// Concave piecewise-linear distortion through (x, psi) points. A leading
/// (0, y) row with y > 0 records a jump at 0. Rejects non-concave or
/// non-monotone tables.
inline Distortion piecewise_linear_distortion(std::vector<std::pair<double, double>> points) {
  std::sort(points.begin(), points.end());
  if (points.empty() || points.front().first > 0.0) points.insert(points.begin(), {0.0, 0.0});
  if (points.back().first != 1.0)
    throw ValidationError("distortion table must include x=1");
  if (std::abs(points.back().second - 1.0) > 1e-12)
    throw ValidationError("distortion table must have psi(1)=1");
  points.back().second = 1.0;
  for (size_t i = 0; i + 1 < points.size(); ++i)
    if (points[i + 1].first <= points[i].first)
      throw ValidationError("distortion table x values must be strictly increasing");
  std::vector<double> slopes;
  for (size_t i = 0; i + 1 < points.size(); ++i) {
    double s = (points[i + 1].second - points[i].second) /
               (points[i + 1].first - points[i].first);
    if (s < -1e-15) throw ValidationError("distortion table must be nondecreasing");
    slopes.push_back(s);
  }
  for (size_t i = 0; i + 1 < slopes.size(); ++i)
    if (slopes[i] < slopes[i + 1] - 1e-12)
      throw ValidationError("distortion table is not concave between x=" +
                            std::to_string(points[i].first) + " and x=" +
                            std::to_string(points[i + 2].first));
  for (const auto& [x, y] : points)
    if (y < 0.0 || y > 1.0) throw ValidationError("distortion values must lie in [0,1]");
  auto impl = std::make_shared<detail::PiecewiseLinearDist>();
  impl->pts = std::move(points);
  return Distortion(std::move(impl));
}

}  // namespace distortia
