#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "distortia/errors.hpp"
#include "distortia/normal.hpp"

namespace distortia {

enum class BuiltinGenerator { cvar, aimin, aimax, wang };

inline const char* to_string(BuiltinGenerator b) {
  switch (b) {
    case BuiltinGenerator::cvar: return "cvar";
    case BuiltinGenerator::aimin: return "aimin";
    case BuiltinGenerator::aimax: return "aimax";
    default: return "wang";
  }
}

/// Boundary data of a generator: limits g0 = G(0+), g1 = G(1-) and
/// one-sided slopes s0 = G'_+(0) in (0,+inf], s1 = G'_-(1) in [-inf,+inf).
struct GeneratorEndpoints {
  double g0 = 0.0;
  double g1 = 0.0;
  double s0 = kInf;
  double s1 = -kInf;
  Confidence confidence = Confidence::analytic;
};

struct Knot {
  double x;
  double g;
};

namespace detail {

constexpr double kPositivityFloor = 1e-300;

struct GenImpl {
  virtual ~GenImpl() = default;
  virtual double eval(double x) const = 0;
  /// G(1-w) for tiny w, avoiding the 1-w rounding loss; composites route
  /// through this so duals keep full tail resolution.
  virtual double eval_complement(double w) const { return eval(1.0 - w); }
  /// Interior kink locations (for quadrature interval alignment).
  virtual std::vector<double> kinks() const { return {}; }
};

struct BuiltinImpl final : GenImpl {
  BuiltinGenerator which;
  explicit BuiltinImpl(BuiltinGenerator b) : which(b) {}
  double eval(double x) const override {
    x = std::clamp(x, 1e-300, 1.0 - 1e-16);
    switch (which) {
      case BuiltinGenerator::cvar: return x;
      case BuiltinGenerator::aimin: return -(1.0 - x) * std::log1p(-x);
      case BuiltinGenerator::aimax: return -x * std::log(x);
      default: return norm_pdf(norm_quantile(x));
    }
  }
  double eval_complement(double w) const override {
    w = std::clamp(w, 1e-300, 1.0);
    switch (which) {
      case BuiltinGenerator::cvar: return 1.0 - w;
      case BuiltinGenerator::aimin: return -w * std::log(w);
      case BuiltinGenerator::aimax: return -(1.0 - w) * std::log1p(-w);
      default: return norm_pdf(norm_isf(w));
    }
  }
};

struct KnotImpl final : GenImpl {
  std::vector<double> xs, gs, slopes;  // slopes[i] over [xs[i], xs[i+1]]
  double eval(double x) const override {
    if (x <= xs.front())
      return std::max(gs.front() + slopes.front() * (x - xs.front()), kPositivityFloor);
    if (x >= xs.back())
      return std::max(gs.back() + slopes.back() * (x - xs.back()), kPositivityFloor);
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    size_t i = static_cast<size_t>(it - xs.begin()) - 1;
    return std::max(gs[i] + slopes[i] * (x - xs[i]), kPositivityFloor);
  }
  std::vector<double> kinks() const override { return xs; }
};

struct ScaleImpl final : GenImpl {
  double lambda;
  std::shared_ptr<const GenImpl> op;
  double eval(double x) const override { return lambda * op->eval(x); }
  double eval_complement(double w) const override { return lambda * op->eval_complement(w); }
  std::vector<double> kinks() const override { return op->kinks(); }
};

struct DualImpl final : GenImpl {
  std::shared_ptr<const GenImpl> op;
  double eval(double x) const override {
    // near 0 the complement path keeps the operand's tail resolution
    return x < 0.5 ? op->eval_complement(x) : op->eval(1.0 - x);
  }
  double eval_complement(double w) const override { return op->eval(w); }
  std::vector<double> kinks() const override {
    auto ks = op->kinks();
    for (double& k : ks) k = 1.0 - k;
    std::sort(ks.begin(), ks.end());
    return ks;
  }
};

struct SumImpl final : GenImpl {
  std::shared_ptr<const GenImpl> a, b;
  double eval(double x) const override { return a->eval(x) + b->eval(x); }
  double eval_complement(double w) const override {
    return a->eval_complement(w) + b->eval_complement(w);
  }
  std::vector<double> kinks() const override {
    auto ks = a->kinks();
    auto kb = b->kinks();
    ks.insert(ks.end(), kb.begin(), kb.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
  }
};

/// Bisects for a sign change of a-b inside (lo, hi).
inline double refine_crossing(const GenImpl& a, const GenImpl& b, double lo, double hi) {
  double flo = a.eval(lo) - b.eval(lo);
  for (int i = 0; i < 60; ++i) {
    double m = 0.5 * (lo + hi);
    double fm = a.eval(m) - b.eval(m);
    if ((flo <= 0.0) == (fm <= 0.0)) {
      lo = m;
      flo = fm;
    } else {
      hi = m;
    }
  }
  return 0.5 * (lo + hi);
}

/// Merged sampling grid used by min/envelope composites: operand kinks,
/// a uniform interior grid, geometric endpoint refinement, and the
/// operand crossing points (kinks of min/max).
inline std::vector<double> merged_grid(const GenImpl& a, const GenImpl& b) {
  std::vector<double> xs;
  xs.reserve(4200);
  for (int i = 1; i < 4096; ++i) xs.push_back(i / 4096.0);
  for (int k = 13; k <= 40; ++k) {
    xs.push_back(std::pow(0.5, k));
    xs.push_back(1.0 - std::pow(0.5, k));
  }
  for (double k : a.kinks())
    if (k > 0.0 && k < 1.0) xs.push_back(k);
  for (double k : b.kinks())
    if (k > 0.0 && k < 1.0) xs.push_back(k);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> crossings;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double d0 = a.eval(xs[i]) - b.eval(xs[i]);
    double d1 = a.eval(xs[i + 1]) - b.eval(xs[i + 1]);
    if ((d0 < 0.0) != (d1 < 0.0))
      crossings.push_back(refine_crossing(a, b, xs[i], xs[i + 1]));
  }
  xs.insert(xs.end(), crossings.begin(), crossings.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

struct MinImpl final : GenImpl {
  std::shared_ptr<const GenImpl> a, b;
  std::vector<double> crossing_kinks;
  MinImpl(std::shared_ptr<const GenImpl> a_, std::shared_ptr<const GenImpl> b_)
      : a(std::move(a_)), b(std::move(b_)) {
    auto grid = merged_grid(*a, *b);
    for (size_t i = 0; i + 1 < grid.size(); ++i) {
      double d0 = a->eval(grid[i]) - b->eval(grid[i]);
      double d1 = a->eval(grid[i + 1]) - b->eval(grid[i + 1]);
      if ((d0 < 0.0) != (d1 < 0.0)) crossing_kinks.push_back(grid[i + 1]);
    }
  }
  double eval(double x) const override { return std::min(a->eval(x), b->eval(x)); }
  double eval_complement(double w) const override {
    return std::min(a->eval_complement(w), b->eval_complement(w));
  }
  std::vector<double> kinks() const override {
    auto ks = a->kinks();
    auto kb = b->kinks();
    ks.insert(ks.end(), kb.begin(), kb.end());
    ks.insert(ks.end(), crossing_kinks.begin(), crossing_kinks.end());
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
    return ks;
  }
};

/// Dense sampling grid for the concave envelope: a fine uniform core plus
/// per-octave refinement toward both endpoints, operand kinks, and branch
/// crossings. Densities are chosen so that the piecewise-linear hull of
/// the sampled max stays within ~1e-9 of the smooth envelope in flow
/// terms (the chord dip below a smooth branch scales with the squared
/// local spacing times curvature, and curvature of admissible generators
/// grows like 1/x toward the endpoints).
inline std::vector<double> dense_envelope_grid(const GenImpl& a, const GenImpl& b) {
  std::vector<double> xs;
  xs.reserve(260000);
  const double core_lo = 1.0 / 64, core_hi = 1.0 - 1.0 / 64;
  const double core_step = std::pow(0.5, 17);
  for (double x = core_lo; x < core_hi; x += core_step) xs.push_back(x);
  xs.push_back(core_hi);
  for (int k = 6; k <= 40; ++k) {
    int per_octave = k <= 20 ? 4096 : 512;
    double lo = std::pow(0.5, k + 1), hi = std::pow(0.5, k);
    double step = (hi - lo) / per_octave;
    for (int i = 0; i < per_octave; ++i) {
      double off = lo + i * step;
      xs.push_back(off);
      xs.push_back(1.0 - off);
    }
  }
  for (double kx : a.kinks())
    if (kx > 0.0 && kx < 1.0) xs.push_back(kx);
  for (double kx : b.kinks())
    if (kx > 0.0 && kx < 1.0) xs.push_back(kx);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::vector<double> crossings;
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double d0 = a.eval(xs[i]) - b.eval(xs[i]);
    double d1 = a.eval(xs[i + 1]) - b.eval(xs[i + 1]);
    if ((d0 < 0.0) != (d1 < 0.0))
      crossings.push_back(refine_crossing(a, b, xs[i], xs[i + 1]));
  }
  xs.insert(xs.end(), crossings.begin(), crossings.end());
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return xs;
}

/// Least concave majorant of max(a,b): the piecewise-linear upper concave
/// hull of the densely sampled pointwise max (exact for piecewise-linear
/// operands, whose kinks and crossings are all sample points). A hull is
/// concave to machine precision by construction, which the construction
/// validator requires.
struct EnvelopeImpl final : GenImpl {
  std::vector<double> hx, hy;  // hull vertices
  double slope_lo = 0.0, slope_hi = 0.0;

  EnvelopeImpl(const GenImpl& a, const GenImpl& b) {
    auto xs = dense_envelope_grid(a, b);
    std::vector<double> vs(xs.size());
    for (size_t i = 0; i < xs.size(); ++i) vs[i] = std::max(a.eval(xs[i]), b.eval(xs[i]));
    std::vector<size_t> hull;
    auto below = [&](size_t p, size_t q, size_t r) {
      // q on or below chord p..r
      return (vs[q] - vs[p]) * (xs[r] - xs[p]) <= (vs[r] - vs[p]) * (xs[q] - xs[p]);
    };
    for (size_t i = 0; i < xs.size(); ++i) {
      while (hull.size() >= 2 && below(hull[hull.size() - 2], hull.back(), i))
        hull.pop_back();
      hull.push_back(i);
    }
    hx.reserve(hull.size());
    hy.reserve(hull.size());
    for (size_t i : hull) {
      hx.push_back(xs[i]);
      hy.push_back(vs[i]);
    }
    slope_lo = (hy[1] - hy[0]) / (hx[1] - hx[0]);
    size_t n = hx.size();
    slope_hi = (hy[n - 1] - hy[n - 2]) / (hx[n - 1] - hx[n - 2]);
  }

  double eval(double x) const override {
    if (x <= hx.front())
      return std::max(hy.front() + slope_lo * (x - hx.front()), kPositivityFloor);
    if (x >= hx.back())
      return std::max(hy.back() + slope_hi * (x - hx.back()), kPositivityFloor);
    auto it = std::upper_bound(hx.begin(), hx.end(), x);
    size_t i = static_cast<size_t>(it - hx.begin()) - 1;
    return hy[i] + (hy[i + 1] - hy[i]) * (x - hx[i]) / (hx[i + 1] - hx[i]);
  }
  std::vector<double> kinks() const override { return hx; }
};

/// Numeric endpoint estimation from geometrically shrinking offsets.
/// Concavity makes the boundary difference quotients monotone, so a
/// quotient sequence whose increments keep failing to decay is classified
/// as an infinite slope.
inline GeneratorEndpoints estimate_endpoints(const GenImpl& g) {
  GeneratorEndpoints ep;
  ep.confidence = Confidence::numeric_confident;

  auto classify = [](const std::vector<double>& q, double& slope, Confidence& conf) {
    // q: |difference quotients|, nondecreasing. Returns finite limit or inf.
    std::vector<double> d;
    for (size_t i = 1; i < q.size(); ++i) d.push_back(q[i] - q[i - 1]);
    double qlast = q.back();
    double dlast = std::abs(d.back());
    if (qlast > 1e8) {
      slope = kInf;
      return;
    }
    if (dlast <= 1e-12 * (1.0 + std::abs(qlast))) {
      slope = qlast;
      return;
    }
    double ratio = std::abs(d[d.size() - 1]) / std::max(std::abs(d[d.size() - 2]), 1e-300);
    double ratio2 = std::abs(d[d.size() - 2]) / std::max(std::abs(d[d.size() - 3]), 1e-300);
    double r = 0.5 * (ratio + ratio2);
    if (r >= 0.8) {
      slope = kInf;
      if (r < 0.95) conf = Confidence::numeric_borderline;
    } else if (r <= 0.6) {
      slope = qlast + dlast * r / (1.0 - r) * (d.back() > 0 ? 1.0 : -1.0);
    } else {
      slope = r > 0.7 ? kInf : qlast;
      conf = Confidence::numeric_borderline;
    }
  };

  {  // left endpoint
    std::vector<double> a;
    for (int k = 4; k <= 45; ++k) a.push_back(g.eval(std::pow(0.5, k)));
    double g0 = std::max(0.0, 2.0 * a.back() - a[a.size() - 2]);
    if (g0 < 1e-13) g0 = 0.0;
    ep.g0 = g0;
    std::vector<double> q;
    for (int k = 4; k <= 45; ++k) q.push_back((a[k - 4] - g0) * std::pow(2.0, k));
    double s = 0.0;
    classify(q, s, ep.confidence);
    ep.s0 = s;
  }
  {  // right endpoint
    std::vector<double> a;
    for (int k = 4; k <= 49; ++k) a.push_back(g.eval(1.0 - std::pow(0.5, k)));
    double g1 = std::max(0.0, 2.0 * a.back() - a[a.size() - 2]);
    if (g1 < 1e-13) g1 = 0.0;
    ep.g1 = g1;
    // s1 = lim (G(1-w) - g1)/(-w); track the quotient magnitude and the
    // sign of the approach separately.
    std::vector<double> q;
    for (int k = 4; k <= 49; ++k) q.push_back(std::abs(a[k - 4] - g1) * std::pow(2.0, k));
    double s = 0.0;
    classify(q, s, ep.confidence);
    ep.s1 = (a.back() >= g1) ? -s : s;
    if (std::isinf(s)) ep.s1 = -kInf;
  }
  return ep;
}

}  // namespace detail

/// A concave positive function G:(0,1)->(0,inf). Immutable after
/// construction; construction validates positivity and concavity on a
/// 1001-point grid (tolerance 1e-10 * max G).
class Generator {
 public:
  double operator()(double x) const { return impl_->eval(x); }
  const GeneratorEndpoints& endpoints() const { return endpoints_; }
  double max_value() const { return gmax_; }
  const std::string& spec() const { return spec_; }
  std::vector<double> interior_knots() const { return impl_->kinks(); }
  const detail::GenImpl& impl() const { return *impl_; }
  std::shared_ptr<const detail::GenImpl> impl_ptr() const { return impl_; }

  static Generator from_impl(std::shared_ptr<const detail::GenImpl> impl,
                             GeneratorEndpoints ep, std::string spec) {
    Generator g;
    g.impl_ = std::move(impl);
    g.endpoints_ = ep;
    g.spec_ = std::move(spec);
    g.validate();
    return g;
  }

 private:
  Generator() = default;

  void validate() {
    const int n = 1001;
    std::vector<double> v(n);
    gmax_ = 0.0;
    for (int i = 0; i < n; ++i) {
      double x = (i + 1) / static_cast<double>(n + 1);
      v[i] = impl_->eval(x);
      if (!(v[i] > 0.0) || !std::isfinite(v[i])) {
        std::ostringstream os;
        os << "generator '" << spec_ << "' is not positive at x=" << x << " (G=" << v[i] << ")";
        throw ValidationError(os.str());
      }
      gmax_ = std::max(gmax_, v[i]);
    }
    const double tol = 1e-10 * gmax_;
    const double h = 1.0 / (n + 1);
    for (int i = 1; i + 1 < n; ++i) {
      double sl = (v[i] - v[i - 1]) / h;
      double sr = (v[i + 1] - v[i]) / h;
      if (sl < sr - tol) {
        std::ostringstream os;
        double xa = i / static_cast<double>(n + 1);
        os << "generator '" << spec_ << "' fails concavity at triple (" << xa << ", "
           << xa + h << ", " << xa + 2 * h << "): slopes " << sl << " < " << sr;
        throw ValidationError(os.str());
      }
    }
  }

  std::shared_ptr<const detail::GenImpl> impl_;
  GeneratorEndpoints endpoints_;
  double gmax_ = 0.0;
  std::string spec_;
};

inline Generator make_builtin_generator(BuiltinGenerator which) {
  GeneratorEndpoints ep;
  switch (which) {
    case BuiltinGenerator::cvar: ep = {0.0, 1.0, 1.0, 1.0, Confidence::analytic}; break;
    case BuiltinGenerator::aimin: ep = {0.0, 0.0, 1.0, -kInf, Confidence::analytic}; break;
    case BuiltinGenerator::aimax: ep = {0.0, 0.0, kInf, -1.0, Confidence::analytic}; break;
    case BuiltinGenerator::wang: ep = {0.0, 0.0, kInf, -kInf, Confidence::analytic}; break;
  }
  return Generator::from_impl(std::make_shared<detail::BuiltinImpl>(which), ep,
                              to_string(which));
}

inline Generator make_builtin_generator(const std::string& name) {
  if (name == "cvar") return make_builtin_generator(BuiltinGenerator::cvar);
  if (name == "aimin") return make_builtin_generator(BuiltinGenerator::aimin);
  if (name == "aimax") return make_builtin_generator(BuiltinGenerator::aimax);
  if (name == "wang") return make_builtin_generator(BuiltinGenerator::wang);
  throw ValidationError("unknown builtin generator '" + name + "'");
}

/// Piecewise-linear generator through the given knots, extended to the
/// endpoints along the boundary slopes and clipped below at 1e-300.
inline Generator make_knot_generator(std::vector<Knot> knots,
                                     std::string label = "knots:<memory>") {
  if (knots.size() < 2) throw ValidationError("knot generator needs at least 2 knots");
  auto impl = std::make_shared<detail::KnotImpl>();
  for (size_t i = 0; i < knots.size(); ++i) {
    const auto& k = knots[i];
    if (!(k.x > 0.0) || !(k.x < 1.0))
      throw ValidationError("knot x must lie in (0,1), got " + std::to_string(k.x));
    if (!(k.g > 0.0))
      throw ValidationError("knot value must be positive, got g=" + std::to_string(k.g) +
                            " at x=" + std::to_string(k.x));
    if (i > 0 && !(k.x > knots[i - 1].x))
      throw ValidationError("knot x values must be strictly increasing");
    impl->xs.push_back(k.x);
    impl->gs.push_back(k.g);
  }
  for (size_t i = 0; i + 1 < knots.size(); ++i)
    impl->slopes.push_back((impl->gs[i + 1] - impl->gs[i]) / (impl->xs[i + 1] - impl->xs[i]));
  double smax = 0.0;
  for (double s : impl->slopes) smax = std::max(smax, std::abs(s));
  for (size_t i = 0; i + 1 < impl->slopes.size(); ++i) {
    if (impl->slopes[i] < impl->slopes[i + 1] - 1e-12 * (1.0 + smax)) {
      std::ostringstream os;
      os << "knots are not concave at triple (" << impl->xs[i] << ", " << impl->xs[i + 1]
         << ", " << impl->xs[i + 2] << "): slope increases " << impl->slopes[i] << " -> "
         << impl->slopes[i + 1];
      throw ValidationError(os.str());
    }
  }
  GeneratorEndpoints ep;
  ep.g0 = std::max(0.0, impl->gs.front() - impl->slopes.front() * impl->xs.front());
  ep.g1 = std::max(0.0, impl->gs.back() + impl->slopes.back() * (1.0 - impl->xs.back()));
  ep.s0 = impl->slopes.front();
  ep.s1 = impl->slopes.back();
  ep.confidence = Confidence::analytic;
  return Generator::from_impl(std::move(impl), ep, std::move(label));
}

inline Generator scale_generator(double lambda, const Generator& g) {
  if (!(lambda > 0.0)) throw ValidationError("scale factor must be positive");
  auto impl = std::make_shared<detail::ScaleImpl>();
  impl->lambda = lambda;
  impl->op = g.impl_ptr();
  GeneratorEndpoints ep = g.endpoints();
  ep.g0 *= lambda;
  ep.g1 *= lambda;
  ep.s0 *= lambda;
  ep.s1 *= lambda;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.15g", lambda);
  return Generator::from_impl(std::move(impl), ep,
                              "scale(" + std::string(buf) + "," + g.spec() + ")");
}

inline Generator dual_generator(const Generator& g) {
  auto impl = std::make_shared<detail::DualImpl>();
  impl->op = g.impl_ptr();
  const auto& e = g.endpoints();
  GeneratorEndpoints ep{e.g1, e.g0, -e.s1, -e.s0, e.confidence};
  return Generator::from_impl(std::move(impl), ep, "dual(" + g.spec() + ")");
}

inline Generator sum_generators(const Generator& a, const Generator& b) {
  auto impl = std::make_shared<detail::SumImpl>();
  impl->a = a.impl_ptr();
  impl->b = b.impl_ptr();
  const auto &ea = a.endpoints(), &eb = b.endpoints();
  GeneratorEndpoints ep;
  ep.g0 = ea.g0 + eb.g0;
  ep.g1 = ea.g1 + eb.g1;
  ep.s0 = ea.s0 + eb.s0;
  ep.s1 = ea.s1 + eb.s1;
  ep.confidence = std::max(ea.confidence, eb.confidence);
  return Generator::from_impl(std::move(impl), ep, "mix(" + a.spec() + "," + b.spec() + ")");
}

inline Generator min_generators(const Generator& a, const Generator& b) {
  auto impl = std::make_shared<detail::MinImpl>(a.impl_ptr(), b.impl_ptr());
  GeneratorEndpoints ep = detail::estimate_endpoints(*impl);
  return Generator::from_impl(std::move(impl), ep, "min(" + a.spec() + "," + b.spec() + ")");
}

inline Generator concave_majorant_max(const Generator& a, const Generator& b) {
  auto impl = std::make_shared<detail::EnvelopeImpl>(a.impl(), b.impl());
  GeneratorEndpoints ep = detail::estimate_endpoints(*impl);
  return Generator::from_impl(std::move(impl), ep, "max(" + a.spec() + "," + b.spec() + ")");
}

inline GeneratorEndpoints endpoint_slopes(const Generator& g) { return g.endpoints(); }

/// Re-runs the numeric endpoint estimator regardless of stored analytic
/// data (used to cross-check the classification heuristics).
inline GeneratorEndpoints numeric_endpoint_estimate(const Generator& g) {
  return detail::estimate_endpoints(g.impl());
}

}  // namespace distortia
