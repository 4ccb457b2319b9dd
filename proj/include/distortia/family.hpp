#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "distortia/distortion.hpp"
#include "distortia/errors.hpp"
#include "distortia/generator.hpp"
#include "distortia/normal.hpp"
#include "distortia/semigroup.hpp"

namespace distortia {

/// An evaluable family of distortions indexed by t >= 0. Not every family
/// is a distortion semigroup; semigroup-only operations must check the flag.
class DistortionFamily {
 public:
  virtual ~DistortionFamily() = default;
  virtual double psi(double t, double x) const = 0;
  virtual Distortion distortion_at(double t) const = 0;
  virtual bool is_semigroup() const = 0;
  virtual std::string name() const = 0;
};

/// Exact closed forms of the four builtin semigroups; the testing oracle
/// for table-built flows.
class ClosedFormFamily final : public DistortionFamily {
 public:
  explicit ClosedFormFamily(BuiltinGenerator which) : which_(which) {}

  double psi(double t, double x) const override {
    if (!(t >= 0.0)) throw ValidationError("flow time t must be >= 0");
    if (x <= 0.0) return 0.0;  // all four closed forms have Psi_t(0+) = 0
    if (x >= 1.0) return 1.0;
    switch (which_) {
      case BuiltinGenerator::cvar: return std::min(std::exp(t) * x, 1.0);
      case BuiltinGenerator::aimin: return -std::expm1(std::exp(t) * std::log1p(-x));
      case BuiltinGenerator::aimax: return std::pow(x, std::exp(-t));
      default: return norm_cdf(norm_quantile(x) + t);
    }
  }

  Distortion distortion_at(double t) const override {
    if (!(t >= 0.0)) throw ValidationError("flow time t must be >= 0");
    if (t == 0.0) return identity_distortion();
    switch (which_) {
      case BuiltinGenerator::cvar: return clamp_distortion(std::exp(t));
      case BuiltinGenerator::aimin: return power_complement_distortion(std::exp(t));
      case BuiltinGenerator::aimax: return power_distortion(std::exp(-t));
      default: return wang_distortion(t);
    }
  }

  bool is_semigroup() const override { return true; }
  std::string name() const override { return std::string("closed-form ") + to_string(which_); }

 private:
  BuiltinGenerator which_;
};

inline ClosedFormFamily closed_form_family(BuiltinGenerator which) {
  return ClosedFormFamily(which);
}

/// Table-backed semigroup viewed through the family interface.
class SemigroupFamily final : public DistortionFamily {
 public:
  explicit SemigroupFamily(Semigroup sg) : sg_(std::move(sg)) {}
  double psi(double t, double x) const override { return sg_.psi(t, x); }
  Distortion distortion_at(double t) const override { return sg_.distortion_at(t); }
  bool is_semigroup() const override { return true; }
  std::string name() const override { return sg_.generator().spec(); }
  const Semigroup& semigroup() const { return sg_; }

 private:
  Semigroup sg_;
};

/// The CRAROC comparison family Psi_t(x) = (x + t Psi(x)) / (1 + t).
/// Increasing and concave in x for every t, but not a semigroup: its
/// t->inf limit is Psi, not 1.
class CrarocFamily final : public DistortionFamily {
 public:
  explicit CrarocFamily(Distortion base) : base_(std::move(base)) {}

  double psi(double t, double x) const override {
    if (!(t >= 0.0)) throw ValidationError("family time t must be >= 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return (x + t * base_(x)) / (1.0 + t);
  }

  Distortion distortion_at(double t) const override;

  bool is_semigroup() const override { return false; }
  std::string name() const override { return "craroc(" + base_.describe() + ")"; }

 private:
  Distortion base_;
};

inline CrarocFamily craroc_family(Distortion base) { return CrarocFamily(std::move(base)); }

namespace detail {

struct CrarocFromBase final : DistImpl {
  Distortion base;
  double t;
  CrarocFromBase(Distortion b, double t_) : base(std::move(b)), t(t_) {}
  double eval(double x) const override { return (x + t * base(x)) / (1.0 + t); }
  double loss(double w) const override { return (w + t * base.loss(w)) / (1.0 + t); }
  bool has_derivative() const override { return base.has_derivative(); }
  double derivative(double x) const override {
    return (1.0 + t * base.derivative(x)) / (1.0 + t);
  }
  double derivative_at_loss(double w) const override {
    return (1.0 + t * base.derivative_at_loss(w)) / (1.0 + t);
  }
  double d0plus() const override { return t * base.d0plus() / (1.0 + t); }
  double slope_at_1() const override {
    return (1.0 + t * base.left_slope_at_1()) / (1.0 + t);
  }
  std::string describe() const override {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "craroc@t=%.15g ", t);
    return buf + base.describe();
  }
};

}  // namespace detail

inline Distortion CrarocFamily::distortion_at(double t) const {
  if (!(t >= 0.0)) throw ValidationError("family time t must be >= 0");
  return Distortion(std::make_shared<detail::CrarocFromBase>(base_, t));
}

struct ExtractionResult {
  double value = 0.0;
  double error_estimate = kInf;
  int quotients = 0;
  bool converged = false;
};

/// Recovers G(x) = lim_{t->0} (Psi_t(x) - x)/t by Richardson extrapolation
/// over halving t. Relative error <= 1e-4 for smooth families.
inline ExtractionResult extract_generator(const DistortionFamily& family, double x,
                                          double t0 = 0.00390625, int levels = 13) {
  if (!(x > 0.0) || !(x < 1.0))
    throw ValidationError("extract_generator: x must lie in (0,1)");
  std::vector<double> diag;  // last Richardson row
  ExtractionResult res;
  double prev_best = kInf;
  std::vector<std::vector<double>> rows;
  double t = t0;
  for (int j = 0; j < levels; ++j, t *= 0.5) {
    double q = (family.psi(t, x) - x) / t;
    std::vector<double> row{q};
    if (!rows.empty()) {
      const auto& up = rows.back();
      double p2 = 2.0;
      for (size_t m = 0; m + 1 <= up.size() && m < 6; ++m, p2 *= 2.0)
        row.push_back((p2 * row[m] - up[m]) / (p2 - 1.0));
    }
    if (!rows.empty()) {
      double best = row.back();
      double prev = rows.back().back();
      double diff = std::abs(best - prev);
      res.value = best;
      res.error_estimate = diff;
      res.quotients = j + 1;
      if (diff <= 1e-9 * std::max(1.0, std::abs(best))) {
        res.converged = true;
        return res;
      }
      if (diff < prev_best) prev_best = diff;
      // Stop once roundoff makes further halving counterproductive.
      if (diff > 16.0 * prev_best && prev_best < 1e-7 * std::max(1.0, std::abs(best))) {
        res.converged = true;
        return res;
      }
    }
    rows.push_back(std::move(row));
  }
  res.converged = res.error_estimate <= 1e-5 * std::max(1.0, std::abs(res.value));
  if (!res.converged)
    throw NumericError("extract_generator: non-convergent difference quotients at x=" +
                       std::to_string(x) + " (last estimate " + std::to_string(res.value) +
                       ", drift " + std::to_string(res.error_estimate) + ")");
  return res;
}

}  // namespace distortia
