#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diffeo1d/chart.hpp"
#include "diffeo1d/grid.hpp"
#include "diffeo1d/map.hpp"

namespace diffeo1d {

// ---------------------------------------------------------------------------
// Vector fields with closed-form values, and their flow maps.

struct field_fn {
  virtual ~field_fn() = default;
  virtual double value(double x) const = 0;
  virtual double dvalue(double x) const = 0;
  virtual double rate0() const = 0;  // V'(0+); 0 for a parabolic end
  virtual double rate1() const = 0;  // -V'(1-); 0 for a parabolic end
};

// V(x) = sum c_i x^i, vanishing at 0 and 1, positive inside.
class PolyField final : public field_fn {
 public:
  explicit PolyField(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty() || c_[0] != 0.0)
      throw std::invalid_argument("PolyField: constant term must be 0 (field vanishes at 0)");
    double at1 = 0.0;
    for (double ci : c_) at1 += ci;
    if (std::fabs(at1) > 1e-12) throw std::invalid_argument("PolyField: field must vanish at 1");
    for (int i = 1; i < 4096; ++i) {
      const double x = double(i) / 4096.0;
      if (!(value(x) > 0.0))
        throw std::invalid_argument("PolyField: field must be positive on (0,1)");
    }
  }
  double value(double x) const override {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
    return acc;
  }
  double dvalue(double x) const override {
    double acc = 0.0;
    for (std::size_t i = c_.size(); i-- > 1;) acc = acc * x + double(i) * c_[i];
    return acc;
  }
  double rate0() const override { return c_.size() > 1 ? c_[1] : 0.0; }
  double rate1() const override { return -dvalue(1.0); }
  const std::vector<double>& coeffs() const { return c_; }

 private:
  std::vector<double> c_;
};

// The logistic field x(1-x) straightened to exactly x near 0 and exactly
// (1-x) near 1 (C^1 blends on [eps,2*eps]); its time-1 map is affine on a
// neighborhood of each endpoint.
class LinearizedLogisticField final : public field_fn {
 public:
  explicit LinearizedLogisticField(double eps = 0.0625) : eps_(eps) {
    if (!(eps > 0.0 && eps < 0.2)) throw std::invalid_argument("LinearizedLogisticField: eps");
  }
  double value(double x) const override {
    if (x <= eps_) return x;
    if (x < 2 * eps_) {
      const double s = smooth((x - eps_) / eps_);
      return (1.0 - s) * x + s * x * (1.0 - x);
    }
    if (x <= 1.0 - 2 * eps_) return x * (1.0 - x);
    if (x < 1.0 - eps_) {
      const double s = smooth(((1.0 - eps_) - x) / eps_);
      return (1.0 - s) * (1.0 - x) + s * x * (1.0 - x);
    }
    return 1.0 - x;
  }
  double dvalue(double x) const override {
    if (x <= eps_) return 1.0;
    if (x < 2 * eps_) {
      const double s = smooth((x - eps_) / eps_), ds = dsmooth((x - eps_) / eps_) / eps_;
      return (1.0 - s) + s * (1.0 - 2 * x) + ds * (x * (1.0 - x) - x);
    }
    if (x <= 1.0 - 2 * eps_) return 1.0 - 2 * x;
    if (x < 1.0 - eps_) {
      const double s = smooth(((1.0 - eps_) - x) / eps_), ds = -dsmooth(((1.0 - eps_) - x) / eps_) / eps_;
      return -(1.0 - s) + s * (1.0 - 2 * x) + ds * (x * (1.0 - x) - (1.0 - x));
    }
    return -1.0;
  }
  double rate0() const override { return 1.0; }
  double rate1() const override { return 1.0; }
  double affine_zone() const { return eps_; }

 private:
  static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
  static double dsmooth(double t) { return 6.0 * t * (1.0 - t); }
  double eps_;
};

// Time-t map of a closed-form positive field; evaluated through the chart
// x -> psi(t + P(x)). The chart is built once and shared across times.
class FieldFlowRep final : public map_rep, public std::enable_shared_from_this<FieldFlowRep> {
 public:
  FieldFlowRep(std::shared_ptr<const field_fn> field, double t)
      : FieldFlowRep(std::move(field), nullptr, t) {}

  FieldFlowRep(std::shared_ptr<const field_fn> field, std::shared_ptr<const Chart> chart, double t)
      : V_(std::move(field)), chart_(std::move(chart)), t_(t) {
    if (!chart_) {
      FieldView view{[V = V_](double x) { return V->value(x); }, V_->rate0(), V_->rate1()};
      chart_ = std::make_shared<Chart>(std::move(view), 0.5, standard_grid());
    }
  }

  double time() const { return t_; }
  const std::shared_ptr<const field_fn>& field() const { return V_; }
  const std::shared_ptr<const Chart>& chart() const { return chart_; }

  double eval(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return std::clamp(chart_->psi(t_ + chart_->P(x)), 0.0, 1.0);
  }
  double deriv(double x) const override {
    if (x <= 0.0) return std::exp(t_ * V_->rate0());
    if (x >= 1.0) return std::exp(-t_ * V_->rate1());
    const double y = eval(x);
    if (y <= 0.0 || y >= 1.0) return y <= 0.0 ? std::exp(t_ * V_->rate0()) : std::exp(-t_ * V_->rate1());
    return V_->value(y) / V_->value(x);
  }
  std::optional<double> affine_deriv(double x) const override {
    const double xi = std::clamp(x, 1e-9, 1.0 - 1e-9);
    const double y = eval(xi);
    const double d = V_->value(y) / V_->value(xi);
    return (V_->dvalue(y) / V_->value(y)) * d - V_->dvalue(xi) / V_->value(xi);
  }
  rep_ptr closed_inverse() const override {
    return std::make_shared<FieldFlowRep>(V_, chart_, -t_);
  }
  rep_ptr closed_compose_after(const map_rep& inner) const override {
    if (const auto* g = dynamic_cast<const FieldFlowRep*>(&inner))
      if (g->chart_ == chart_) return std::make_shared<FieldFlowRep>(V_, chart_, t_ + g->t_);
    return nullptr;
  }
  rep_ptr closed_power(long n) const override {
    return std::make_shared<FieldFlowRep>(V_, chart_, double(n) * t_);
  }

 private:
  std::shared_ptr<const field_fn> V_;
  std::shared_ptr<const Chart> chart_;
  double t_;
};

inline Diffeo flow_of(std::shared_ptr<const field_fn> field, double t) {
  return Diffeo(std::make_shared<FieldFlowRep>(std::move(field), t));
}

// ---------------------------------------------------------------------------
// The hyperbolic germ that is C^{1+ac} but not bi-Lipschitz linearizable:
// Phi(f(x)) = e^lambda Phi(x) with Phi(x) = x(1 - log x) on (0, e^{-1}],
// glued to a parabolic displacement tail on [e^{-1}, 1].

inline double sternberg_phi(double x) { return x * (1.0 - std::log(x)); }

// Solves Phi(y) = target for y in (0, x_hi], working in u = log y.
inline double sternberg_phi_inv(double target, double x_hi) {
  auto phi_u = [](double u) { return std::exp(u) * (1.0 - u); };
  double hi = std::log(x_hi);
  double lo = hi - 2.0;
  while (phi_u(lo) > target) {
    hi = lo;
    lo -= 2.0;
    if (lo < -745.0) throw root_find_error("sternberg_phi_inv: target below range");
  }
  for (int it = 0; it < 120 && hi - lo > 1e-16 * (1.0 + std::fabs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi_u(mid) <= target) lo = mid; else hi = mid;
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 2; ++it) {
    const double dphi = -u * std::exp(u);
    if (dphi <= 0.0) break;
    u -= (phi_u(u) - target) / dphi;
  }
  return std::exp(u);
}

class SternbergGluedRep final : public map_rep {
 public:
  explicit SternbergGluedRep(double lambda, bool inverted = false)
      : lambda_(lambda), inverted_(inverted) {
    if (!(lambda < 0.0)) throw std::invalid_argument("SternbergGluedRep: lambda must be < 0");
    xmax_ = std::exp(-1.0);
    fxmax_ = sternberg_phi_inv(std::exp(lambda_) * sternberg_phi(xmax_), xmax_);
    d0_ = xmax_ - fxmax_;
    dp0_ = 1.0 - germ_deriv(xmax_);
    if (!(dp0_ >= 0.0 && dp0_ < 1.0))
      throw std::invalid_argument("SternbergGluedRep: tail junction slope out of range");
  }

  double lambda() const { return lambda_; }
  double cut() const { return xmax_; }

  double eval(double x) const override { return inverted_ ? up_eval(x) : down_eval(x); }
  double deriv(double x) const override {
    if (inverted_) {
      const double y = up_eval(x);
      return 1.0 / down_deriv(y);
    }
    return down_deriv(x);
  }
  std::optional<double> affine_deriv(double x) const override {
    if (inverted_) {
      const double y = up_eval(x);
      const double l = down_affine(y);
      return -l / down_deriv(y);
    }
    return down_affine(x);
  }
  rep_ptr closed_inverse() const override {
    return std::make_shared<SternbergGluedRep>(lambda_, !inverted_);
  }

 private:
  // Down map: f(x) < x, hyperbolic multiplier e^lambda at 0, parabolic at 1.
  double down_eval(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (x <= xmax_) return sternberg_phi_inv(std::exp(lambda_) * sternberg_phi(x), x);
    return x - tail_delta(x);
  }
  double down_deriv(double x) const {
    if (x <= 0.0) return std::exp(lambda_);
    if (x >= 1.0) return 1.0;
    if (x <= xmax_) return germ_deriv(x);
    return 1.0 - tail_ddelta(x);
  }
  double down_affine(double x) const {
    if (x <= xmax_) {
      const double y = down_eval(std::max(x, 1e-300));
      const double d = germ_deriv(std::max(x, 1e-300));
      return 1.0 / (x * std::log(x)) - d / (y * std::log(y));
    }
    return -tail_d2delta(x) / (1.0 - tail_ddelta(x));
  }
  double up_eval(double y) const {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    if (y <= fxmax_) return sternberg_phi_inv(std::exp(-lambda_) * sternberg_phi(y), xmax_);
    return solve_increasing([this](double x) { return down_eval(x); }, y, xmax_, 1.0,
                            [this](double x) { return down_deriv(x); });
  }
  double germ_deriv(double x) const {
    const double y = down_eval(x);
    return std::exp(lambda_) * std::log(x) / std::log(y);
  }

  // Hermite displacement tail delta on [xmax,1]:
  // delta(xmax)=d0, delta'(xmax)=dp0, delta(1)=0, delta'(1)=0.
  double tail_delta(double x) const {
    const double L = 1.0 - xmax_, s = (x - xmax_) / L;
    const double h00 = (2 * s - 3) * s * s + 1.0, h10 = s * (s - 1.0) * (s - 1.0);
    return d0_ * h00 + L * dp0_ * h10;
  }
  double tail_ddelta(double x) const {
    const double L = 1.0 - xmax_, s = (x - xmax_) / L;
    const double dh00 = 6 * s * (s - 1.0), dh10 = (3 * s - 1.0) * (s - 1.0);
    return d0_ * dh00 / L + dp0_ * dh10;
  }
  double tail_d2delta(double x) const {
    const double L = 1.0 - xmax_, s = (x - xmax_) / L;
    const double d2h00 = 12 * s - 6.0, d2h10 = 6 * s - 4.0;
    return d0_ * d2h00 / (L * L) + dp0_ * d2h10 / L;
  }

  double lambda_, xmax_, fxmax_, d0_, dp0_;
  bool inverted_;
};

// ---------------------------------------------------------------------------
// Parabolic fixture with one interior derivative kink; both endpoints are
// parabolic while the absolutely continuous part of d(log Df) has nonzero
// total mass.
class KinkDisplacementRep final : public map_rep {
 public:
  KinkDisplacementRep(double h = 0.4, double beta = 4.0, double c = 0.5)
      : h_(h), beta_(beta), c_(c) {
    for (int i = 1; i < 2048; ++i) {
      const double x = double(i) / 2048.0;
      if (!(displ(x) > 0.0) || !(1.0 + ddispl(x) > 0.0))
        throw std::invalid_argument("KinkDisplacementRep: parameters break monotonicity");
    }
  }
  double eval(double x) const override { return x + displ(x); }
  double deriv(double x) const override { return 1.0 + ddispl(x); }
  double deriv_left(double x) const override {
    if (x == c_) return 1.0 + base_d(x);
    return deriv(x);
  }
  std::optional<double> affine_deriv(double x) const override {
    return d2displ(x) / (1.0 + ddispl(x));
  }
  std::vector<double> kinks() const override { return {c_}; }
  double kink_jump() const {  // jump of log Df at c
    return std::log(1.0 + ddispl_right_at_c()) - std::log(1.0 + base_d(c_));
  }

 private:
  double bump(double x) const { return x * x * (1.0 - x) * (1.0 - x); }
  double dbump(double x) const { return 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x); }
  double d2bump(double x) const { return 2.0 - 12.0 * x + 12.0 * x * x; }
  double displ(double x) const {
    return h_ * bump(x) * (x > c_ ? 1.0 + beta_ * (x - c_) : 1.0);
  }
  double base_d(double x) const { return h_ * dbump(x); }
  double ddispl_right_at_c() const { return h_ * (dbump(c_) + bump(c_) * beta_); }
  double ddispl(double x) const {
    if (x <= c_) return base_d(x);
    return h_ * (dbump(x) * (1.0 + beta_ * (x - c_)) + bump(x) * beta_);
  }
  double d2displ(double x) const {
    if (x <= c_) return h_ * d2bump(x);
    return h_ * (d2bump(x) * (1.0 + beta_ * (x - c_)) + 2.0 * dbump(x) * beta_);
  }
  double h_, beta_, c_;
};

// ---------------------------------------------------------------------------
// Sine-perturbed degree-one circle base map x + a sin(2 pi x) on [0,1].
class SineRep final : public map_rep {
 public:
  explicit SineRep(double a) : a_(a) {
    if (!(std::fabs(2.0 * M_PI * a) < 1.0)) throw std::invalid_argument("SineRep: |2 pi a| < 1");
  }
  double amplitude() const { return a_; }
  double eval(double x) const override { return x + a_ * std::sin(2.0 * M_PI * x); }
  double deriv(double x) const override { return 1.0 + 2.0 * M_PI * a_ * std::cos(2.0 * M_PI * x); }
  std::optional<double> affine_deriv(double x) const override {
    const double d = deriv(x);
    return -4.0 * M_PI * M_PI * a_ * std::sin(2.0 * M_PI * x) / d;
  }

 private:
  double a_;
};

// ---------------------------------------------------------------------------
// Power-germ conjugator: w(x) = eps^{1-alpha} x^alpha on [0,eps], a monotone
// cubic blend to the identity on [eps,2eps], identity beyond. Conjugation by
// it changes a multiplier s at 0 into s^alpha.

struct PowerGerm {
  double alpha, eps;

  double eval(double x) const {
    if (x <= 0.0) return 0.0;
    if (x <= eps) return std::pow(eps, 1.0 - alpha) * std::pow(x, alpha);
    if (x >= 2.0 * eps) return x;
    return blend(x);
  }
  double deriv(double x) const {
    if (x <= 0.0) return alpha < 1.0 ? std::numeric_limits<double>::infinity() : 1.0;
    if (x <= eps) return alpha * std::pow(eps, 1.0 - alpha) * std::pow(x, alpha - 1.0);
    if (x >= 2.0 * eps) return 1.0;
    return dblend(x);
  }
  double inverse(double y) const {
    if (y <= 0.0) return 0.0;
    if (y <= eps) return std::pow(eps, (alpha - 1.0) / alpha) * std::pow(y, 1.0 / alpha);
    if (y >= 2.0 * eps) return y;
    return solve_increasing([this](double x) { return blend(x); }, y, eps, 2.0 * eps,
                            [this](double x) { return dblend(x); });
  }

 private:
  // Hermite blend with w(eps)=eps, w'(eps)=alpha, w(2eps)=2eps, w'(2eps)=1.
  double blend(double x) const {
    const double s = (x - eps) / eps;
    const double h00 = (2 * s - 3) * s * s + 1.0, h10 = s * (s - 1.0) * (s - 1.0);
    const double h01 = (3.0 - 2 * s) * s * s, h11 = s * s * (s - 1.0);
    return eps * h00 + eps * alpha * h10 + 2.0 * eps * h01 + eps * h11;
  }
  double dblend(double x) const {
    const double s = (x - eps) / eps;
    const double dh00 = 6 * s * (s - 1.0), dh10 = (3 * s - 1.0) * (s - 1.0);
    const double dh01 = 6 * s * (1.0 - s), dh11 = s * (3 * s - 2.0);
    return dh00 + alpha * dh10 + 2.0 * dh01 + dh11;
  }
};

struct AlphaSides {
  bool left = true;
  bool right = false;
};

// w f w^{-1} for the (possibly two-sided) power-germ conjugator w. Requires f
// affine on [0,2eps] (resp. [1-2eps,1]) on each active side; the conjugate is
// then affine near the endpoint with multiplier Df(.)^alpha.
class AlphaConjRep final : public map_rep {
 public:
  AlphaConjRep(Diffeo f, double alpha, double eps, AlphaSides sides)
      : f_(std::move(f)), w_{alpha, eps}, sides_(sides) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha in (0,1]");
    if (!(eps > 0.0 && 2.0 * eps < 0.5)) throw std::invalid_argument("eps too large");
    auto check_affine = [&](bool right_side) {
      const double d0 = right_side ? f_.deriv_left(1.0) : f_.deriv(0.0);
      for (double u : {0.25 * eps, 0.7 * eps, 1.3 * eps, 1.9 * eps, 2.0 * eps}) {
        const double x = right_side ? 1.0 - u : u;
        if (std::fabs(f_.deriv(x) / d0 - 1.0) > 1e-11)
          throw std::invalid_argument("alpha conjugation: map not affine on the end zone");
      }
    };
    if (sides_.left) check_affine(false);
    if (sides_.right) check_affine(true);
  }

  const Diffeo& base() const { return f_; }
  double alpha() const { return w_.alpha; }

  double eval(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return w_eval(f_.eval(w_inv(x)));
  }
  double deriv(double x) const override { return deriv_impl(x, false); }
  double deriv_left(double x) const override { return deriv_impl(x, true); }
  std::vector<double> kinks() const override {
    std::vector<double> ks;
    for (double k : f_.kinks()) ks.push_back(w_eval(k));
    std::sort(ks.begin(), ks.end());
    return ks;
  }
  rep_ptr closed_inverse() const override {
    return std::make_shared<AlphaConjRep>(invert(f_), w_.alpha, w_.eps, sides_);
  }

 private:
  double deriv_impl(double x, bool left) const {
    if (x <= 0.0) return std::pow(f_.deriv(0.0), sides_.left ? w_.alpha : 1.0);
    if (x >= 1.0) return std::pow(f_.deriv_left(1.0), sides_.right ? w_.alpha : 1.0);
    const double y = w_inv(x);
    const double fy = f_.eval(y);
    const double dw_y = w_deriv(y), dw_fy = w_deriv(fy);
    const double df = left ? f_.deriv_left(y) : f_.deriv(y);
    return dw_fy * df / dw_y;
  }
  double w_eval(double x) const {
    double y = sides_.left ? w_.eval(x) : x;
    if (sides_.right) y = 1.0 - w_.eval(1.0 - y);
    return y;
  }
  double w_deriv(double x) const {
    double d = 1.0;
    double y = x;
    if (sides_.left) {
      d *= w_.deriv(y);
      y = w_.eval(y);
    }
    if (sides_.right) d *= w_.deriv(1.0 - y);
    return d;
  }
  double w_inv(double x) const {
    double y = x;
    if (sides_.right) y = 1.0 - w_.inverse(1.0 - y);
    if (sides_.left) y = w_.inverse(y);
    return y;
  }

  Diffeo f_;
  PowerGerm w_;
  AlphaSides sides_;
};

inline Diffeo alpha_conjugate(const Diffeo& f, double alpha, double eps,
                              AlphaSides sides = {true, false}) {
  if (alpha == 1.0) return f;
  return Diffeo(std::make_shared<AlphaConjRep>(f, alpha, eps, sides));
}

}  // namespace diffeo1d
