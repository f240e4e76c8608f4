#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "diffeo1d/errors.hpp"
#include "diffeo1d/grid.hpp"

namespace diffeo1d {

// 7-point Gauss-Legendre on [a,b].
inline double gauss7(const std::function<double(double)>& f, double a, double b) {
  static const double xs[7] = {-0.9491079123427585, -0.7415311855993945, -0.4058451513773972,
                               0.0,                 0.4058451513773972,  0.7415311855993945,
                               0.9491079123427585};
  static const double ws[7] = {0.1294849661688697, 0.2797053914892766, 0.3818300505051189,
                               0.4179591836734694, 0.3818300505051189, 0.2797053914892766,
                               0.1294849661688697};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 7; ++i) acc += ws[i] * f(c + h * xs[i]);
  return acc * h;
}

// A positive vector field on (0,1) as seen by the chart integrator.
// `rate0`/`rate1` are |log Df(0)| style rates: X(x) ~ rate0*x near 0
// (parabolic when rate0 == 0, then X ~ coef*x^2), mirrored at 1.
struct FieldView {
  std::function<double(double)> value;
  double rate0 = 0.0;
  double rate1 = 0.0;
};

// The increasing bijection P : (0,1) -> R with P' = 1/X and P(anchor) = 0,
// plus its inverse. Evaluation is refused at the endpoints (P diverges).
class Chart {
 public:
  Chart(FieldView field, double anchor, std::vector<double> nodes)
      : field_(std::move(field)), anchor_(anchor) {
    if (!(anchor_ > 0.0 && anchor_ < 1.0)) throw std::invalid_argument("Chart: anchor in (0,1)");
    xs_.reserve(nodes.size());
    for (double x : nodes)
      if (x > 0.0 && x < 1.0) xs_.push_back(x);
    if (xs_.size() < 8) throw std::invalid_argument("Chart: too few interior nodes");
    for (double x : xs_)
      if (!(field_.value(x) > 0.0)) throw root_find_error("Chart: field not positive on (0,1)");
    P_.resize(xs_.size());
    P_[0] = 0.0;
    for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
      P_[i + 1] = P_[i] + segment(xs_[i], xs_[i + 1]);
    const double off = P_raw(anchor_);
    for (double& p : P_) p -= off;
    // Endpoint asymptotic coefficients fitted at the outermost nodes.
    const double x0 = xs_.front(), x1 = xs_.back();
    c0_ = field_.value(x0) / (field_.rate0 != 0.0 ? x0 : x0 * x0);
    c1_ = field_.value(x1) / (field_.rate1 != 0.0 ? (1.0 - x1) : (1.0 - x1) * (1.0 - x1));
  }

  double anchor() const { return anchor_; }
  double table_min() const { return xs_.front(); }
  double table_max() const { return xs_.back(); }
  double field_at(double x) const { return field_.value(x); }

  double P(double x) const {
    if (!(x > 0.0 && x < 1.0)) throw domain_error("Chart: P evaluated at an endpoint");
    if (x < xs_.front()) {
      if (field_.rate0 != 0.0) return P_.front() - std::log(xs_.front() / x) / c0_;
      return P_.front() - (1.0 / x - 1.0 / xs_.front()) / c0_;
    }
    if (x > xs_.back()) {
      if (field_.rate1 != 0.0) return P_.back() + std::log((1.0 - xs_.back()) / (1.0 - x)) / c1_;
      return P_.back() + (1.0 / (1.0 - x) - 1.0 / (1.0 - xs_.back())) / c1_;
    }
    return P_raw(x);
  }

  double psi(double s) const {
    if (s < P_.front()) {
      if (field_.rate0 != 0.0) return xs_.front() * std::exp(c0_ * (s - P_.front()));
      return 1.0 / (1.0 / xs_.front() + c0_ * (P_.front() - s));
    }
    if (s > P_.back()) {
      if (field_.rate1 != 0.0)
        return 1.0 - (1.0 - xs_.back()) * std::exp(-c1_ * (s - P_.back()));
      return 1.0 - 1.0 / (1.0 / (1.0 - xs_.back()) + c1_ * (s - P_.back()));
    }
    auto it = std::upper_bound(P_.begin(), P_.end(), s);
    std::size_t i = (it == P_.begin()) ? 0 : std::size_t(it - P_.begin()) - 1;
    if (i + 1 >= P_.size()) i = P_.size() - 2;
    const double w = (s - P_[i]) / (P_[i + 1] - P_[i]);
    double x = xs_[i] + w * (xs_[i + 1] - xs_[i]);
    for (int it2 = 0; it2 < 6; ++it2) {
      const double r = s - (P_[i] + segment(xs_[i], x));
      if (std::fabs(r) < 1e-15 * (1.0 + std::fabs(s))) break;
      x = std::clamp(x + r * field_.value(x), xs_[i], xs_[i + 1]);
    }
    return x;
  }

 private:
  double P_raw(double x) const {
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = (it == xs_.begin()) ? 0 : std::size_t(it - xs_.begin()) - 1;
    if (i + 1 >= xs_.size()) i = xs_.size() - 2;
    return P_[i] + segment(xs_[i], x);
  }

  // Integral of 1/X over [a,b] in a coordinate adapted to the endpoint tails.
  double segment(double a, double b) const {
    if (a == b) return 0.0;
    if (a > b) return -segment(b, a);
    const double xm = std::ldexp(1.0, -7);
    if (b <= xm) {  // left tail: integrate in log x
      return gauss7([this](double t) { const double u = std::exp(t); return u / field_.value(u); },
                    std::log(a), std::log(b));
    }
    if (a >= 1.0 - xm) {  // right tail: integrate in log(1-x)
      return gauss7(
          [this](double t) { const double w = std::exp(t); return w / field_.value(1.0 - w); },
          std::log(1.0 - b), std::log(1.0 - a));
    }
    if (a < xm) return segment(a, xm) + segment(xm, b);
    if (b > 1.0 - xm) return segment(a, 1.0 - xm) + segment(1.0 - xm, b);
    return gauss7([this](double x) { return 1.0 / field_.value(x); }, a, b);
  }

  FieldView field_;
  double anchor_;
  std::vector<double> xs_, P_;
  double c0_ = 0.0, c1_ = 0.0;
};

}  // namespace diffeo1d
