#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diffeo1d/errors.hpp"
#include "diffeo1d/interp.hpp"
#include "diffeo1d/map.hpp"

namespace diffeo1d {

// Lift of an orientation-preserving circle homeomorphism: an increasing F
// with F(x+1) = F(x) + 1, determined by its restriction to [0,1].
class circle_rep {
 public:
  virtual ~circle_rep() = default;
  virtual double eval01(double x) const = 0;  // x in [0,1]
  virtual double deriv01(double x) const = 0;
};

class RotationLift final : public circle_rep {
 public:
  explicit RotationLift(double c) : c_(c) {}
  double angle() const { return c_; }
  double eval01(double x) const override { return x + c_; }
  double deriv01(double) const override { return 1.0; }

 private:
  double c_;
};

// F = B + rot on [0,1], where B is an interval diffeomorphism fixing 0 and 1.
class BaseRotLift final : public circle_rep {
 public:
  BaseRotLift(Diffeo base, double rot) : base_(std::move(base)), rot_(rot) {}
  const Diffeo& base() const { return base_; }
  double rot() const { return rot_; }
  double eval01(double x) const override { return base_.eval(x) + rot_; }
  double deriv01(double x) const override { return base_.deriv(x); }

 private:
  Diffeo base_;
  double rot_;
};

// Sampled lift values on [0,1] with F(1) = F(0) + 1.
class GridLift final : public circle_rep {
 public:
  GridLift(std::vector<double> xs, std::vector<double> fs)
      : interp_(std::move(xs), std::move(fs), CubicInterp::Slopes::monotone) {
    if (interp_.x_front() != 0.0 || interp_.x_back() != 1.0)
      throw std::invalid_argument("GridLift: xs must span [0,1]");
    if (std::fabs(interp_.ys().back() - interp_.ys().front() - 1.0) > 1e-12)
      throw std::invalid_argument("GridLift: F(1) != F(0) + 1");
  }
  double eval01(double x) const override { return interp_.eval(x); }
  double deriv01(double x) const override { return interp_.deriv(x); }

 private:
  CubicInterp interp_;
};

class CircleLift {
 public:
  CircleLift() : rep_(std::make_shared<RotationLift>(0.0)) {}
  explicit CircleLift(std::shared_ptr<const circle_rep> rep) : rep_(std::move(rep)) {}
  static CircleLift rotation(double c) { return CircleLift(std::make_shared<RotationLift>(c)); }
  static CircleLift from_base(Diffeo base, double rot) {
    return CircleLift(std::make_shared<BaseRotLift>(std::move(base), rot));
  }
  static CircleLift from_samples(std::vector<double> xs, std::vector<double> fs) {
    return CircleLift(std::make_shared<GridLift>(std::move(xs), std::move(fs)));
  }

  const circle_rep& rep() const { return *rep_; }

  double eval(double x) const {
    const double k = std::floor(x);
    return k + rep_->eval01(x - k);
  }
  double operator()(double x) const { return eval(x); }
  double deriv(double x) const {
    const double k = std::floor(x);
    return rep_->deriv01(x - k);
  }
  double iterate_point(double x, long n) const {
    if (n >= 0) {
      for (long i = 0; i < n; ++i) x = eval(x);
      return x;
    }
    for (long i = 0; i < -n; ++i) x = inverse_at(x);
    return x;
  }
  // Solves F(y) = x; monotone, bracketed by translation bounds.
  double inverse_at(double x) const {
    const double d0 = eval(0.0);
    double lo = x - d0 - 1.0, hi = x - d0 + 1.0;
    return solve_increasing([this](double y) { return eval(y); }, x, lo, hi,
                            [this](double y) { return deriv(y); });
  }

 private:
  std::shared_ptr<const circle_rep> rep_;
};

struct RotationEstimate {
  double value;
  double bracket;  // |rho - value| <= bracket
  long iterations;
};

// Orbit average (F^n(0) - 0)/n with bracket |rho - estimate| <= 1/n;
// exact for pure translations. The iteration budget must cover the
// requested bracket tolerance.
inline RotationEstimate rotation_number(const CircleLift& F, long iterations = 10000000,
                                        double tol = 1e-6) {
  if (const auto* rot = dynamic_cast<const RotationLift*>(&F.rep()))
    return {rot->angle(), 0.0, 0};
  if (iterations < 1) throw std::invalid_argument("rotation_number: iterations >= 1");
  const long needed = long(std::ceil(1.0 / std::max(tol, 1e-12)));
  if (needed > iterations)
    throw convergence_error("rotation_number: iteration budget " + std::to_string(iterations) +
                                " below the " + std::to_string(needed) +
                                " orbit steps required for bracket " + std::to_string(tol),
                            {});
  double x = 0.0;
  for (long i = 0; i < needed; ++i) x = F.eval(x);
  return {x / double(needed), 1.0 / double(needed), needed};
}

}  // namespace diffeo1d
