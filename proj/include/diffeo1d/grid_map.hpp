#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diffeo1d/chart.hpp"
#include "diffeo1d/grid.hpp"
#include "diffeo1d/interp.hpp"
#include "diffeo1d/map.hpp"

namespace diffeo1d {

// Monotone sample table with shape-preserving cubic interpolation.
// Endpoints are pinned exactly; samples whose values collapse at double
// precision (deep in the tails) are dropped rather than breaking
// monotonicity.
class GridMapRep final : public map_rep, public std::enable_shared_from_this<GridMapRep> {
 public:
  GridMapRep(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() != ys.size() || xs.size() < 3)
      throw std::invalid_argument("GridMap: need matching xs/ys with >= 3 samples");
    if (xs.front() != 0.0 || xs.back() != 1.0)
      throw std::invalid_argument("GridMap: xs must span [0,1]");
    std::vector<double> fx{0.0}, fy{0.0};
    const double step_floor = 4e-16;  // a few ulps at |y| ~ 1
    for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
      const double y = std::clamp(ys[i], 0.0, 1.0);
      const bool clear_of_one = (1.0 - xs[i] > step_floor) && (1.0 - y > step_floor);
      const double min_step = (xs[i] > 0.5 || y > 0.5) ? step_floor : 0.0;
      if (xs[i] > fx.back() + min_step && y > fy.back() + min_step && clear_of_one) {
        fx.push_back(xs[i]);
        fy.push_back(y);
      }
    }
    fx.push_back(1.0);
    fy.push_back(1.0);
    if (fx.size() < 3) throw std::invalid_argument("GridMap: table not increasing");
    interp_ = CubicInterp(std::move(fx), std::move(fy), CubicInterp::Slopes::monotone);
    for (std::size_t i = 0; i + 1 < interp_.xs().size(); ++i) {
      const double mid = 0.5 * (interp_.xs()[i] + interp_.xs()[i + 1]);
      if (!(interp_.deriv(mid) > 0.0))
        throw std::invalid_argument("GridMap: interpolant derivative not positive");
    }
  }

  const CubicInterp& interp() const { return interp_; }

  double eval(double x) const override { return std::clamp(interp_.eval(x), 0.0, 1.0); }
  double deriv(double x) const override { return interp_.deriv(x); }
  rep_ptr closed_inverse() const override;

 private:
  CubicInterp interp_;
};

// Inverse of a grid map: bisection within the bracketing table cell,
// then a Newton polish on the cubic.
class GridInverseRep final : public map_rep {
 public:
  explicit GridInverseRep(std::shared_ptr<const GridMapRep> base) : base_(std::move(base)) {}
  double eval(double y) const override {
    if (y <= 0.0) return 0.0;
    if (y >= 1.0) return 1.0;
    const auto& xs = base_->interp().xs();
    const auto& ys = base_->interp().ys();
    auto it = std::upper_bound(ys.begin(), ys.end(), y);
    std::size_t i = (it == ys.begin()) ? 0 : std::size_t(it - ys.begin()) - 1;
    if (i + 1 >= ys.size()) i = ys.size() - 2;
    return solve_increasing([this](double x) { return base_->interp().eval(x); }, y, xs[i],
                            xs[i + 1], [this](double x) { return base_->interp().deriv(x); });
  }
  double deriv(double y) const override { return 1.0 / base_->deriv(eval(y)); }
  rep_ptr closed_inverse() const override { return base_; }

 private:
  std::shared_ptr<const GridMapRep> base_;
};

inline rep_ptr GridMapRep::closed_inverse() const {
  return std::make_shared<GridInverseRep>(shared_from_this());
}

inline Diffeo grid_map(std::vector<double> xs, std::vector<double> ys) {
  return Diffeo(std::make_shared<GridMapRep>(std::move(xs), std::move(ys)));
}

// Samples f on `xs` (standard grid by default) into a grid map.
inline Diffeo snapshot(const Diffeo& f, const std::vector<double>* xs = nullptr) {
  static const std::vector<double> def = standard_grid();
  const auto& grid = xs ? *xs : def;
  std::vector<double> ys(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) ys[i] = f.eval(grid[i]);
  return grid_map(grid, ys);
}

// The diffeomorphism g with g(0)=0, g(1)=1 and Dg proportional to e^u:
// Dg = e^u / Z with Z the total integral, so adding a constant to u is a
// no-op and log Dg - u is constant.
inline Diffeo build_from_log_derivative(const std::vector<double>& xs,
                                        const std::vector<double>& us) {
  if (xs.size() != us.size() || xs.size() < 3)
    throw std::invalid_argument("build_from_log_derivative: bad sample table");
  double umax = -std::numeric_limits<double>::infinity();
  for (double u : us) {
    if (!std::isfinite(u)) throw std::invalid_argument("build_from_log_derivative: non-finite sample");
    umax = std::max(umax, u);
  }
  CubicInterp uin(xs, us, CubicInterp::Slopes::smooth);
  std::vector<double> cum(xs.size(), 0.0);
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    cum[i + 1] = cum[i] + gauss7([&](double x) { return std::exp(uin.eval(x) - umax); }, xs[i],
                                 xs[i + 1]);
  const double z = cum.back();
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = cum[i] / z;
  std::vector<double> gx(xs);
  return grid_map(std::move(gx), std::move(ys));
}

inline Diffeo build_from_log_derivative(const std::function<double(double)>& u,
                                        const std::vector<double>* xs = nullptr) {
  static const std::vector<double> def = standard_grid();
  const auto& grid = xs ? *xs : def;
  std::vector<double> us(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) us[i] = u(grid[i]);
  return build_from_log_derivative(grid, us);
}

}  // namespace diffeo1d
