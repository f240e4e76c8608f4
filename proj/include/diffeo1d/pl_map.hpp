#pragma once

#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "diffeo1d/errors.hpp"
#include "diffeo1d/rational.hpp"

namespace diffeo1d {

// log of a positive rational, stable for operands far outside double range.
inline double log_rat(const rat& q) {
  if (q <= 0) throw std::domain_error("log_rat: nonpositive");
  long e1 = 0, e2 = 0;
  const double m1 = mpz_get_d_2exp(&e1, q.get_num_mpz_t());
  const double m2 = mpz_get_d_2exp(&e2, q.get_den_mpz_t());
  return std::log(m1) - std::log(m2) + double(e1 - e2) * std::log(2.0);
}

// Piecewise-affine homeomorphism of [0,1] with exact rational data.
// Breakpoints include both endpoints; slope i rules [bx[i], bx[i+1]].
class PLMap {
 public:
  PLMap(std::vector<rat> breakpoints, std::vector<rat> slopes) {
    if (breakpoints.size() < 2 || slopes.size() + 1 != breakpoints.size())
      throw std::invalid_argument("PLMap: need n breakpoints and n-1 slopes");
    bx_ = std::move(breakpoints);
    if (bx_.front() != 0 || bx_.back() != 1)
      throw std::invalid_argument("PLMap: breakpoints must start at 0 and end at 1");
    by_.resize(bx_.size());
    by_[0] = 0;
    for (std::size_t i = 0; i < slopes.size(); ++i) {
      if (!(bx_[i] < bx_[i + 1])) throw std::invalid_argument("PLMap: breakpoints not increasing");
      if (!(slopes[i] > 0)) throw std::invalid_argument("PLMap: slopes must be positive");
      by_[i + 1] = by_[i] + slopes[i] * (bx_[i + 1] - bx_[i]);
    }
    if (by_.back() != 1)
      throw std::invalid_argument("PLMap: slopes do not map [0,1] onto [0,1] (sum slope*width != 1)");
    slopes_ = std::move(slopes);
    cache_doubles();
  }

  static PLMap from_values(std::vector<rat> breakpoints, std::vector<rat> values) {
    if (breakpoints.size() != values.size() || breakpoints.size() < 2)
      throw std::invalid_argument("PLMap: breakpoints/values size mismatch");
    std::vector<rat> slopes(breakpoints.size() - 1);
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
      if (!(breakpoints[i] < breakpoints[i + 1]) || !(values[i] < values[i + 1]))
        throw std::invalid_argument("PLMap: data not strictly increasing");
      slopes[i] = (values[i + 1] - values[i]) / (breakpoints[i + 1] - breakpoints[i]);
    }
    return PLMap(std::move(breakpoints), std::move(slopes));
  }

  static PLMap identity() { return PLMap({rat(0), rat(1)}, {rat(1)}); }

  std::size_t pieces() const { return slopes_.size(); }
  const std::vector<rat>& breakpoints() const { return bx_; }
  const std::vector<rat>& values() const { return by_; }
  const std::vector<rat>& slopes() const { return slopes_; }

  rat eval_q(const rat& x) const {
    const std::size_t i = piece_q(x);
    return by_[i] + slopes_[i] * (x - bx_[i]);
  }

  rat deriv_q(const rat& x) const { return slopes_[piece_q(x)]; }

  double eval(double x) const {
    const std::size_t i = piece_d(x);
    return byd_[i] + sd_[i] * (x - bxd_[i]);
  }

  // Right derivative; `left` selects the left value at breakpoints.
  double deriv(double x, bool left = false) const {
    std::size_t i = piece_d(x);
    if (left && i > 0 && x == bxd_[i]) --i;
    return sd_[i];
  }

  PLMap inverse() const {
    std::vector<rat> islopes(slopes_.size());
    for (std::size_t i = 0; i < slopes_.size(); ++i) islopes[i] = 1 / slopes_[i];
    return PLMap(by_, std::move(islopes));
  }

  // No fixed point in the open interval; +1 if f > id inside, -1 if f < id.
  std::optional<int> delta_class() const {
    bool up = true, down = true;
    for (std::size_t i = 1; i + 1 < bx_.size(); ++i) {
      if (by_[i] <= bx_[i]) up = false;
      if (by_[i] >= bx_[i]) down = false;
    }
    if (bx_.size() == 2) {  // single affine piece is the identity
      return std::nullopt;
    }
    if (up) return 1;
    if (down) return -1;
    return std::nullopt;
  }

  // Total variation of log Df over [a,b]: jumps at breakpoints strictly inside.
  double var_log_d(const rat& a, const rat& b) const {
    double acc = 0.0;
    for (std::size_t i = 1; i + 1 < bx_.size(); ++i)
      if (bx_[i] > a && bx_[i] < b) acc += std::fabs(log_rat(slopes_[i] / slopes_[i - 1]));
    return acc;
  }

  double var_log_d() const { return var_log_d(rat(0), rat(1)); }

  std::vector<double> kinks() const {
    std::vector<double> ks;
    for (std::size_t i = 1; i + 1 < bx_.size(); ++i)
      if (slopes_[i] != slopes_[i - 1]) ks.push_back(bxd_[i]);
    return ks;
  }

  friend PLMap compose(const PLMap& f, const PLMap& g, std::size_t piece_cap);

 private:
  std::size_t piece_q(const rat& x) const {
    if (x < 0 || x > 1) throw domain_error("PLMap: x outside [0,1]");
    std::size_t lo = 0, hi = bx_.size() - 1;
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (x < bx_[mid]) hi = mid; else lo = mid;
    }
    return lo;
  }

  std::size_t piece_d(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("PLMap: x outside [0,1]");
    std::size_t lo = 0, hi = bxd_.size() - 1;
    while (lo + 1 < hi) {
      const std::size_t mid = (lo + hi) / 2;
      if (x < bxd_[mid]) hi = mid; else lo = mid;
    }
    return lo;
  }

  void cache_doubles() {
    bxd_.resize(bx_.size());
    byd_.resize(by_.size());
    sd_.resize(slopes_.size());
    for (std::size_t i = 0; i < bx_.size(); ++i) bxd_[i] = to_double(bx_[i]);
    for (std::size_t i = 0; i < by_.size(); ++i) byd_[i] = to_double(by_[i]);
    for (std::size_t i = 0; i < slopes_.size(); ++i) sd_[i] = to_double(slopes_[i]);
  }

  std::vector<rat> bx_, by_, slopes_;
  std::vector<double> bxd_, byd_, sd_;
};

// f after g, with exactly merged breakpoints.
inline PLMap compose(const PLMap& f, const PLMap& g, std::size_t piece_cap = 1000000) {
  std::vector<rat> bx;
  bx.reserve(f.pieces() + g.pieces() + 1);
  const PLMap ginv = g.inverse();
  std::size_t i = 0, j = 0;  // i over g's breakpoints, j over g^{-1}(f's breakpoints)
  while (i < g.breakpoints().size() || j < f.breakpoints().size()) {
    rat cand;
    if (j >= f.breakpoints().size()) cand = g.breakpoints()[i++];
    else if (i >= g.breakpoints().size()) cand = ginv.eval_q(f.breakpoints()[j++]);
    else {
      const rat a = g.breakpoints()[i];
      const rat b = ginv.eval_q(f.breakpoints()[j]);
      if (a < b) { cand = a; ++i; }
      else if (b < a) { cand = b; ++j; }
      else { cand = a; ++i; ++j; }
    }
    if (bx.empty() || bx.back() != cand) bx.push_back(cand);
    if (bx.size() > piece_cap) throw pl_overflow_error(bx.size(), piece_cap);
  }
  std::vector<rat> by(bx.size());
  for (std::size_t k = 0; k < bx.size(); ++k) by[k] = f.eval_q(g.eval_q(bx[k]));
  return PLMap::from_values(std::move(bx), std::move(by));
}

inline PLMap iterate(const PLMap& f, long n, std::size_t piece_cap = 1000000) {
  if (n == 0) return PLMap::identity();
  if (n < 0) return iterate(f.inverse(), -n, piece_cap);
  PLMap acc = f;
  for (long k = 1; k < n; ++k) acc = compose(f, acc, piece_cap);
  return acc;
}

}  // namespace diffeo1d
