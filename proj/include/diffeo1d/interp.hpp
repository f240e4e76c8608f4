#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace diffeo1d {

// Piecewise-cubic Hermite interpolant. Two slope rules:
//   monotone: Fritsch-Carlson-Butland slopes, shape preserving (for map data);
//   smooth:   centered 3-point slopes, no clamping (for generic samples).
class CubicInterp {
 public:
  enum class Slopes { monotone, smooth };

  CubicInterp() = default;

  CubicInterp(std::vector<double> xs, std::vector<double> ys, Slopes rule = Slopes::monotone)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    const std::size_t n = xs_.size();
    if (n < 2 || ys_.size() != n) throw std::invalid_argument("CubicInterp: need >= 2 samples");
    for (std::size_t i = 0; i + 1 < n; ++i)
      if (!(xs_[i] < xs_[i + 1])) throw std::invalid_argument("CubicInterp: xs not strictly increasing");
    ms_.resize(n);
    std::vector<double> h(n - 1), sec(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = xs_[i + 1] - xs_[i];
      sec[i] = (ys_[i + 1] - ys_[i]) / h[i];
    }
    if (n == 2) {
      ms_[0] = ms_[1] = sec[0];
    } else if (rule == Slopes::monotone) {
      // Centered slopes clamped into the Fritsch-Carlson box [0, 3 min |sec|]:
      // shape preserving, full accuracy on smooth monotone data.
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (sec[i - 1] == 0.0 || sec[i] == 0.0 || (sec[i - 1] > 0) != (sec[i] > 0)) {
          ms_[i] = 0.0;
        } else {
          const double cand = (h[i] * sec[i - 1] + h[i - 1] * sec[i]) / (h[i - 1] + h[i]);
          const double cap = 3.0 * std::min(std::fabs(sec[i - 1]), std::fabs(sec[i]));
          const double sgn = sec[i] > 0 ? 1.0 : -1.0;
          ms_[i] = sgn * std::clamp(sgn * cand, 0.0, cap);
        }
      }
      ms_[0] = edge_slope(h[0], h[1], sec[0], sec[1]);
      ms_[n - 1] = edge_slope(h[n - 2], h[n - 3], sec[n - 2], sec[n - 3]);
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i)
        ms_[i] = (h[i] * sec[i - 1] + h[i - 1] * sec[i]) / (h[i - 1] + h[i]);
      ms_[0] = sec[0] + (sec[0] - ms_[1]);
      ms_[n - 1] = sec[n - 2] + (sec[n - 2] - ms_[n - 2]);
    }
  }

  double x_front() const { return xs_.front(); }
  double x_back() const { return xs_.back(); }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

  // Local form y_i + h (m_i t + c2 t^2 + c3 t^3) stays accurate on cells
  // whose y-variation is near the rounding floor of |y|.
  double eval(double x) const {
    const std::size_t i = cell(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double sec = (ys_[i + 1] - ys_[i]) / h;
    const double c2 = 3 * sec - 2 * ms_[i] - ms_[i + 1];
    const double c3 = ms_[i] + ms_[i + 1] - 2 * sec;
    return ys_[i] + h * t * (ms_[i] + t * (c2 + t * c3));
  }

  double deriv(double x) const {
    const std::size_t i = cell(x);
    const double h = xs_[i + 1] - xs_[i];
    const double t = (x - xs_[i]) / h;
    const double sec = (ys_[i + 1] - ys_[i]) / h;
    const double c2 = 3 * sec - 2 * ms_[i] - ms_[i + 1];
    const double c3 = ms_[i] + ms_[i + 1] - 2 * sec;
    return ms_[i] + t * (2 * c2 + t * 3 * c3);
  }

  // Exact integral of the cubic over [a,b] within the table range.
  double integral(double a, double b) const {
    if (a == b) return 0.0;
    if (a > b) return -integral(b, a);
    double acc = 0.0;
    std::size_t i = cell(a);
    double left = a;
    while (left < b) {
      const double right = std::min(b, xs_[i + 1]);
      acc += cell_integral(i, left, right);
      left = right;
      if (left >= b || i + 2 >= xs_.size()) break;
      ++i;
    }
    return acc;
  }

 private:
  static double edge_slope(double h0, double h1, double s0, double s1) {
    double m = ((2 * h0 + h1) * s0 - h0 * s1) / (h0 + h1);
    if ((m > 0) != (s0 > 0) || s0 == 0.0) m = 0.0;
    else if ((s0 > 0) != (s1 > 0) && std::abs(m) > 3 * std::abs(s0)) m = 3 * s0;
    return m;
  }

  std::size_t cell(double x) const {
    if (!(x >= xs_.front() && x <= xs_.back()))
      throw std::out_of_range("CubicInterp: x outside table range");
    auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
    std::size_t i = (it == xs_.begin()) ? 0 : std::size_t(it - xs_.begin()) - 1;
    if (i + 1 >= xs_.size()) i = xs_.size() - 2;
    return i;
  }

  double cell_integral(std::size_t i, double a, double b) const {
    const double h = xs_[i + 1] - xs_[i];
    const double ta = (a - xs_[i]) / h, tb = (b - xs_[i]) / h;
    const double sec = (ys_[i + 1] - ys_[i]) / h;
    const double c2 = 3 * sec - 2 * ms_[i] - ms_[i + 1];
    const double c3 = ms_[i] + ms_[i + 1] - 2 * sec;
    auto F = [&](double t) {
      const double t2 = t * t;
      return h * h * t2 * (ms_[i] / 2 + t * (c2 / 3 + t * c3 / 4));
    };
    return ys_[i] * (b - a) + F(tb) - F(ta);
  }

  std::vector<double> xs_, ys_, ms_;
};

}  // namespace diffeo1d
