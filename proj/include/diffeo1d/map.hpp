#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "diffeo1d/errors.hpp"
#include "diffeo1d/grid.hpp"
#include "diffeo1d/pl_map.hpp"

namespace diffeo1d {

// Orientation-preserving diffeomorphism representation on [0,1].
// All representations are immutable after construction.
class map_rep {
 public:
  virtual ~map_rep() = default;
  virtual double eval(double x) const = 0;
  virtual double deriv(double x) const = 0;  // right derivative at kinks
  virtual double deriv_left(double x) const { return deriv(x); }
  // Affine derivative Lf = D log Df, where the representation knows it.
  virtual std::optional<double> affine_deriv(double) const { return std::nullopt; }
  // Interior points where log Df jumps (empty for C^1 representations).
  virtual std::vector<double> kinks() const { return {}; }
  virtual const PLMap* as_pl() const { return nullptr; }

  // f(x) - x; overridden where a cancellation-free form exists.
  virtual double displacement(double x) const { return eval(x) - x; }

  // Closed-form structure hooks consulted by invert/compose/iterate.
  virtual std::shared_ptr<const map_rep> closed_inverse() const { return nullptr; }
  virtual std::shared_ptr<const map_rep> closed_compose_after(const map_rep&) const { return nullptr; }
  virtual std::shared_ptr<const map_rep> closed_power(long) const { return nullptr; }
};

using rep_ptr = std::shared_ptr<const map_rep>;

// Monotone root solve on [lo,hi]: bisection to absolute width `bisect_tol`,
// then a Newton polish when a derivative is supplied.
inline double solve_increasing(const std::function<double(double)>& g, double target, double lo,
                               double hi, const std::function<double(double)>& dg = nullptr,
                               double bisect_tol = 1e-14) {
  double flo = g(lo) - target, fhi = g(hi) - target;
  if (flo > 0 || fhi < 0) {
    if (std::fabs(flo) < 1e-15) return lo;
    if (std::fabs(fhi) < 1e-15) return hi;
    throw root_find_error("solve_increasing: target not bracketed (non-monotone data?)");
  }
  for (int it = 0; it < 200 && hi - lo > bisect_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = g(mid) - target;
    if (fm <= 0) lo = mid; else hi = mid;
  }
  double x = 0.5 * (lo + hi);
  if (dg) {
    for (int it = 0; it < 2; ++it) {
      const double d = dg(x);
      if (!(d > 0)) break;
      const double step = (g(x) - target) / d;
      const double xn = x - step;
      if (xn >= lo - bisect_tol && xn <= hi + bisect_tol) x = std::clamp(xn, lo, hi);
    }
  }
  return x;
}

class IdentityRep final : public map_rep {
 public:
  double eval(double x) const override { return x; }
  double deriv(double) const override { return 1.0; }
  std::optional<double> affine_deriv(double) const override { return 0.0; }
};

class PLRep final : public map_rep {
 public:
  explicit PLRep(PLMap m) : m_(std::move(m)) {}
  double eval(double x) const override { return m_.eval(x); }
  double deriv(double x) const override { return m_.deriv(x); }
  double deriv_left(double x) const override { return m_.deriv(x, true); }
  std::vector<double> kinks() const override { return m_.kinks(); }
  const PLMap* as_pl() const override { return &m_; }

 private:
  PLMap m_;
};

// Time-t map of the unit logistic field x(1-x):  x -> e^t x / (1 + (e^t - 1) x).
class MobiusRep final : public map_rep {
 public:
  explicit MobiusRep(double t) : t_(t), a_(std::expm1(t)) {}
  double time() const { return t_; }
  double eval(double x) const override { return std::exp(t_) * x / (1.0 + a_ * x); }
  double deriv(double x) const override {
    const double d = 1.0 + a_ * x;
    return std::exp(t_) / (d * d);
  }
  std::optional<double> affine_deriv(double x) const override { return -2.0 * a_ / (1.0 + a_ * x); }

 private:
  double t_, a_;
};

class CompositionRep final : public map_rep {
 public:
  // Maps in application order: eval applies seq[0] first.
  explicit CompositionRep(std::vector<rep_ptr> seq) : seq_(std::move(seq)) {}
  const std::vector<rep_ptr>& seq() const { return seq_; }

  double eval(double x) const override {
    for (const auto& m : seq_) x = m->eval(x);
    return x;
  }
  double deriv(double x) const override { return deriv_impl(x, false); }
  double deriv_left(double x) const override { return deriv_impl(x, true); }
  std::optional<double> affine_deriv(double x) const override {
    // L(g . f) = Lg(f(x)) Df(x) + Lf(x), folded along the chain.
    double acc = 0.0, dprod = 1.0;
    for (const auto& m : seq_) {
      const auto l = m->affine_deriv(x);
      if (!l) return std::nullopt;
      acc += *l * dprod;
      dprod *= m->deriv(x);
      x = m->eval(x);
    }
    return acc;
  }
  std::vector<double> kinks() const override;

 private:
  double deriv_impl(double x, bool left) const {
    double d = 1.0;
    for (const auto& m : seq_) {
      d *= left ? m->deriv_left(x) : m->deriv(x);
      x = m->eval(x);
    }
    return d;
  }
  std::vector<rep_ptr> seq_;
};

class InverseRep final : public map_rep {
 public:
  explicit InverseRep(rep_ptr base) : base_(std::move(base)) {}
  const rep_ptr& base() const { return base_; }

  double eval(double x) const override {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    return solve_increasing([&](double y) { return base_->eval(y); }, x, 0.0, 1.0,
                            [&](double y) { return base_->deriv(y); });
  }
  double deriv(double x) const override {
    const double y = eval(x);
    return 1.0 / base_->deriv(y);
  }
  double deriv_left(double x) const override {
    const double y = eval(x);
    return 1.0 / base_->deriv_left(y);
  }
  std::optional<double> affine_deriv(double x) const override {
    const double y = eval(x);
    const auto l = base_->affine_deriv(y);
    if (!l) return std::nullopt;
    return -*l / base_->deriv(y);
  }
  std::vector<double> kinks() const override {
    std::vector<double> ks;
    for (double k : base_->kinks()) ks.push_back(base_->eval(k));
    std::sort(ks.begin(), ks.end());
    return ks;
  }

 private:
  rep_ptr base_;
};

// Value-semantics handle over an immutable representation.
class Diffeo {
 public:
  Diffeo() : rep_(std::make_shared<IdentityRep>()) {}
  explicit Diffeo(rep_ptr rep) : rep_(std::move(rep)) {
    if (!rep_) throw std::invalid_argument("Diffeo: null representation");
  }
  static Diffeo identity() { return Diffeo(); }
  static Diffeo pl(PLMap m) { return Diffeo(std::make_shared<PLRep>(std::move(m))); }
  static Diffeo mobius(double t) {
    if (t == 0.0) return identity();
    return Diffeo(std::make_shared<MobiusRep>(t));
  }

  double operator()(double x) const { return eval(x); }
  double eval(double x) const {
    if (!(x >= 0.0 && x <= 1.0)) throw domain_error("Diffeo: x outside [0,1]");
    return std::clamp(rep_->eval(x), 0.0, 1.0);
  }
  double deriv(double x) const { return rep_->deriv(x); }
  double deriv_left(double x) const { return rep_->deriv_left(x); }
  double log_deriv(double x) const { return std::log(rep_->deriv(x)); }
  std::optional<double> affine_deriv(double x) const { return rep_->affine_deriv(x); }
  std::vector<double> kinks() const { return rep_->kinks(); }
  const PLMap* as_pl() const { return rep_->as_pl(); }
  const map_rep& rep() const { return *rep_; }
  const rep_ptr& rep_handle() const { return rep_; }
  bool is_identity() const { return dynamic_cast<const IdentityRep*>(rep_.get()) != nullptr; }

 private:
  rep_ptr rep_;
};

struct EvalResult {
  double value;
  double deriv;
};

inline EvalResult evaluate(const Diffeo& f, double x) { return {f.eval(x), f.deriv(x)}; }

inline Diffeo invert(const Diffeo& f) {
  if (f.is_identity()) return f;
  if (const auto* pl = f.as_pl()) return Diffeo::pl(pl->inverse());
  if (const auto* mo = dynamic_cast<const MobiusRep*>(&f.rep())) return Diffeo::mobius(-mo->time());
  if (auto ci = f.rep().closed_inverse()) return Diffeo(ci);
  if (const auto* inv = dynamic_cast<const InverseRep*>(&f.rep())) return Diffeo(inv->base());
  if (const auto* comp = dynamic_cast<const CompositionRep*>(&f.rep())) {
    std::vector<rep_ptr> seq;
    for (auto it = comp->seq().rbegin(); it != comp->seq().rend(); ++it)
      seq.push_back(invert(Diffeo(*it)).rep_handle());
    return Diffeo(std::make_shared<CompositionRep>(std::move(seq)));
  }
  return Diffeo(std::make_shared<InverseRep>(f.rep_handle()));
}

// compose(f, g) is f after g.
inline Diffeo compose(const Diffeo& f, const Diffeo& g) {
  if (f.is_identity()) return g;
  if (g.is_identity()) return f;
  if (f.as_pl() && g.as_pl()) return Diffeo::pl(compose(*f.as_pl(), *g.as_pl()));
  const auto* mf = dynamic_cast<const MobiusRep*>(&f.rep());
  const auto* mg = dynamic_cast<const MobiusRep*>(&g.rep());
  if (mf && mg) return Diffeo::mobius(mf->time() + mg->time());
  if (auto r = f.rep().closed_compose_after(g.rep())) return Diffeo(r);
  std::vector<rep_ptr> seq;
  auto push = [&seq](const rep_ptr& r) {
    if (const auto* c = dynamic_cast<const CompositionRep*>(r.get()))
      for (const auto& m : c->seq()) seq.push_back(m);
    else seq.push_back(r);
  };
  push(g.rep_handle());
  push(f.rep_handle());
  return Diffeo(std::make_shared<CompositionRep>(std::move(seq)));
}

inline Diffeo iterate(const Diffeo& f, long n) {
  if (n == 0) return Diffeo::identity();
  if (n < 0) return invert(iterate(f, -n));
  if (const auto* pl = f.as_pl()) return Diffeo::pl(iterate(*pl, n));
  if (const auto* mo = dynamic_cast<const MobiusRep*>(&f.rep()))
    return Diffeo::mobius(double(n) * mo->time());
  if (auto r = f.rep().closed_power(n)) return Diffeo(r);
  Diffeo acc = f;
  for (long k = 1; k < n; ++k) acc = compose(f, acc);
  return acc;
}

inline std::vector<double> CompositionRep::kinks() const {
  std::vector<double> ks;
  for (std::size_t j = 0; j < seq_.size(); ++j) {
    for (double k : seq_[j]->kinks()) {
      double x = k;
      // Pull the kink back through the prefix seq_[0..j-1].
      for (std::size_t i = j; i-- > 0;) {
        Diffeo pre(seq_[i]);
        x = invert(pre).eval(x);
      }
      if (x > 0.0 && x < 1.0) ks.push_back(x);
    }
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

// Total variation of log Df over [a,b]: kink jumps counted exactly from
// one-sided derivatives, continuous part sampled on the standard grid.
inline double var_log_d(const Diffeo& f, double a = 0.0, double b = 1.0,
                        const std::vector<double>* samples = nullptr) {
  if (const auto* pl = f.as_pl()) {
    // Rational endpoints when a, b are exactly representable is not required
    // here; breakpoint membership is decided on doubles from breakpoints.
    double acc = 0.0;
    const auto& bx = pl->breakpoints();
    const auto& s = pl->slopes();
    for (std::size_t i = 1; i + 1 < bx.size(); ++i) {
      const double x = to_double(bx[i]);
      if (x > a && x < b) acc += std::fabs(log_rat(s[i] / s[i - 1]));
    }
    return acc;
  }
  static const std::vector<double> default_samples = standard_grid();
  const std::vector<double>& base = samples ? *samples : default_samples;
  std::vector<double> pts;
  pts.reserve(base.size() + 16);
  pts.push_back(a);
  for (double x : base)
    if (x > a && x < b) pts.push_back(x);
  pts.push_back(b);
  std::vector<double> kinks = f.kinks();
  for (double k : kinks)
    if (k > a && k < b) pts.push_back(k);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  std::vector<char> kink_flag(pts.size(), 0);
  std::size_t ki = 0;
  std::sort(kinks.begin(), kinks.end());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (ki < kinks.size() && kinks[ki] < pts[i]) ++ki;
    if (ki < kinks.size() && kinks[ki] == pts[i]) kink_flag[i] = 1;
  }

  double acc = 0.0;
  double prev = std::log(f.deriv(pts[0]));  // right value at a
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double left_val = std::log(f.deriv_left(pts[i]));
    acc += std::fabs(left_val - prev);
    if (kink_flag[i]) {
      const double right_val = std::log(f.deriv(pts[i]));
      acc += std::fabs(right_val - left_val);
      prev = right_val;
    } else {
      prev = left_val;
    }
  }
  return acc;
}

// sup |f(g(x)) - g(f(x))| ; exact at merged breakpoints for PL pairs.
inline double commutation_defect(const Diffeo& f, const Diffeo& g) {
  if (f.as_pl() && g.as_pl()) {
    const PLMap fg = compose(*f.as_pl(), *g.as_pl());
    const PLMap gf = compose(*g.as_pl(), *f.as_pl());
    rat best(0);
    auto scan = [&](const PLMap& m) {
      for (const auto& b : m.breakpoints()) {
        rat d = fg.eval_q(b) - gf.eval_q(b);
        if (d < 0) d = -d;
        if (d > best) best = d;
      }
    };
    scan(fg);
    scan(gf);
    return to_double(best);
  }
  double best = 0.0;
  for (double x : probe_grid())
    best = std::max(best, std::fabs(f.eval(g.eval(x)) - g.eval(f.eval(x))));
  return best;
}

}  // namespace diffeo1d
