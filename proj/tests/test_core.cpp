#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "diffeo1d/analytic.hpp"
#include "diffeo1d/circle.hpp"
#include "diffeo1d/grid_map.hpp"
#include "diffeo1d/map.hpp"
#include "diffeo1d/pl_map.hpp"

using namespace diffeo1d;
using Catch::Approx;

namespace {

// Independent oracle: fixed-step RK4 for x' = V(x), J' = V'(x) J.
std::pair<double, double> rk4_flow(double x0, double t,
                                   const std::function<double(double)>& V,
                                   const std::function<double(double)>& dV, int steps = 20000) {
  double x = x0, J = 1.0;
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    auto fx = [&](double u) { return V(u); };
    const double k1 = fx(x), l1 = dV(x) * J;
    const double k2 = fx(x + 0.5 * h * k1), l2 = dV(x + 0.5 * h * k1) * (J + 0.5 * h * l1);
    const double k3 = fx(x + 0.5 * h * k2), l3 = dV(x + 0.5 * h * k2) * (J + 0.5 * h * l2);
    const double k4 = fx(x + h * k3), l4 = dV(x + h * k3) * (J + h * l3);
    x += h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
    J += h * (l1 + 2 * l2 + 2 * l3 + l4) / 6.0;
  }
  return {x, J};
}

PLMap make_plx() {
  return PLMap({rat(0), rat(1, 4), rat(3, 4), rat(1)}, {rat(2), rat(3, 4), rat(1, 2)});
}

PLMap random_delta_pl(std::mt19937_64& rng, int pieces) {
  // Random up-map: y-values strictly above the diagonal at interior knots.
  std::uniform_int_distribution<int> num(1, 63);
  for (;;) {
    std::vector<rat> bx{rat(0)}, by{rat(0)};
    std::vector<int> cuts;
    std::uniform_int_distribution<int> cut(1, 127);
    while ((int)cuts.size() < pieces - 1) {
      int c = cut(rng);
      bool dup = false;
      for (int o : cuts) dup |= (o == c);
      if (!dup) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    bool ok = true;
    for (int i = 0; i < pieces - 1; ++i) {
      rat x(cuts[i], 128);
      // value in (x, 1), dyadic
      int lo = cuts[i] + 1, hi = 127;
      if (lo > hi) { ok = false; break; }
      std::uniform_int_distribution<int> val(lo, hi);
      rat y(val(rng), 128);
      if (!by.empty() && y <= by.back()) { ok = false; break; }
      bx.push_back(x);
      by.push_back(y);
    }
    if (!ok) continue;
    bx.push_back(rat(1));
    by.push_back(rat(1));
    try {
      PLMap m = PLMap::from_values(bx, by);
      if (m.delta_class() == 1) return m;
    } catch (const std::exception&) {
    }
  }
}

}  // namespace

TEST_CASE("evaluate: closed forms against the flow oracle") {
  const Diffeo mob = Diffeo::mobius(1.0);

  // Oracle run (logistic field) behind the frozen values below:
  auto [ox, oj] = rk4_flow(0.5, 1.0, [](double x) { return x * (1.0 - x); },
                           [](double x) { return 1.0 - 2.0 * x; });
  REQUIRE(ox == Approx(0.7310585786300049).margin(1e-12));   // e/(e+1)
  REQUIRE(oj == Approx(0.7864477329659274).margin(1e-12));   // e/(1+(e-1)/2)^2

  auto r = evaluate(mob, 0.5);
  CHECK(r.value == Approx(0.7310585786300049).margin(1e-12));
  CHECK(r.deriv == Approx(0.7864477329659274).margin(1e-12));

  CHECK(evaluate(Diffeo::identity(), 0.3).value == 0.3);
  CHECK(evaluate(Diffeo::identity(), 0.3).deriv == 1.0);

  CHECK_THROWS_AS(mob.eval(1.5), domain_error);
}

TEST_CASE("evaluate: piecewise-linear exact rational path") {
  PLMap plx = make_plx();
  CHECK(plx.eval_q(rat(1, 10)) == rat(1, 5));
  CHECK(plx.deriv_q(rat(1, 10)) == rat(2));
  CHECK(plx.eval(0.1) == Approx(0.2).margin(1e-15));
  CHECK(plx.delta_class() == 1);
}

TEST_CASE("invert") {
  PLMap plx = make_plx();
  CHECK(plx.inverse().eval_q(rat(1, 5)) == rat(1, 10));

  const Diffeo mob = Diffeo::mobius(1.0);
  CHECK(invert(mob).eval(0.7310585786300049) == Approx(0.5).margin(1e-12));
  CHECK(invert(Diffeo::identity()).is_identity());

  // var(log Df) is invariant under passing to the inverse.
  const Diffeo fpl = Diffeo::pl(plx);
  CHECK(var_log_d(invert(fpl)) == Approx(var_log_d(fpl)).margin(1e-15));
  CHECK(var_log_d(invert(mob)) == Approx(var_log_d(mob)).margin(1e-9));
}

TEST_CASE("compose and iterate") {
  PLMap plx = make_plx();
  // Hand iteration: 0.1 -> 0.2 -> 0.4 -> 0.6125 -> 0.771875.
  PLMap p4 = iterate(plx, 4);
  CHECK(p4.eval_q(rat(1, 10)) == rat(247, 320));
  CHECK(to_double(rat(247, 320)) == Approx(0.771875));

  const Diffeo mob = Diffeo::mobius(1.0);
  const double e2 = std::exp(2.0);
  CHECK(iterate(mob, 2).eval(0.5) == Approx(e2 / (e2 + 1.0)).margin(1e-12));
  CHECK(iterate(mob, 0).is_identity());
  CHECK(iterate(Diffeo::pl(plx), -1).eval(0.2) == Approx(0.1).margin(1e-15));

  // PL composition is associative with exact equality of data.
  std::mt19937_64 rng(7);
  PLMap a = random_delta_pl(rng, 4), b = random_delta_pl(rng, 5), c = random_delta_pl(rng, 4);
  PLMap lhs = compose(compose(a, b), c);
  PLMap rhs = compose(a, compose(b, c));
  REQUIRE(lhs.breakpoints().size() == rhs.breakpoints().size());
  for (std::size_t i = 0; i < lhs.breakpoints().size(); ++i) {
    CHECK(lhs.breakpoints()[i] == rhs.breakpoints()[i]);
    CHECK(lhs.values()[i] == rhs.values()[i]);
  }
}

TEST_CASE("pl piece-cap overflow") {
  PLMap plx = make_plx();
  CHECK_THROWS_AS(iterate(plx, 64, 16), pl_overflow_error);
}

TEST_CASE("var_log_d") {
  PLMap plx = make_plx();
  CHECK(plx.var_log_d() == Approx(std::log(4.0)).margin(1e-14));
  CHECK(var_log_d(Diffeo::pl(plx)) == Approx(std::log(4.0)).margin(1e-14));
  CHECK(var_log_d(Diffeo::mobius(1.0)) == Approx(2.0).margin(1e-11));
  CHECK(var_log_d(Diffeo::identity()) == 0.0);

  // var over a subinterval dominates the endpoint difference of log Df.
  const Diffeo mob = Diffeo::mobius(1.0);
  const double v = var_log_d(mob, 0.2, 0.7);
  CHECK(v >= std::fabs(mob.log_deriv(0.7) - mob.log_deriv(0.2)) - 1e-12);

  // Subadditivity over composition, and var(f^n) <= n var(f).
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    PLMap a = random_delta_pl(rng, 4), b = random_delta_pl(rng, 5);
    CHECK(compose(a, b).var_log_d() <= a.var_log_d() + b.var_log_d() + 1e-12);
  }
  for (long n : {2L, 3L, 5L}) {
    CHECK(iterate(plx, n).var_log_d() <= double(n) * plx.var_log_d() + 1e-12);
    CHECK(var_log_d(iterate(mob, n)) <= double(n) * var_log_d(mob) + 1e-9);
  }
}

TEST_CASE("build_from_log_derivative") {
  CHECK(build_from_log_derivative([](double) { return 0.0; }).eval(0.37) ==
        Approx(0.37).margin(1e-12));
  CHECK(build_from_log_derivative([](double) { return 7.0; }).eval(0.37) ==
        Approx(0.37).margin(1e-12));

  const Diffeo mob = Diffeo::mobius(1.0);
  const Diffeo rec = build_from_log_derivative([&](double x) { return mob.log_deriv(x); });
  double worst = 0.0;
  for (double x : probe_grid()) worst = std::max(worst, std::fabs(rec.eval(x) - mob.eval(x)));
  CHECK(worst < 1e-8);

  // log Dg - u is constant.
  const Diffeo g = build_from_log_derivative([](double x) { return std::sin(3.0 * x); });
  const double c0 = g.log_deriv(0.3) - std::sin(0.9);
  for (double x : {0.1, 0.45, 0.8}) {
    CHECK(g.log_deriv(x) - std::sin(3.0 * x) == Approx(c0).margin(1e-7));
  }
  CHECK_THROWS_AS(build_from_log_derivative([](double) { return std::nan(""); }),
                  std::invalid_argument);
}

TEST_CASE("rotation_number") {
  CHECK(rotation_number(CircleLift::rotation(0.3)).value == 0.3);
  CHECK(rotation_number(CircleLift::rotation(0.3)).bracket == 0.0);

  // Sine-perturbed rotation against the same orbit average at 10x budget.
  const CircleLift F =
      CircleLift::from_base(Diffeo(std::make_shared<SineRep>(0.1)), 0.5);
  const auto est = rotation_number(F, 10000000, 1e-4);
  double x = 0.0;
  const long big = 10 * est.iterations;
  for (long i = 0; i < big; ++i) x = F.eval(x);
  CHECK(est.value == Approx(x / double(big)).margin(1e-4 + 1e-5));

  // Lift of an interval map fixing 0: rotation number 0.
  const CircleLift G = CircleLift::from_base(Diffeo::pl(make_plx()), 0.0);
  CHECK(rotation_number(G, 10000000, 1e-4).value == Approx(0.0).margin(1e-4));

  CHECK_THROWS_AS(rotation_number(F, 100, 1e-6), convergence_error);
}

TEST_CASE("commutation_defect") {
  const Diffeo fpl = Diffeo::pl(make_plx());
  CHECK(commutation_defect(fpl, iterate(fpl, 2)) == 0.0);

  const Diffeo mob = Diffeo::mobius(1.0);
  CHECK(commutation_defect(mob, Diffeo::mobius(0.5)) < 1e-9);
  CHECK(commutation_defect(mob, fpl) > 0.01);
}

TEST_CASE("grid map inverse and snapshot") {
  const Diffeo mob = Diffeo::mobius(1.0);
  const Diffeo snap = snapshot(mob);
  double worst = 0.0, worst_inv = 0.0;
  const Diffeo sinv = invert(snap);
  for (double x : probe_grid()) {
    worst = std::max(worst, std::fabs(snap.eval(x) - mob.eval(x)));
    worst_inv = std::max(worst_inv, std::fabs(sinv.eval(snap.eval(x)) - x));
  }
  CHECK(worst < 1e-9);
  CHECK(worst_inv < 1e-11);
}
