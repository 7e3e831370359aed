#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "walklab/ball.hpp"
#include "walklab/bounds.hpp"
#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/kernel.hpp"
#include "walklab/monotone.hpp"
#include "walklab/profiles.hpp"
#include "walklab/walk.hpp"

using namespace walklab;

TEST_CASE("generalized inverse") {
  auto f = MonotoneFunction::power_log(1, 1, 0);
  CHECK(generalized_inverse(f, 0.25) == doctest::Approx(4));
  CHECK(f(generalized_inverse(f, 0.3)) <= 0.3);
  auto g = MonotoneFunction::power_log(2, 0.5, 1);
  for (double x : {0.5, 0.1, 0.01}) {
    const double t = generalized_inverse(g, x);
    CHECK(g(t) <= x * (1 + 1e-12));
    CHECK(g(t * (1 - 1e-9)) > x * (1 - 1e-9));
  }
  auto step = MonotoneFunction::tabulated({{1, 1.0}, {4, 0.5}, {10, 0.2}}, Direction::kDecreasing, Interp::kStep);
  CHECK(generalized_inverse(step, 0.5) == doctest::Approx(4));
  CHECK(step.extrapolates(20));
  CHECK_FALSE(step.extrapolates(5));
  auto inc = MonotoneFunction::custom([](double x) { return x * x; }, Direction::kIncreasing, "sq");
  CHECK(generalized_inverse(inc, 9) == doctest::Approx(3));
  CHECK(generalized_inverse(f, 2.0) == 1);
  auto floor = MonotoneFunction::custom([](double t) { return 1 / t + 0.1; }, Direction::kDecreasing, "floor");
  try {
    (void)generalized_inverse(floor, 0.05);
    FAIL("expected OUT_OF_RANGE");
  } catch (const OutOfRangeError& e) {
    CHECK(e.side() == OutOfRangeError::Side::kBelow);
  }
}

TEST_CASE("Z profile models") {
  CHECK(z_phi_exact()(7) == doctest::Approx(1.0 / 7));
  CHECK(generalized_inverse(z_phi_exact(), 0.25) == doctest::Approx(4));
  CHECK(z_lambda_exact()(5) == doctest::Approx(1 - std::cos(std::numbers::pi / 6)).epsilon(1e-14));
  // stays accurate where 1 - cos underflows
  const double big = std::ldexp(1.0, 40);
  CHECK(z_lambda_exact()(big) == doctest::Approx(std::numbers::pi * std::numbers::pi / (2 * (big + 1) * (big + 1))));
}

TEST_CASE("lamplighter models bound the computed profiles") {
  auto g = make_group("lamplighter");
  auto ball = CayleyBall::enumerate(*g, 16);
  const auto kernel = Kernel::simple(*g);
  // lamp-interval sets: L 2^L elements with boundary ratio 2/(3L)
  for (const auto& w : structured_witnesses(*g, &ball, 2000)) {
    if (w.label.rfind("lamp-interval:", 0) != 0) continue;
    const int len = std::stoi(w.label.substr(14));
    const auto n = static_cast<double>(len) * std::ldexp(1.0, len);
    CHECK(static_cast<double>(w.members.size()) == n);
    const double phi = boundary_ratio(local_from_states(*g, w.members), kernel).to_double();
    CHECK(phi == doctest::Approx(2.0 / (3 * len)));
    CHECK(lamplighter_phi_upper()(n) >= phi - 1e-15);
  }
  auto ex = profile_exact_small(ball, kernel, 8);
  for (const auto& p : ex.lambda.points) CHECK(lamplighter_lambda_lower()(p.n) <= p.value);
}

TEST_CASE("psi closed forms") {
  auto one = MonotoneFunction::power_log(1, 0, 0);
  for (double t : {0.5, 2.0, 10.0}) CHECK(grigoryan_psi(one, t) == doctest::Approx(std::exp(t)).epsilon(1e-6));
  for (int d : {1, 2, 3, 4}) {
    auto f = MonotoneFunction::power_log(1, 2.0 / d, 0);
    for (double t : {1.0, 10.0, 100.0}) {
      CHECK(grigoryan_psi(f, t) == doctest::Approx(std::pow(1 + 2 * t / d, d / 2.0)).epsilon(1e-6));
    }
  }
  // t = (log psi)^3 / 3
  auto lg = MonotoneFunction::power_log(1, 0, 2);
  for (double t : {1.0, 30.0, 1000.0}) {
    CHECK(grigoryan_psi(lg, t) == doctest::Approx(std::exp(std::cbrt(3 * t))).epsilon(1e-6));
  }
  // Psi(x) = x (x log 2)^2
  for (double n : {10.0, 1e4}) {
    CHECK(psi_doubling_inverse(lg, n) == doctest::Approx(std::cbrt(n / (std::log(2.0) * std::log(2.0)))).epsilon(1e-9));
  }
  CHECK(psi_doubling(lg, 3) == doctest::Approx(3 * 9 * std::log(2.0) * std::log(2.0)));
}

TEST_CASE("small-ball bound against a direct evaluation") {
  const double c = 0.25;
  for (int k : {16, 256, 4096, 65536}) {
    for (int r : {1, 2, 5}) {
      auto b = small_ball_bound(k, r, z_lambda_exact(), z_phi_exact(), c);
      // Φ^{-1}(c/r) = ceil(r/c) on Z; scan ℓ directly
      const double base = std::ceil(r / c);
      int ell = 0;
      for (int l = 1; l < kEllCap; ++l) {
        const double n = std::ldexp(base, l + 1);
        const double lambda = 1 - std::cos(std::numbers::pi / (n + 1));
        if (l * std::log(2.0) / lambda <= k) ell = l;
      }
      CHECK(b.ell_star == ell);
      CHECK(b.rhs == doctest::Approx(2 * std::exp(-0.5 * std::log(2.0) * ell)));
      CHECK_FALSE(b.extrapolated);
      CHECK_FALSE(b.capped);
    }
  }
  auto t = MonotoneFunction::tabulated({{1, 0.5}, {8, 0.01}}, Direction::kDecreasing);
  CHECK(small_ball_bound(1 << 20, 1, t, z_phi_exact(), 0.25).extrapolated);
}

TEST_CASE("doubling-case bound") {
  CHECK_THROWS_AS(doubling_case_bound(100, 2, 1, 0.25, z_lambda_exact()), Error);
  auto lg = MonotoneFunction::power_log(1, 0, 2);
  auto rep = doubling_case_bound(1000, 4, 2, 1.0 / 6, lg);
  CHECK(rep.diffusive == doctest::Approx(1000.0 / 16));
  CHECK(rep.heat == doctest::Approx(psi_doubling_inverse(lg, 1000.0 / 6)));
  CHECK(rep.value == doctest::Approx(std::exp(-std::min(rep.diffusive, rep.heat) / 6)));
  CHECK(rep.regime == "return");
  CHECK(rep.crossover_k > 0);
}

TEST_CASE("measured small-ball probabilities respect the bound on Z") {
  auto g = make_group("z:1");
  auto ball = CayleyBall::enumerate(*g, 600);
  const auto kernel = single(Kernel::simple(*g), "srw");
  auto rep = empirical_domination(ball, kernel, {16, 64, 256, 1024}, {1, 2, 4, 8}, z_lambda_exact(), z_phi_exact(),
                                  0.25);
  CHECK(rep.points.size() == 16);
  CHECK(rep.violations == 0);
  for (const auto& p : rep.points) {
    CHECK(p.hi <= p.rhs);
    CHECK(p.lo <= p.hi);
    const Interval iv = small_ball_probability(ball, kernel, p.k, p.r);
    CHECK(p.lo == iv.lo);
  }
}

TEST_CASE("saturation exponent and rearrangement on Z") {
  auto g = make_group("z:1");
  auto ball = CayleyBall::enumerate(*g, 10);
  auto ex = profile_exact_small(ball, Kernel::simple(*g), 10);
  auto fit = saturation_exponent_fit(ex.phi, ex.lambda);
  CHECK(fit.points == 9);  // Phi(1) = 1 carries no slope information
  CHECK(fit.alpha == doctest::Approx(2).epsilon(0.15));
  CHECK_FALSE(fit.one_sided);
  auto c12 = rearrangement_check(ex.phi, ex.lambda);
  CHECK(c12.holds);
  CHECK_FALSE(c12.rows.empty());
}
