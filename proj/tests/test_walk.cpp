#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>

#include "walklab/ball.hpp"
#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/kernel.hpp"
#include "walklab/rng.hpp"
#include "walklab/walk.hpp"

using namespace walklab;

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

// P^{2n}(0,0) for the simple walk on Z^3: 6^{-2n} sum_{i+j+k=n} (2n)! / (i! j! k!)^2
double z3_return(int n) {
  double s = 0;
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) {
      const int k = n - i - j;
      s += std::exp(log_factorial(2 * n) - 2 * (log_factorial(i) + log_factorial(j) + log_factorial(k)) -
                    2 * n * std::log(6.0));
    }
  }
  return s;
}

double z1_return(int n) { return std::exp(log_factorial(2 * n) - 2 * log_factorial(n) - 2 * n * std::log(2.0)); }

}  // namespace

TEST_CASE("return probabilities on Z, Z^2, Z^3 match closed forms") {
  for (int d = 1; d <= 3; ++d) {
    auto g = make_group("zd:" + std::to_string(d));
    const int n_max = d == 3 ? 12 : 30;
    auto ball = CayleyBall::enumerate(*g, 2 * n_max);
    const auto kernel = single(Kernel::simple(*g), "srw");
    Evolver ev(ball, kernel);
    ev.start_at_identity();
    for (int k = 1; k <= 2 * n_max; ++k) {
      ev.step();
      const Interval iv = ev.within(0);
      CHECK(iv.lo == iv.hi);
      if (k % 2 == 1) {
        CHECK(iv.lo == 0.0);
        continue;
      }
      const int n = k / 2;
      const double expect = d == 1 ? z1_return(n) : d == 2 ? std::pow(z1_return(n), 2) : z3_return(n);
      CHECK(iv.lo == doctest::Approx(expect).epsilon(1e-12));
    }
    CHECK(ev.mass() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("killed evolution gives a rigorous interval") {
  auto g = make_group("z:1");
  auto ball = CayleyBall::enumerate(*g, 10);
  const auto kernel = single(Kernel::simple(*g), "srw");
  auto big = CayleyBall::enumerate(*g, 200);
  for (int k : {20, 50, 100}) {
    for (int r : {0, 2, 6}) {
      const Interval small = small_ball_probability(ball, kernel, k, r);
      const Interval exact = small_ball_probability(big, kernel, k, r);
      CHECK(exact.lo == exact.hi);
      CHECK(small.lo <= exact.lo + 1e-15);
      CHECK(small.hi >= exact.hi - 1e-15);
    }
  }
  CHECK(small_ball_probability(big, kernel, 5, 5).lo == 1.0);
}

TEST_CASE("exit-time tail matches a dense Dirichlet matrix power") {
  auto g = make_group("z:1");
  auto ball = CayleyBall::enumerate(*g, 20);
  const auto kernel = single(Kernel::simple(*g), "srw");
  for (int r : {2, 4, 8}) {
    const int m = 2 * r + 1;
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i + 1 < m; ++i) q(i, i + 1) = q(i + 1, i) = 0.5;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m);
    v(r) = 1;
    for (int k = 1; k <= 200; ++k) {
      v = q * v;
      if (k % 37 == 0) CHECK(exit_time_tail(ball, kernel, r, k) == doctest::Approx(v.sum()).epsilon(1e-11));
    }
  }
}

TEST_CASE("lamplighter range DP matches the exact engine") {
  auto g = make_group("lamplighter");
  auto ball = CayleyBall::enumerate(*g, 18);
  const auto kernel = parse_kernel("switch-walk-switch", *g);
  CHECK(kernel.steps.size() == 3);
  for (int n = 1; n <= 6; ++n) {
    const Interval iv = return_probability(ball, kernel, n);
    CHECK(iv.lo == iv.hi);
    CHECK(lamplighter_range_dp(n) == doctest::Approx(iv.lo).epsilon(1e-12));
  }
}

TEST_CASE("Monte Carlo interval covers the exact value and ignores worker count") {
  auto g = make_group("zd:2");
  auto ball = CayleyBall::enumerate(*g, 12);
  const auto kernel = single(Kernel::simple(*g), "srw");
  const double exact = small_ball_probability(ball, kernel, 10, 2).lo;
  auto a = monte_carlo_small_ball(*g, ball, kernel, 10, 2, 40000, 7, 1);
  auto b = monte_carlo_small_ball(*g, ball, kernel, 10, 2, 40000, 7, 4);
  CHECK(a.hits == b.hits);
  CHECK(a.samples == 40000);
  CHECK(a.ci_lo <= exact);
  CHECK(exact <= a.ci_hi);
  // k steps cannot leave the radius-k ball
  auto c = monte_carlo_small_ball(*g, ball, kernel, 3, 3, 1000, 1);
  CHECK(c.ci_lo == 1.0);
  CHECK(c.ci_hi == 1.0);
}

TEST_CASE("Wilson interval") {
  // textbook value: 8 successes of 10 -> [0.4902, 0.9433]
  auto [lo, hi] = wilson_interval(8, 10);
  CHECK(lo == doctest::Approx(0.4902).epsilon(1e-3));
  CHECK(hi == doctest::Approx(0.9433).epsilon(1e-3));
}

TEST_CASE("evolution does not depend on worker count") {
  auto g = make_group("zd:2");
  auto ball = CayleyBall::enumerate(*g, 30);
  const auto kernel = single(Kernel::simple(*g), "srw");
  Evolver a(ball, kernel, {.limit_radius = -1, .workers = 1});
  Evolver b(ball, kernel, {.limit_radius = -1, .workers = 5});
  a.start_at_identity();
  b.start_at_identity();
  a.advance(40);
  b.advance(40);
  CHECK(a.p() == b.p());
  CHECK(a.leaked() == b.leaked());
}

TEST_CASE("kernel validation") {
  auto g = make_group("zd:2");
  nlohmann::json bad = {{"weights", {{"e1", "1/2"}, {"E1", "1/4"}}}, {"hold", "1/4"}};
  CHECK_THROWS_AS(parse_kernel(bad, *g), Error);
  nlohmann::json lazy = {{"weights", {{"e1", "1/8"}, {"E1", "1/8"}, {"e2", "1/8"}, {"E2", "1/8"}}}, {"hold", "1/2"}};
  auto k = parse_kernel(lazy, *g);
  CHECK(k.steps.front().hold == Rational(1, 2));
  CHECK_THROWS_AS(parse_kernel("switch-walk-switch", *g), Error);
}
