#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "walklab/ball.hpp"
#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/kernel.hpp"
#include "walklab/occupation.hpp"

using namespace walklab;

namespace {

double log_factorial(int n) { return std::lgamma(n + 1.0); }

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

// Green's function of the simple walk on Z^3 at the origin (Watson)
constexpr double kZ3Green = 1.516386059151978;

}  // namespace

TEST_CASE("partial sums match the multinomial return probabilities") {
  auto g = make_group("zd:3");
  auto ball = CayleyBall::enumerate(*g, 12);
  const auto kernel = single(Kernel::simple(*g), "srw");
  auto res = occupation_moments(*g, ball, kernel, {0}, {1, 2}, 12);
  REQUIRE(res.size() == 2);
  double s1 = 0, s2 = 0;
  for (int n = 0; n <= 6; ++n) {
    s1 += z3_return(n);
    s2 += (2 * n + 1) * z3_return(n);
  }
  CHECK(res[0].partial == doctest::Approx(s1).epsilon(1e-12));
  CHECK(res[0].partial_err == 0);
  CHECK(res[1].partial == doctest::Approx(s2).epsilon(1e-12));
  CHECK(res[0].tail_status == "UNCONTROLLED");  // horizon below the tail window
}

TEST_CASE("Green's function of Z^3") {
  auto g = make_group("zd:3");
  auto ball = CayleyBall::enumerate(*g, 48);
  const auto kernel = single(Kernel::simple(*g), "srw");
  auto res = occupation_moments(*g, ball, kernel, {0, 2}, {1, 2}, 80);
  REQUIRE(res.size() == 4);
  CHECK(res[0].tail_status == "MODEL-DEPENDENT");
  CHECK(std::abs(res[0].total / kZ3Green - 1) <= 0.01);
  // p = 2 diverges on Z^3
  CHECK(res[1].tail_status == "UNCONTROLLED");
  CHECK(std::isinf(res[1].tail));
  CHECK(res[2].total > res[0].total);
}

TEST_CASE("non-lattice groups and leakage") {
  auto g = make_group("lamplighter");
  auto ball = CayleyBall::enumerate(*g, 12);
  const auto kernel = single(Kernel::simple(*g), "srw");
  auto res = occupation_moments(*g, ball, kernel, {1}, {1}, 8);
  CHECK(res[0].tail_status == "UNCONTROLLED");
  CHECK(std::isnan(res[0].tail));
  try {
    (void)occupation_moments(*g, ball, kernel, {1}, {1}, 40);
    FAIL("expected LEAKAGE");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kLeakage);
  }
  CHECK_THROWS_AS(occupation_moments(*g, ball, kernel, {20}, {1}, 4), Error);
}

TEST_CASE("exponent fit") {
  std::vector<OccupationResult> rs;
  for (int r : {2, 4, 8, 16}) {
    OccupationResult a;
    a.r = r;
    a.p = 1;
    a.tail_status = "MODEL-DEPENDENT";
    a.total = 3 * r * r;
    rs.push_back(a);
  }
  auto fit = occupation_exponent_fit(rs, 1);
  CHECK(fit.beta == doctest::Approx(2));
  CHECK(fit.points == 4);
  rs.pop_back();
  CHECK_THROWS_AS(occupation_exponent_fit(rs, 1), Error);
}

TEST_CASE("counterexample walk against the max-N formula") {
  const std::vector<double> nu{0.5, 0.25, 0.125, 0.125};
  const int steps = 12;
  auto rep = counterexample_walk(nu, steps, 200000, 5);
  REQUIRE(rep.formula_return.size() == static_cast<std::size_t>(steps));
  CHECK(rep.max_z <= 4.0);
  // E 2^{-2M_n - 1} with P(M_n <= m) = F(m)^n
  for (int n = 1; n <= steps; ++n) {
    double f = 0, prev = 0, cdf = 0;
    for (int m = 0; m < static_cast<int>(nu.size()); ++m) {
      cdf += nu[static_cast<std::size_t>(m)];
      const double now = std::pow(cdf, n);
      f += (now - prev) * std::exp2(-2.0 * m - 1);
      prev = now;
    }
    CHECK(rep.formula_return[static_cast<std::size_t>(n - 1)] == doctest::Approx(f).epsilon(0.02));
  }
  CHECK(rep.max_distance_ratio <= 2.0 * 3 + 1);
  auto again = counterexample_walk(nu, steps, 200000, 5, 3);
  CHECK(again.simulated_return == rep.simulated_return);
}
