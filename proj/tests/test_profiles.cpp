#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>

#include "walklab/ball.hpp"
#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/kernel.hpp"
#include "walklab/profiles.hpp"

using namespace walklab;

namespace {

using Cell = std::pair<int, int>;
using Shape = std::set<Cell>;

// Every connected set of n lattice cells containing the origin, grown one
// neighbor at a time. Independent of the engine's canonical search.
std::set<Shape> polyominoes(int n) {
  std::set<Shape> level{{Cell{0, 0}}};
  for (int size = 1; size < n; ++size) {
    std::set<Shape> next;
    for (const auto& s : level) {
      for (const auto& [x, y] : s) {
        for (auto [dx, dy] : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) {
          Shape t = s;
          if (t.insert({x + dx, y + dy}).second) next.insert(t);
        }
      }
    }
    level = std::move(next);
  }
  return level;
}

double shape_phi(const Shape& s) {
  int boundary = 0;
  for (const auto& [x, y] : s) {
    for (auto [dx, dy] : {Cell{1, 0}, Cell{-1, 0}, Cell{0, 1}, Cell{0, -1}}) boundary += s.contains({x + dx, y + dy}) ? 0 : 1;
  }
  return boundary / (4.0 * static_cast<double>(s.size()));
}

double shape_lambda(const Shape& s) {
  std::vector<Cell> cells(s.begin(), s.end());
  const auto n = static_cast<Eigen::Index>(cells.size());
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto [xi, yi] = cells[static_cast<std::size_t>(i)];
      const auto [xj, yj] = cells[static_cast<std::size_t>(j)];
      if (std::abs(xi - xj) + std::abs(yi - yj) == 1) p(i, j) = 0.25;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p);
  return 1 - es.eigenvalues().maxCoeff();
}

}  // namespace

TEST_CASE("exact profiles on Z: Phi = 1/n and Lambda = 1 - cos(pi/(n+1))") {
  auto g = make_group("z:1");
  auto ball = CayleyBall::enumerate(*g, 10);
  auto ex = profile_exact_small(ball, Kernel::simple(*g), 10);
  REQUIRE(ex.phi.points.size() == 10);
  for (int n = 1; n <= 10; ++n) {
    const auto& p = ex.phi.points[static_cast<std::size_t>(n - 1)];
    CHECK(p.kind == Kind::kExact);
    CHECK(ex.phi_exact[static_cast<std::size_t>(n - 1)] == Rational(1, n));
    const auto& l = ex.lambda.points[static_cast<std::size_t>(n - 1)];
    CHECK(l.value == doctest::Approx(1 - std::cos(std::numbers::pi / (n + 1))).epsilon(1e-12));
    // the witness is an interval
    std::vector<std::int64_t> xs;
    for (auto i : ex.phi_witness[static_cast<std::size_t>(n)]) xs.push_back(zd_coords(ball.key(i), 1)[0]);
    std::sort(xs.begin(), xs.end());
    CHECK(xs.back() - xs.front() == n - 1);
  }
  CHECK(ex.lambda_converged);
}

TEST_CASE("exact profiles on Z^2 agree with polyomino enumeration") {
  auto g = make_group("zd:2");
  auto ball = CayleyBall::enumerate(*g, 7);
  auto ex = profile_exact_small(ball, Kernel::simple(*g), 7);
  // both profiles are infima over |Omega| <= n
  double best_phi = 1, best_lambda = 1;
  for (int n = 1; n <= 7; ++n) {
    double size_phi = 1;
    for (const auto& s : polyominoes(n)) {
      size_phi = std::min(size_phi, shape_phi(s));
      best_lambda = std::min(best_lambda, shape_lambda(s));
    }
    // minimal polyomino perimeter is 2 ceil(2 sqrt n)
    CHECK(size_phi == doctest::Approx(2 * std::ceil(2 * std::sqrt(n)) / (4.0 * n)));
    best_phi = std::min(best_phi, size_phi);
    CHECK(ex.phi.points[static_cast<std::size_t>(n - 1)].value == doctest::Approx(best_phi).epsilon(1e-14));
    CHECK(ex.lambda.points[static_cast<std::size_t>(n - 1)].value == doctest::Approx(best_lambda).epsilon(1e-10));
  }
}

TEST_CASE("boundary ratio and Dirichlet gap of a box") {
  auto g = make_group("zd:2");
  std::vector<State> box;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 5; ++y) box.push_back(zd_key(std::vector<std::int64_t>{x, y}));
  }
  auto set = local_from_states(*g, box);
  CHECK(boundary_ratio(set, Kernel::simple(*g)) == Rational(2 * (3 + 5), 4 * 15));
  const double gap = 1 - 0.5 * (std::cos(std::numbers::pi / 4) + std::cos(std::numbers::pi / 6));
  CHECK(dirichlet_gap(set, Kernel::simple(*g)).value == doctest::Approx(gap).epsilon(1e-12));
}

TEST_CASE("Lanczos and dense gaps agree on a large box") {
  auto g = make_group("zd:2");
  std::vector<State> box;
  for (int x = 0; x < 25; ++x) {
    for (int y = 0; y < 20; ++y) box.push_back(zd_key(std::vector<std::int64_t>{x, y}));
  }
  auto set = local_from_states(*g, box);
  const auto est = dirichlet_gap(set, Kernel::simple(*g));
  const double gap = 1 - 0.5 * (std::cos(std::numbers::pi / 26) + std::cos(std::numbers::pi / 21));
  CHECK(est.converged);
  CHECK(est.value == doctest::Approx(gap).epsilon(1e-9));
  CHECK(est.value >= gap - 1e-12);  // a Ritz value bounds the gap from above
}

TEST_CASE("upper profiles bound the exact values and are re-certified") {
  for (const char* spec : {"z:1", "zd:2"}) {
    auto g = make_group(spec);
    auto ball = CayleyBall::enumerate(*g, 9);
    const auto kernel = Kernel::simple(*g);
    auto ex = profile_exact_small(ball, kernel, 9);
    for (auto strategy : {Strategy::kStructured, Strategy::kGreedy, Strategy::kAnneal}) {
      AnnealOptions opt;
      opt.iterations = 300;
      opt.restarts = 2;
      auto up = profile_upper(*g, ball, kernel, {2, 4, 6, 9}, strategy, opt);
      for (const auto& p : up.phi.points) {
        CHECK(p.kind == Kind::kUpper);
        CHECK(p.value >= ex.phi.points[static_cast<std::size_t>(p.n) - 1].value - 1e-15);
      }
      for (const auto& p : up.lambda.points) {
        CHECK(p.value >= ex.lambda.points[static_cast<std::size_t>(p.n) - 1].value - 1e-12);
      }
    }
  }
}

TEST_CASE("growth-based bounds bracket the exact profile") {
  for (const char* spec : {"z:1", "zd:2"}) {
    auto g = make_group(spec);
    auto ball = CayleyBall::enumerate(*g, 24);
    const auto kernel = Kernel::simple(*g);
    auto ex = profile_exact_small(ball, kernel, 8);
    const auto growth = ball.growth();
    for (int n = 1; n <= 8; ++n) {
      const double exact = ex.phi.points[static_cast<std::size_t>(n - 1)].value;
      CHECK(csc_lower_at(growth, kernel, n) <= exact);
    }
    // 1/(2 deg Gr^{-1}(2n)) on Z: Gr^{-1}(2) = 1, so Phi(1) >= 1/4
    if (std::string(spec) == "z:1") CHECK(csc_lower_at(growth, kernel, 1) == doctest::Approx(0.25));
    for (const auto& p : growth_isoperimetry_upper(growth, {2, 4, 8, 16, 64}).points) {
      if (p.n <= 8) CHECK(p.value >= ex.phi.points[static_cast<std::size_t>(p.n) - 1].value);
    }
  }
  const std::vector<std::uint64_t> g{1, 3, 5, 7};
  CHECK(growth_inverse(g, 4) == 2);
  CHECK_FALSE(growth_inverse(g, 8).has_value());
  CHECK_THROWS_AS(csc_lower_at(g, Kernel::simple(*make_group("z:1")), 100), Error);
}

TEST_CASE("Cheeger audit") {
  auto g = make_group("lamplighter");
  auto ball = CayleyBall::enumerate(*g, 8);
  auto ex = profile_exact_small(ball, Kernel::simple(*g), 8);
  auto rep = cheeger_consistency(ex.phi, ex.lambda);
  CHECK(rep.pairs_checked == 16);  // two inequalities per n
  CHECK(rep.violations.empty());

  ProfileTable phi{"phi", {{1, 0.1, Kind::kExact, ""}}};
  ProfileTable lambda{"lambda", {{1, 0.5, Kind::kExact, ""}}};
  auto bad = cheeger_consistency(phi, lambda);
  REQUIRE(bad.violations.size() == 1);
  // an UPPER Lambda above an UPPER Phi proves nothing
  lambda.points[0].kind = Kind::kUpper;
  phi.points[0].kind = Kind::kUpper;
  CHECK(cheeger_consistency(phi, lambda).violations.empty());
}

TEST_CASE("connected restriction is exact for Lambda on the window audit") {
  auto g = make_group("zd:2");
  auto ball = CayleyBall::enumerate(*g, 6);
  auto ex = profile_exact_small(ball, Kernel::simple(*g), 6);
  auto audit = lambda_window_audit(ball, Kernel::simple(*g), ex, 1, 5);
  CHECK(audit.window == 5);
  CHECK(audit.subsets == 31);
  CHECK(audit.below_exact == 0);
}

TEST_CASE("profile table JSON round trip and envelope") {
  ProfileTable t{"phi", {{1, 1.0, Kind::kExact, "1"}, {4, 0.5, Kind::kUpper, "box:2:2"}, {8, 0.1, Kind::kLower, "csc"}}};
  auto back = ProfileTable::from_json(t.to_json());
  CHECK(back.quantity == "phi");
  REQUIRE(back.points.size() == 3);
  CHECK(back.points[1].witness == "box:2:2");
  CHECK(back.points[2].kind == Kind::kLower);
  CHECK(back.bounds(Kind::kUpper).size() == 2);
  CHECK(back.bounds(Kind::kLower).size() == 2);
  CHECK(kind_from_string(to_string(Kind::kUpper)) == Kind::kUpper);
}
