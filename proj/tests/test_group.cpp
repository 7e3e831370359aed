#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <filesystem>
#include <map>
#include <queue>
#include <set>

#include "walklab/ball.hpp"
#include "walklab/bounds.hpp"
#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/rational.hpp"

using namespace walklab;

namespace {

// Breadth-first growth of an explicitly represented group; the oracle for the
// engine's canonical keys.
template <typename T, typename Step>
std::vector<std::uint64_t> bfs_growth(T origin, int gens, int radius, Step step) {
  std::map<T, int> dist{{origin, 0}};
  std::queue<T> q;
  q.push(origin);
  std::vector<std::uint64_t> sphere(static_cast<std::size_t>(radius) + 1, 0);
  sphere[0] = 1;
  while (!q.empty()) {
    T x = q.front();
    q.pop();
    const int d = dist[x];
    if (d == radius) continue;
    for (int g = 0; g < gens; ++g) {
      T y = step(x, g);
      if (dist.emplace(y, d + 1).second) {
        ++sphere[static_cast<std::size_t>(d) + 1];
        q.push(y);
      }
    }
  }
  for (std::size_t r = 1; r < sphere.size(); ++r) sphere[r] += sphere[r - 1];
  return sphere;
}

std::uint64_t binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t b = 1;
  for (int i = 1; i <= k; ++i) b = b * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return b;
}

}  // namespace

TEST_CASE("rational arithmetic") {
  CHECK(Rational::parse("0.25") == Rational(1, 4));
  CHECK(Rational::parse("6/8") == Rational(3, 4));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 4) == Rational(1, 2));
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(-2, -4) == Rational(1, 2));
  CHECK_THROWS_AS(Rational(1, 0), Error);
}

TEST_CASE("Z^d ball sizes match the lattice-point count") {
  for (int d = 1; d <= 3; ++d) {
    auto g = make_group("zd:" + std::to_string(d));
    auto ball = CayleyBall::enumerate(*g, 10);
    const auto growth = ball.growth();
    for (int r = 0; r <= 10; ++r) {
      // |{x in Z^d : |x|_1 <= r}| = sum_k 2^k C(d,k) C(r,k)
      std::uint64_t expect = 0;
      for (int k = 0; k <= d; ++k) expect += (std::uint64_t{1} << k) * binom(d, k) * binom(r, k);
      CHECK(growth[static_cast<std::size_t>(r)] == expect);
    }
  }
}

TEST_CASE("free group growth") {
  auto g = make_group("free:2");
  auto ball = CayleyBall::enumerate(*g, 7);
  const auto growth = ball.growth();
  std::uint64_t p = 1;
  for (int r = 0; r <= 7; ++r) {
    CHECK(growth[static_cast<std::size_t>(r)] == 2 * p - 1);
    p *= 3;
  }
}

TEST_CASE("lamplighter growth matches an explicit-state BFS") {
  auto g = make_group("lamplighter");
  const int radius = 9;
  auto ball = CayleyBall::enumerate(*g, radius);
  using St = std::pair<std::set<int>, int>;  // lit lamps, cursor
  auto oracle = bfs_growth<St>({{}, 0}, 3, radius, [](St x, int gen) {
    if (gen == 0) ++x.second;
    else if (gen == 1) --x.second;
    else if (!x.first.erase(x.second)) x.first.insert(x.second);
    return x;
  });
  CHECK(ball.growth() == oracle);
  CHECK(g->find_generator("t") == 0);
  CHECK(g->find_generator("s") == 2);
}

TEST_CASE("heisenberg growth matches matrix BFS") {
  auto g = make_group("heisenberg");
  const int radius = 6;
  auto ball = CayleyBall::enumerate(*g, radius);
  using M = std::array<long, 3>;  // [[1,a,c],[0,1,b],[0,0,1]]
  auto mul = [](M x, M y) { return M{x[0] + y[0], x[1] + y[1], x[2] + y[2] + x[0] * y[1]}; };
  const std::array<M, 4> gens{M{1, 0, 0}, M{-1, 0, 0}, M{0, 1, 0}, M{0, -1, 0}};
  auto oracle = bfs_growth<M>({0, 0, 0}, 4, radius, [&](M x, int gen) { return mul(x, gens[static_cast<std::size_t>(gen)]); });
  CHECK(ball.growth() == oracle);
}

TEST_CASE("grigorchuk relations") {
  auto g = make_group("grigorchuk");
  auto power_is_identity = [&](const std::string& w, int k) {
    Word word;
    for (int i = 0; i < k; ++i) {
      for (char ch : w) word.push_back(*g->find_generator(std::string(1, ch)));
    }
    return g->canonical_key(word).empty();
  };
  // orders of ad, ac, ab are 4, 8, 16
  CHECK(power_is_identity("ad", 4));
  CHECK_FALSE(power_is_identity("ad", 2));
  CHECK(power_is_identity("ac", 8));
  CHECK_FALSE(power_is_identity("ac", 4));
  CHECK(power_is_identity("ab", 16));
  CHECK_FALSE(power_is_identity("ab", 8));
  CHECK(grigorchuk_reduce("bc") == "d");
  CHECK(grigorchuk_reduce("aa").empty());
}

TEST_CASE("canonical keys and inverse words") {
  auto g = make_group("zd:2");
  const Word w{0, 0, 2, 1};
  CHECK(g->canonical_key(w) == g->canonical_key(Word{0, 2}));
  Word both = w;
  const Word inv = g->inverse_word(w);
  both.insert(both.end(), inv.begin(), inv.end());
  CHECK(g->canonical_key(both).empty());
  CHECK(zd_coords(zd_key(std::vector<std::int64_t>{3, -2}), 2) == std::vector<std::int64_t>{3, -2});
}

TEST_CASE("lamplighter word length formula") {
  // t^3 s T^3 lights lamp 3 and returns: length 7
  LamplighterElement e;
  e.cursor = {0};
  e.lamps = {{{3}, 1}};
  CHECK(lamplighter_z_word_length(e) == 7);
  // agrees with BFS distance in the ball
  auto g = make_group("lamplighter");
  auto ball = CayleyBall::enumerate(*g, 8);
  for (std::size_t i = 0; i < ball.size(); i += 7) {
    const auto el = lamplighter_decode(ball.key(i), 1, 2);
    CHECK(lamplighter_z_word_length(el) == ball.radius_of(i));
  }
}

TEST_CASE("ball adjacency is a symmetric Cayley graph") {
  auto g = make_group("lamplighter");
  auto ball = CayleyBall::enumerate(*g, 6);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (int s = 0; s < ball.generator_count(); ++s) {
      const auto j = ball.neighbor(i, s);
      if (j == kBoundary) {
        CHECK(ball.radius_of(i) == 6);
        continue;
      }
      CHECK(ball.neighbor(j, ball.inverse(s)) == i);
      const auto ri = static_cast<int>(ball.radius_of(i)), rj = static_cast<int>(ball.radius_of(j));
      CHECK(std::abs(ri - rj) <= 1);
    }
  }
}

TEST_CASE("ball file round trip") {
  auto g = make_group("zd:2");
  auto ball = CayleyBall::enumerate(*g, 5);
  const auto path = std::filesystem::temp_directory_path() / "walklab_test_ball.wlb";
  ball.save(path);
  auto [radius, name] = CayleyBall::peek(path);
  CHECK(radius == 5);
  CHECK(name == "zd:2");
  auto back = CayleyBall::load(path);
  CHECK(back.size() == ball.size());
  CHECK(back.growth() == ball.growth());
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (int s = 0; s < 4; ++s) CHECK(back.neighbor(i, s) == ball.neighbor(i, s));
  }
  back.attach_index(*g);
  for (std::size_t i = 0; i < ball.size(); ++i) CHECK(back.key(i) == ball.key(i));
  std::filesystem::remove(path);
}

TEST_CASE("memory cap is enforced") {
  auto g = make_group("free:3");
  try {
    (void)CayleyBall::enumerate(*g, 30, {.memory_cap_bytes = 1 << 20});
    FAIL("expected MEMORY_CAP");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMemoryCap);
  }
}

TEST_CASE("edge orbit constant equals its enumeration") {
  for (const char* spec : {"z:1", "zd:2", "lamplighter", "heisenberg", "free:2"}) {
    auto g = make_group(spec);
    auto ball = CayleyBall::enumerate(*g, 4);
    CHECK(edge_orbit_constant(*g) == Rational(1, 2 * g->generator_count()));
    CHECK(edge_orbit_audit(*g, ball) == edge_orbit_constant(*g));
  }
}

TEST_CASE("invalid group names") {
  CHECK_THROWS_AS(make_group("nope"), Error);
  CHECK_THROWS_AS(make_group("zd:0"), Error);
}
