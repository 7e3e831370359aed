#include "walklab/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "walklab/error.hpp"
#include "walklab/rng.hpp"

namespace walklab {

namespace {

// Integer numerators of the kernel over a common denominator.
struct IntegerKernel {
  std::int64_t den = 1;
  std::vector<std::int64_t> num;
  std::int64_t hold = 0;
};

IntegerKernel integer_kernel(const Kernel& kernel) {
  IntegerKernel ik;
  ik.den = kernel.hold.den();
  for (const auto& w : kernel.weights) ik.den = lcm_checked(ik.den, w.den());
  for (const auto& w : kernel.weights) ik.num.push_back(w.num() * (ik.den / w.den()));
  ik.hold = kernel.hold.num() * (ik.den / kernel.hold.den());
  return ik;
}

Eigen::MatrixXd dense_block(const LocalSet& set, const std::vector<double>& w, double hold) {
  const auto n = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, i) += hold;
    for (int s = 0; s < set.gens; ++s) {
      auto j = set.nbr[static_cast<std::size_t>(i) * static_cast<std::size_t>(set.gens) + static_cast<std::size_t>(s)];
      if (j >= 0) a(i, j) += w[static_cast<std::size_t>(s)];
    }
  }
  return a;
}

std::string words_label(const CayleyBall& ball, std::span<const std::uint32_t> members, const Group* group) {
  std::string out;
  for (auto m : members) {
    if (!out.empty()) out += ' ';
    auto w = ball.word(m);
    if (w.empty()) {
      out += '1';
      continue;
    }
    for (int g : w) out += group ? group->generator_name(g) : "g" + std::to_string(g) + ".";
  }
  return out;
}

}  // namespace

LocalSet local_from_ball(const CayleyBall& ball, std::span<const std::uint32_t> members) {
  if (members.empty()) throw Error(ErrorCode::kEmptySet, "empty set");
  std::unordered_map<std::uint32_t, std::int32_t> pos;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!pos.emplace(members[i], static_cast<std::int32_t>(i)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate member");
    }
  }
  LocalSet set;
  set.gens = ball.generator_count();
  set.nbr.reserve(members.size() * static_cast<std::size_t>(set.gens));
  for (auto m : members) {
    for (int s = 0; s < set.gens; ++s) {
      auto j = ball.neighbor(m, s);
      auto it = j == kBoundary ? pos.end() : pos.find(j);
      set.nbr.push_back(it == pos.end() ? -1 : it->second);
    }
  }
  return set;
}

LocalSet local_from_states(const Group& group, std::span<const State> members) {
  if (members.empty()) throw Error(ErrorCode::kEmptySet, "empty set");
  std::unordered_map<Key, std::int32_t> pos;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (!pos.emplace(group.key(members[i]), static_cast<std::int32_t>(i)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate member");
    }
  }
  LocalSet set;
  set.gens = group.generator_count();
  set.nbr.reserve(members.size() * static_cast<std::size_t>(set.gens));
  for (const auto& m : members) {
    for (int s = 0; s < set.gens; ++s) {
      auto it = pos.find(group.key(group.act(m, s)));
      set.nbr.push_back(it == pos.end() ? -1 : it->second);
    }
  }
  return set;
}

Rational boundary_ratio(const LocalSet& set, const Kernel& kernel) {
  if (set.size() == 0) throw Error(ErrorCode::kEmptySet, "boundary ratio of empty set");
  const auto ik = integer_kernel(kernel);
  std::int64_t exits = 0;
  for (std::size_t i = 0; i < set.nbr.size(); ++i) {
    if (set.nbr[i] < 0) exits += ik.num[i % static_cast<std::size_t>(set.gens)];
  }
  return Rational(exits, ik.den) / Rational(static_cast<std::int64_t>(set.size()));
}

EigenEstimate dirichlet_gap(const LocalSet& set, const Kernel& kernel) {
  if (set.size() == 0) throw Error(ErrorCode::kEmptySet, "Dirichlet gap of empty set");
  const auto w = kernel.weights_d();
  const double hold = kernel.hold_d();
  EigenEstimate top;
  if (set.size() <= 400) {
    top = dense_top(dense_block(set, w, hold));
  } else {
    const auto gens = static_cast<std::size_t>(set.gens);
    MatVec apply = [&](const Eigen::VectorXd& in, Eigen::VectorXd& out) {
      out.resize(in.size());
      for (Eigen::Index i = 0; i < in.size(); ++i) {
        double acc = hold * in(i);
        const auto* row = set.nbr.data() + static_cast<std::size_t>(i) * gens;
        for (std::size_t s = 0; s < gens; ++s) {
          if (row[s] >= 0) acc += w[s] * in(row[s]);
        }
        out(i) = acc;
      }
    };
    LanczosOptions opt;
    opt.scale = [](double theta) { return std::max(1.0 - theta, 1e-300); };
    top = lanczos_top(apply, set.size(), opt);
  }
  // a Ritz value never exceeds the top eigenvalue, so 1 − θ is an upper bound
  // on the gap even when the iteration stops early
  return {1.0 - top.value, top.residual, top.converged, top.iterations};
}

std::string to_string(Kind kind) {
  switch (kind) {
    case Kind::kUpper: return "UPPER";
    case Kind::kLower: return "LOWER";
    case Kind::kExact: return "EXACT";
  }
  return "?";
}

Kind kind_from_string(const std::string& s) {
  if (s == "UPPER") return Kind::kUpper;
  if (s == "LOWER") return Kind::kLower;
  if (s == "EXACT") return Kind::kExact;
  throw Error(ErrorCode::kInvalidArgument, "unknown kind '" + s + "'");
}

std::vector<ProfilePoint> ProfileTable::bounds(Kind side) const {
  std::vector<ProfilePoint> out;
  for (const auto& p : points) {
    if (p.kind == side || p.kind == Kind::kExact) out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  return out;
}

void ProfileTable::close_envelope() {
  std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  // a set of size <= m is admissible for every n >= m
  double best = INFINITY;
  std::string witness;
  for (auto& p : points) {
    if (p.kind != Kind::kUpper) continue;
    if (p.value <= best) {
      best = p.value;
      witness = p.witness;
    } else {
      p.value = best;
      p.witness = witness;
    }
  }
  // Φ(m) >= Φ(n) for m <= n, so lower bounds carry to smaller n
  best = -INFINITY;
  for (auto it = points.rbegin(); it != points.rend(); ++it) {
    if (it->kind != Kind::kLower) continue;
    best = std::max(best, it->value);
    it->value = best;
  }
}

nlohmann::json ProfileTable::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"n", p.n}, {"value", p.value}, {"kind", to_string(p.kind)}, {"witness", p.witness}});
  }
  return {{"quantity", quantity}, {"points", pts}};
}

ProfileTable ProfileTable::from_json(const nlohmann::json& j) {
  ProfileTable t;
  t.quantity = j.value("quantity", "");
  for (const auto& p : j.at("points")) {
    t.points.push_back({p.at("n").get<double>(), p.at("value").get<double>(),
                        kind_from_string(p.at("kind").get<std::string>()), p.value("witness", "")});
  }
  return t;
}

// ------------------------------ exhaustion ---------------------------------

ExactProfile profile_exact_small(const CayleyBall& ball, const Kernel& kernel, int n_max) {
  if (n_max < 1) throw Error(ErrorCode::kInvalidArgument, "n_max must be >= 1");
  if (n_max > kExactSizeCap) throw Error(ErrorCode::kSizeCap, "exhaustive search capped at n <= 12");
  if (ball.radius() < n_max) throw Error(ErrorCode::kRadiusTooSmall, "exhaustion needs ball radius >= n_max");

  const auto ik = integer_kernel(kernel);
  const auto w = kernel.weights_d();
  const double hold = kernel.hold_d();
  const int gens = ball.generator_count();
  const auto nmax = static_cast<std::size_t>(n_max);

  std::vector<std::int64_t> best_exits(nmax + 1, INT64_MAX);
  std::vector<double> best_theta(nmax + 1, -INFINITY);
  ExactProfile out;
  out.phi_witness.resize(nmax + 1);
  out.lambda_witness.resize(nmax + 1);
  out.sets_per_size.assign(nmax + 1, 0);

  std::vector<std::int32_t> pos(ball.size(), -1);
  std::vector<std::uint8_t> seen(ball.size(), 0);
  std::vector<std::uint32_t> members;
  std::int64_t exits = 0;
  Eigen::MatrixXd block(n_max, n_max);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(n_max);

  auto record = [&]() {
    const std::size_t n = members.size();
    ++out.sets_per_size[n];
    if (exits < best_exits[n]) {
      best_exits[n] = exits;
      out.phi_witness[n] = members;
    }
    // the Perron value is at most the largest row sum; skip hopeless sets
    double max_row = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double row = hold;
      for (int s = 0; s < gens; ++s) {
        auto j = ball.neighbor(members[i], s);
        if (j != kBoundary && pos[j] >= 0) row += w[static_cast<std::size_t>(s)];
      }
      max_row = std::max(max_row, row);
    }
    if (max_row <= best_theta[n]) return;
    const auto dim = static_cast<Eigen::Index>(n);
    auto a = block.topLeftCorner(dim, dim);
    a.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += hold;
      for (int s = 0; s < gens; ++s) {
        auto j = ball.neighbor(members[i], s);
        if (j != kBoundary && pos[j] >= 0) a(static_cast<Eigen::Index>(i), pos[j]) += w[static_cast<std::size_t>(s)];
      }
    }
    solver.compute(a, Eigen::EigenvaluesOnly);
    const double theta = solver.eigenvalues()(dim - 1);
    if (theta > best_theta[n]) {
      best_theta[n] = theta;
      out.lambda_witness[n] = members;
    }
  };

  auto add = [&](std::uint32_t v) {
    pos[v] = static_cast<std::int32_t>(members.size());
    members.push_back(v);
    for (int s = 0; s < gens; ++s) {
      auto j = ball.neighbor(v, s);
      const auto a = ik.num[static_cast<std::size_t>(s)];
      // the edge v -> j and its reverse carry equal weight by symmetry
      if (j != kBoundary && pos[j] >= 0) {
        exits -= a;
      } else {
        exits += a;
      }
    }
  };
  auto remove = [&](std::uint32_t v) {
    members.pop_back();
    pos[v] = -1;
    for (int s = 0; s < gens; ++s) {
      auto j = ball.neighbor(v, s);
      const auto a = ik.num[static_cast<std::size_t>(s)];
      if (j != kBoundary && pos[j] >= 0) {
        exits += a;
      } else {
        exits -= a;
      }
    }
  };

  // Redelmeier: every connected set containing the root is produced once
  std::function<void(std::vector<std::uint32_t>)> extend = [&](std::vector<std::uint32_t> untried) {
    while (!untried.empty()) {
      const auto v = untried.back();
      untried.pop_back();
      add(v);
      record();
      if (members.size() < nmax) {
        std::vector<std::uint32_t> fresh;
        for (int s = 0; s < gens; ++s) {
          auto j = ball.neighbor(v, s);
          if (j == kBoundary || seen[j]) continue;
          seen[j] = 1;
          fresh.push_back(j);
        }
        auto next = untried;
        next.insert(next.end(), fresh.begin(), fresh.end());
        extend(std::move(next));
        for (auto j : fresh) seen[j] = 0;
      }
      remove(v);
    }
  };
  seen[0] = 1;
  extend({0});

  out.phi.quantity = "phi";
  out.lambda.quantity = "lambda";
  Rational best_phi(1000000);
  std::size_t best_phi_n = 0;
  double best_lambda = INFINITY;
  std::size_t best_lambda_n = 0;
  const Group* group = nullptr;
  std::unique_ptr<Group> owned;
  if (!ball.group_name().empty()) {
    owned = make_group(ball.group_name());
    group = owned.get();
  }
  for (std::size_t n = 1; n <= nmax; ++n) {
    if (out.sets_per_size[n] == 0) throw Error(ErrorCode::kRadiusTooSmall, "no connected set of size " + std::to_string(n));
    Rational phi_n = Rational(best_exits[n], ik.den) / Rational(static_cast<std::int64_t>(n));
    if (phi_n < best_phi) {
      best_phi = phi_n;
      best_phi_n = n;
    }
    const double lambda_n = 1.0 - best_theta[n];
    if (lambda_n < best_lambda) {
      best_lambda = lambda_n;
      best_lambda_n = n;
    }
    out.phi_exact.push_back(best_phi);
    out.phi.points.push_back({static_cast<double>(n), best_phi.to_double(), Kind::kExact,
                              words_label(ball, out.phi_witness[best_phi_n], group)});
    out.lambda.points.push_back({static_cast<double>(n), best_lambda, Kind::kExact,
                                 words_label(ball, out.lambda_witness[best_lambda_n], group)});
  }
  // report the optimal witness per n rather than per exact size
  std::vector<std::vector<std::uint32_t>> phi_w(nmax + 1), lambda_w(nmax + 1);
  best_phi = Rational(1000000);
  best_lambda = INFINITY;
  for (std::size_t n = 1; n <= nmax; ++n) {
    Rational phi_n = Rational(best_exits[n], ik.den) / Rational(static_cast<std::int64_t>(n));
    if (phi_n < best_phi) {
      best_phi = phi_n;
      phi_w[n] = out.phi_witness[n];
    } else {
      phi_w[n] = phi_w[n - 1];
    }
    if (1.0 - best_theta[n] < best_lambda) {
      best_lambda = 1.0 - best_theta[n];
      lambda_w[n] = out.lambda_witness[n];
    } else {
      lambda_w[n] = lambda_w[n - 1];
    }
  }
  out.phi_witness = std::move(phi_w);
  out.lambda_witness = std::move(lambda_w);
  return out;
}

WindowAudit lambda_window_audit(const CayleyBall& ball, const Kernel& kernel, const ExactProfile& exact, int window,
                                int n_max) {
  WindowAudit audit;
  audit.window = ball.count_within(window);
  if (audit.window > 24) throw Error(ErrorCode::kSizeCap, "audit window larger than 24 vertices");
  if (window + 1 > ball.radius()) throw Error(ErrorCode::kRadiusTooSmall, "audit window must sit inside the ball");
  const auto limit = std::min<std::size_t>(static_cast<std::size_t>(n_max), exact.lambda.points.size());
  std::vector<std::uint32_t> members;
  for (std::uint32_t mask = 1; mask < (1u << audit.window); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) > limit) continue;
    members.clear();
    for (std::uint32_t i = 0; i < audit.window; ++i) {
      if (mask & (1u << i)) members.push_back(i);
    }
    auto gap = dirichlet_gap(local_from_ball(ball, members), kernel);
    ++audit.subsets;
    if (gap.value < exact.lambda.points[members.size() - 1].value - 1e-12) ++audit.below_exact;
  }
  return audit;
}

// ------------------------------ witnesses ----------------------------------

std::vector<Witness> structured_witnesses(const Group& group, const CayleyBall* ball, double max_volume) {
  std::vector<Witness> out;
  const auto name = group.name();
  if (group.family() == GroupFamily::kZd) {
    const int d = group.generator_count() / 2;
    for (std::int64_t side = 1;; ++side) {
      bool any = false;
      for (int big = 0; big <= d; ++big) {
        // `big` sides of length side+1, the rest of length side
        std::vector<std::int64_t> sides(static_cast<std::size_t>(d), side);
        for (int i = 0; i < big; ++i) sides[static_cast<std::size_t>(i)] = side + 1;
        double vol = 1;
        for (auto s : sides) vol *= static_cast<double>(s);
        if (vol > max_volume || (big == d && d > 0)) continue;
        any = true;
        Witness wit;
        wit.label = "box";
        for (auto s : sides) wit.label += ":" + std::to_string(s);
        std::vector<std::int64_t> c(static_cast<std::size_t>(d), 0);
        while (true) {
          wit.members.push_back(zd_key(c));
          std::size_t i = 0;
          while (i < c.size() && ++c[i] == sides[i]) c[i++] = 0;
          if (i == c.size()) break;
        }
        out.push_back(std::move(wit));
      }
      if (!any) break;
    }
    return out;
  }
  if (group.family() == GroupFamily::kLamplighter) {
    // lamplighter over Z^d with lamp order s: all lamp patterns on a box of
    // side L with the cursor inside the box
    const int s = group.generator_count() == 3 ? 2 : 0;
    if (s == 2 && name == "lamplighter") {
      for (int len = 1; len <= 20; ++len) {
        const double vol = static_cast<double>(len) * std::ldexp(1.0, len);
        if (vol > max_volume) break;
        Witness wit;
        wit.label = "lamp-interval:" + std::to_string(len);
        for (std::uint32_t pattern = 0; pattern < (1u << len); ++pattern) {
          for (int cursor = 0; cursor < len; ++cursor) {
            LamplighterElement e;
            e.cursor = {cursor};
            for (int i = 0; i < len; ++i) {
              if (pattern & (1u << i)) e.lamps.push_back({{i}, 1});
            }
            wit.members.push_back(lamplighter_key(e));
          }
        }
        out.push_back(std::move(wit));
      }
      return out;
    }
  }
  if (ball == nullptr) return out;
  // word balls, rebuilt as states from geodesic words
  for (int r = 0; r <= ball->radius(); ++r) {
    const auto count = ball->count_within(r);
    if (static_cast<double>(count) > max_volume) break;
    Witness wit;
    wit.label = "word-ball:" + std::to_string(r);
    for (std::size_t i = 0; i < count; ++i) {
      State st = group.identity_state();
      for (int g : ball->word(i)) st = group.act(st, g);
      wit.members.push_back(std::move(st));
    }
    out.push_back(std::move(wit));
  }
  return out;
}

Strategy strategy_from_string(const std::string& s) {
  if (s == "structured") return Strategy::kStructured;
  if (s == "greedy") return Strategy::kGreedy;
  if (s == "anneal") return Strategy::kAnneal;
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy '" + s + "'");
}

namespace {

struct BallSearch {
  const CayleyBall& ball;
  IntegerKernel ik;

  std::int64_t exit_delta_add(const std::vector<std::uint8_t>& in, std::uint32_t v) const {
    std::int64_t d = 0;
    for (int s = 0; s < ball.generator_count(); ++s) {
      auto j = ball.neighbor(v, s);
      d += (j != kBoundary && in[j]) ? -ik.num[static_cast<std::size_t>(s)] : ik.num[static_cast<std::size_t>(s)];
    }
    return d;
  }
};

// Greedy growth from the identity; returns the vertex order.
std::vector<std::uint32_t> greedy_order(const BallSearch& bs, std::size_t max_n) {
  const auto& ball = bs.ball;
  std::vector<std::uint8_t> in(ball.size(), 0);
  std::vector<std::uint8_t> frontier(ball.size(), 0);
  std::vector<std::uint32_t> order{0};
  std::vector<std::uint32_t> candidates;
  in[0] = 1;
  auto push_frontier = [&](std::uint32_t v) {
    for (int s = 0; s < ball.generator_count(); ++s) {
      auto j = ball.neighbor(v, s);
      if (j == kBoundary || in[j] || frontier[j]) continue;
      frontier[j] = 1;
      candidates.push_back(j);
    }
  };
  push_frontier(0);
  while (order.size() < max_n && !candidates.empty()) {
    std::size_t best = 0;
    std::int64_t best_delta = INT64_MAX;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      auto d = bs.exit_delta_add(in, candidates[i]);
      if (d < best_delta || (d == best_delta && candidates[i] < candidates[best])) {
        best_delta = d;
        best = i;
      }
    }
    auto v = candidates[best];
    candidates.erase(candidates.begin() + static_cast<std::ptrdiff_t>(best));
    in[v] = 1;
    order.push_back(v);
    push_frontier(v);
  }
  return order;
}

std::vector<std::uint32_t> anneal_set(const BallSearch& bs, std::vector<std::uint32_t> start, std::size_t cap,
                                      const AnnealOptions& opt, std::uint64_t stream) {
  const auto& ball = bs.ball;
  const int gens = ball.generator_count();
  std::vector<std::uint8_t> in(ball.size(), 0);
  std::vector<std::uint32_t> members = start;
  std::int64_t exits = 0;
  for (auto v : members) {
    exits += bs.exit_delta_add(in, v);
    in[v] = 1;
  }
  auto energy = [&](std::int64_t e, std::size_t n) { return static_cast<double>(e) / (static_cast<double>(bs.ik.den) * static_cast<double>(n)); };
  double current = energy(exits, members.size());
  double best = current;
  std::vector<std::uint32_t> best_set = members;

  SplitMix64 rng(SplitMix64::mix(opt.seed ^ (stream * 0x9e3779b97f4a7c15ULL)));
  double temp = opt.t0;
  for (int it = 0; it < opt.iterations; ++it, temp *= opt.cooling) {
    const bool try_add = rng.uniform() < 0.5;
    if (try_add && members.size() < cap) {
      auto u = members[rng.next() % members.size()];
      auto v = ball.neighbor(u, static_cast<int>(rng.next() % static_cast<std::uint64_t>(gens)));
      if (v == kBoundary || in[v]) continue;
      auto d = bs.exit_delta_add(in, v);
      double cand = energy(exits + d, members.size() + 1);
      if (cand <= current || rng.uniform() < std::exp((current - cand) / std::max(temp, 1e-300))) {
        in[v] = 1;
        members.push_back(v);
        exits += d;
        current = cand;
      }
    } else if (!try_add && members.size() > 1) {
      auto idx = rng.next() % members.size();
      auto v = members[idx];
      in[v] = 0;
      auto d = -bs.exit_delta_add(in, v);
      double cand = energy(exits + d, members.size() - 1);
      if (cand <= current || rng.uniform() < std::exp((current - cand) / std::max(temp, 1e-300))) {
        members[idx] = members.back();
        members.pop_back();
        exits += d;
        current = cand;
      } else {
        in[v] = 1;
      }
    }
    if (current < best) {
      best = current;
      best_set = members;
    }
  }
  std::sort(best_set.begin(), best_set.end());
  return best_set;
}

}  // namespace

UpperProfile profile_upper(const Group& group, const CayleyBall& ball, const Kernel& kernel,
                           const std::vector<double>& grid, Strategy strategy, const AnnealOptions& anneal,
                           bool with_lambda) {
  UpperProfile out;
  out.phi.quantity = "phi";
  out.lambda.quantity = "lambda";
  if (grid.empty()) return out;
  const double max_n = *std::max_element(grid.begin(), grid.end());

  struct Candidate {
    std::string label;
    double size;
    double phi;
    double lambda;
  };
  std::vector<Candidate> candidates;
  auto evaluate = [&](const LocalSet& set, std::string label) {
    Candidate c{std::move(label), static_cast<double>(set.size()), boundary_ratio(set, kernel).to_double(), INFINITY};
    if (with_lambda) {
      auto gap = dirichlet_gap(set, kernel);
      c.lambda = gap.value;
      out.lambda_converged = out.lambda_converged && gap.converged;
    }
    candidates.push_back(std::move(c));
  };

  for (const auto& wit : structured_witnesses(group, &ball, max_n)) evaluate(local_from_states(group, wit.members), wit.label);

  if (strategy != Strategy::kStructured) {
    BallSearch bs{ball, integer_kernel(kernel)};
    const auto order = greedy_order(bs, static_cast<std::size_t>(max_n));
    for (double n : grid) {
      const auto size = std::min(order.size(), static_cast<std::size_t>(n));
      if (size == 0) continue;
      std::vector<std::uint32_t> prefix(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(size));
      if (strategy == Strategy::kGreedy) {
        evaluate(local_from_ball(ball, prefix), "greedy:" + std::to_string(size));
        continue;
      }
      std::vector<std::uint32_t> best;
      double best_phi = INFINITY;
      for (int r = 0; r < anneal.restarts; ++r) {
        auto set = anneal_set(bs, prefix, size, anneal, static_cast<std::uint64_t>(size) * 1000 + static_cast<std::uint64_t>(r));
        double phi = boundary_ratio(local_from_ball(ball, set), kernel).to_double();
        if (phi < best_phi) {
          best_phi = phi;
          best = std::move(set);
        }
      }
      evaluate(local_from_ball(ball, best), "anneal:" + std::to_string(best.size()));
    }
  }

  for (double n : grid) {
    const Candidate* bp = nullptr;
    const Candidate* bl = nullptr;
    for (const auto& c : candidates) {
      if (c.size > n) continue;
      if (!bp || c.phi < bp->phi) bp = &c;
      if (with_lambda && (!bl || c.lambda < bl->lambda)) bl = &c;
    }
    if (bp) out.phi.points.push_back({n, bp->phi, Kind::kUpper, bp->label});
    if (bl) out.lambda.points.push_back({n, bl->lambda, Kind::kUpper, bl->label});
  }
  return out;
}

// ------------------------------ growth bounds ------------------------------

std::optional<int> growth_inverse(std::span<const std::uint64_t> growth, double x) {
  for (std::size_t r = 0; r < growth.size(); ++r) {
    if (static_cast<double>(growth[r]) >= x) return static_cast<int>(r);
  }
  return std::nullopt;
}

double csc_lower_at(std::span<const std::uint64_t> growth, const Kernel& kernel, double n) {
  auto r = growth_inverse(growth, 2 * n);
  if (!r) throw Error(ErrorCode::kRange, "growth table does not reach 2n = " + std::to_string(2 * n));
  // Gr^{-1}(2n) >= 1 whenever n >= 1
  return kernel.min_positive_weight().to_double() / (2.0 * std::max(1, *r));
}

ProfileTable csc_lower(std::span<const std::uint64_t> growth, const Kernel& kernel, const std::vector<double>& grid) {
  ProfileTable t;
  t.quantity = "phi";
  for (double n : grid) {
    if (!growth_inverse(growth, 2 * n)) continue;
    t.points.push_back({n, csc_lower_at(growth, kernel, n), Kind::kLower, "csc"});
  }
  return t;
}

double growth_isoperimetry_upper_at(std::span<const std::uint64_t> growth, double n) {
  auto b = growth_inverse(growth, n);
  auto a = growth_inverse(growth, n / 2);
  if (!b || !a) throw Error(ErrorCode::kRange, "growth table does not reach n = " + std::to_string(n));
  const int steps = *b - *a - 1;
  if (steps <= 0) throw Error(ErrorCode::kDegenerate, "Gr^{-1}(n) - Gr^{-1}(n/2) <= 1 at n = " + std::to_string(n));
  return std::exp2(1.0 / steps) - 1.0;
}

ProfileTable growth_isoperimetry_upper(std::span<const std::uint64_t> growth, const std::vector<double>& grid) {
  ProfileTable t;
  t.quantity = "phi";
  for (double n : grid) {
    try {
      t.points.push_back({n, growth_isoperimetry_upper_at(growth, n), Kind::kUpper, "growth"});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerate && e.code() != ErrorCode::kRange) throw;
    }
  }
  return t;
}

// ------------------------------ Cheeger audit ------------------------------

nlohmann::json CheegerReport::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (const auto& x : violations) v.push_back({{"n", x.n}, {"inequality", x.inequality}, {"lhs", x.lhs}, {"rhs", x.rhs}});
  return {{"pairs_checked", pairs_checked}, {"violations", v}};
}

CheegerReport cheeger_consistency(const ProfileTable& phi, const ProfileTable& lambda, double tol) {
  CheegerReport rep;
  auto value_at = [](const std::vector<ProfilePoint>& pts, double n) -> std::optional<double> {
    for (const auto& p : pts) {
      if (p.n == n) return p.value;
    }
    return std::nullopt;
  };
  const auto phi_lo = phi.bounds(Kind::kLower);
  const auto phi_hi = phi.bounds(Kind::kUpper);
  const auto lam_lo = lambda.bounds(Kind::kLower);
  const auto lam_hi = lambda.bounds(Kind::kUpper);
  std::vector<double> ns;
  for (const auto& p : phi.points) ns.push_back(p.n);
  for (const auto& p : lambda.points) ns.push_back(p.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  for (double n : ns) {
    // ½Φ² <= Λ is refuted only by a lower bound on Φ above an upper bound on Λ
    if (auto pl = value_at(phi_lo, n), lu = value_at(lam_hi, n); pl && lu) {
      ++rep.pairs_checked;
      if (0.5 * *pl * *pl > *lu * (1 + tol) + tol) rep.violations.push_back({n, "half_phi_sq<=lambda", 0.5 * *pl * *pl, *lu});
    }
    if (auto ll = value_at(lam_lo, n), pu = value_at(phi_hi, n); ll && pu) {
      ++rep.pairs_checked;
      if (*ll > *pu * (1 + tol) + tol) rep.violations.push_back({n, "lambda<=phi", *ll, *pu});
    }
  }
  return rep;
}

}  // namespace walklab
