#include "walklab/proof_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "walklab/error.hpp"
#include "walklab/profiles.hpp"
#include "walklab/walk.hpp"

namespace walklab {

void FiniteChain::validate() const {
  if (q.rows() != q.cols() || q.rows() == 0) throw Error(ErrorCode::kInvalidArgument, "chain matrix must be square");
  if (q.rows() > kChainSizeCap) throw Error(ErrorCode::kSizeCap, "chain larger than 16 states");
  for (int i = 0; i < size(); ++i) {
    if (std::abs(q.row(i).sum() - 1.0) > 1e-12) throw Error(ErrorCode::kInvalidArgument, "row does not sum to 1");
    for (int j = 0; j < size(); ++j) {
      if (q(i, j) < 0) throw Error(ErrorCode::kInvalidArgument, "negative entry");
      if (std::abs(q(i, j) - q(j, i)) > 1e-14) throw Error(ErrorCode::kInvalidArgument, "matrix is not symmetric");
    }
  }
}

FiniteChain random_symmetric_chain(int size, SplitMix64& rng, double edge_probability) {
  if (size < 2 || size > kChainSizeCap) throw Error(ErrorCode::kSizeCap, "chain size must be in [2, 16]");
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(size, size);
  std::vector<int> order(static_cast<std::size_t>(size));
  for (int i = 0; i < size; ++i) order[static_cast<std::size_t>(i)] = i;
  for (int i = size - 1; i > 0; --i) {
    std::swap(order[static_cast<std::size_t>(i)], order[rng.next() % static_cast<std::uint64_t>(i + 1)]);
  }
  auto weight = [&] { return 0.1 + 0.9 * rng.uniform(); };
  for (int i = 0; i + 1 < size; ++i) {
    const int a = order[static_cast<std::size_t>(i)];
    const int b = order[static_cast<std::size_t>(i + 1)];
    w(a, b) = w(b, a) = weight();
  }
  for (int a = 0; a < size; ++a) {
    for (int b = a + 1; b < size; ++b) {
      if (w(a, b) == 0 && rng.uniform() < edge_probability) w(a, b) = w(b, a) = weight();
    }
  }
  const double top = w.rowwise().sum().maxCoeff();
  FiniteChain chain{w / top};
  for (int i = 0; i < size; ++i) chain.q(i, i) = 0;
  for (int i = 0; i < size; ++i) chain.q(i, i) = std::max(0.0, 1.0 - chain.q.row(i).sum());
  return chain;
}

FiniteChain lazy_cycle(int size) {
  if (size < 3 || size > kChainSizeCap) throw Error(ErrorCode::kSizeCap, "cycle size must be in [3, 16]");
  FiniteChain chain{Eigen::MatrixXd::Zero(size, size)};
  for (int i = 0; i < size; ++i) {
    chain.q(i, i) = 0.5;
    chain.q(i, (i + 1) % size) += 0.25;
    chain.q(i, (i + size - 1) % size) += 0.25;
  }
  return chain;
}

nlohmann::json Chi::to_json() const {
  if (infinite) return "INFINITE";
  return k;
}

namespace {

void check_chi_args(const FiniteChain& chain, int n, int ell) {
  chain.validate();
  if (n < 1 || n > chain.size()) throw Error(ErrorCode::kInvalidArgument, "need 1 <= n <= |V|");
  if (n > kChiSizeCap) throw Error(ErrorCode::kSizeCap, "chi is exhaustive only up to n = 6");
  if (ell < 1 || ell > 60) throw Error(ErrorCode::kInvalidArgument, "need 1 <= ell <= 60");
}

template <typename Fn>
void for_each_subset(int size, int max_card, Fn&& fn) {
  const std::uint32_t end = 1u << size;
  for (std::uint32_t mask = 1; mask < end; ++mask) {
    if (std::popcount(mask) <= max_card) fn(mask);
  }
}

}  // namespace

namespace {

// The squared norm decreases to `limit`. Above the threshold it never gets
// there; at the threshold (within kChiTol) it only does if it is already
// constant, since any decaying part keeps it strictly above.
bool limit_blocks(double limit, double at_one, double thr0) {
  if (limit > thr0 * (1 + kChiTol)) return true;
  return limit >= thr0 * (1 - kChiTol) && at_one - limit > kChiTol * thr0;
}

}  // namespace

Chi chi_exact(const FiniteChain& chain, int n, int ell, int k_cap) {
  check_chi_args(chain, n, ell);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(chain.q);
  const Eigen::VectorXd lam2 = es.eigenvalues().array().square();
  const Eigen::MatrixXd& vecs = es.eigenvectors();
  const int size = chain.size();
  Chi out;
  for_each_subset(size, n, [&](std::uint32_t mask) {
    if (out.infinite) return;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(size);
    for (int x = 0; x < size; ++x) {
      if (mask & (1u << x)) c += vecs.row(x).transpose();
    }
    const Eigen::VectorXd c2 = c.array().square();
    const double thr0 = std::ldexp(static_cast<double>(std::popcount(mask)), -ell);
    const double thr = thr0 * (1 + kChiTol);
    // ‖Q^k 1_W‖² = Σ λ_i^{2k} c_i², nonincreasing in k
    auto g = [&](int k) {
      double s = 0;
      for (int i = 0; i < size; ++i) s += std::pow(lam2(i), k) * c2(i);
      return s;
    };
    double limit = 0;
    for (int i = 0; i < size; ++i) {
      if (lam2(i) >= 1 - 1e-10) limit += c2(i);
    }
    if (limit_blocks(limit, g(1), thr0)) {
      out.infinite = true;
      return;
    }
    int hi = 1;
    while (g(hi) > thr) {
      if (hi >= k_cap) throw Error(ErrorCode::kNoConvergence, "chi exceeds k_cap");
      hi = std::min(2 * hi, k_cap);
    }
    int lo = hi / 2;  // g(lo) > thr, or lo == 0
    while (hi - lo > 1) {
      const int mid = lo + (hi - lo) / 2;
      (g(mid) > thr ? lo : hi) = mid;
    }
    out.k = std::max(out.k, hi);
  });
  if (out.infinite) out.k = 0;
  return out;
}

namespace {

using Dense = std::vector<double>;

Dense matmul(const Dense& a, const Dense& b, int n) {
  Dense c(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int l = 0; l < n; ++l) {
      const double ail = a[static_cast<std::size_t>(i * n + l)];
      if (ail == 0) continue;
      for (int j = 0; j < n; ++j) c[static_cast<std::size_t>(i * n + j)] += ail * b[static_cast<std::size_t>(l * n + j)];
    }
  }
  return c;
}

Dense matpow(const Dense& q, int n, std::uint64_t e) {
  Dense result(static_cast<std::size_t>(n * n), 0.0);
  for (int i = 0; i < n; ++i) result[static_cast<std::size_t>(i * n + i)] = 1.0;
  Dense base = q;
  while (e > 0) {
    if (e & 1) result = matmul(result, base, n);
    e >>= 1;
    if (e > 0) base = matmul(base, base, n);
  }
  return result;
}

}  // namespace

Chi chi_bisection_oracle(const FiniteChain& chain, int n, int ell, int k_cap) {
  check_chi_args(chain, n, ell);
  const int size = chain.size();
  Dense q(static_cast<std::size_t>(size * size));
  for (int i = 0; i < size; ++i) {
    for (int j = 0; j < size; ++j) q[static_cast<std::size_t>(i * size + j)] = chain.q(i, j);
  }
  // every W satisfies 1_Wᵀ Q^{2k} 1_W <= 2^{-ℓ}|W|
  auto holds = [&](int k) {
    const Dense m = matpow(q, size, 2 * static_cast<std::uint64_t>(k));
    bool ok = true;
    for_each_subset(size, n, [&](std::uint32_t mask) {
      if (!ok) return;
      double s = 0;
      for (int x = 0; x < size; ++x) {
        if (!(mask & (1u << x))) continue;
        for (int y = 0; y < size; ++y) {
          if (mask & (1u << y)) s += m[static_cast<std::size_t>(x * size + y)];
        }
      }
      if (s > std::ldexp(static_cast<double>(std::popcount(mask)), -ell) * (1 + kChiTol)) ok = false;
    });
    return ok;
  };
  const Dense at_cap = matpow(q, size, 2 * static_cast<std::uint64_t>(k_cap));
  const Dense at_one = matpow(q, size, 2);
  bool blocked = false;
  for_each_subset(size, n, [&](std::uint32_t mask) {
    auto quad = [&](const Dense& m) {
      double s = 0;
      for (int x = 0; x < size; ++x) {
        for (int y = 0; y < size; ++y) {
          if ((mask >> x & 1u) && (mask >> y & 1u)) s += m[static_cast<std::size_t>(x * size + y)];
        }
      }
      return s;
    };
    const double thr0 = std::ldexp(static_cast<double>(std::popcount(mask)), -ell);
    blocked = blocked || limit_blocks(quad(at_cap), quad(at_one), thr0);
  });
  if (blocked || !holds(k_cap)) return Chi{true, 0};
  int lo = 0, hi = k_cap;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (holds(mid) ? hi : lo) = mid;
  }
  return Chi{false, hi};
}

std::vector<double> spectral_profile_exact(const FiniteChain& chain, int m_max) {
  chain.validate();
  if (m_max < 1 || m_max > chain.size()) throw Error(ErrorCode::kInvalidArgument, "need 1 <= m <= |V|");
  const int size = chain.size();
  std::vector<double> best(static_cast<std::size_t>(m_max), INFINITY);
  std::vector<int> idx;
  for_each_subset(size, m_max, [&](std::uint32_t mask) {
    idx.clear();
    for (int x = 0; x < size; ++x) {
      if (mask & (1u << x)) idx.push_back(x);
    }
    const int m = static_cast<int>(idx.size());
    Eigen::MatrixXd sub(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) sub(a, b) = chain.q(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub, Eigen::EigenvaluesOnly);
    const double gap = std::max(0.0, 1.0 - es.eigenvalues()(m - 1));
    auto& slot = best[static_cast<std::size_t>(m - 1)];
    slot = std::min(slot, gap);
  });
  for (std::size_t m = 1; m < best.size(); ++m) best[m] = std::min(best[m], best[m - 1]);
  return best;
}

nlohmann::json ChainBoundReport::to_json() const {
  nlohmann::json j = {{"n", n}, {"ell", ell}, {"vacuous", vacuous}};
  if (vacuous) return j;
  j.update({{"chi", chi.to_json()}, {"lambda", lambda}, {"rhs", rhs}, {"slack", slack}, {"companion", companion},
            {"pass", pass}});
  return j;
}

ChainBoundReport chain_bound_verify(const FiniteChain& chain, int n, int ell) {
  check_chi_args(chain, n, ell);
  ChainBoundReport rep;
  rep.n = n;
  rep.ell = ell;
  const std::int64_t m = static_cast<std::int64_t>(n) << (ell + 1);
  if (m >= chain.size()) {
    rep.vacuous = true;
    return rep;
  }
  const auto profile = spectral_profile_exact(chain, static_cast<int>(m));
  rep.lambda = profile.back();
  if (!(rep.lambda > 0)) {
    rep.vacuous = true;
    return rep;
  }
  rep.rhs = ell * std::numbers::ln2 / rep.lambda;
  rep.chi = chi_exact(chain, n, ell);
  rep.pass = !rep.chi.infinite && rep.chi.k <= rep.rhs * (1 + 1e-12);
  rep.slack = rep.chi.infinite ? -INFINITY : rep.rhs - rep.chi.k;
  const Chi chi1 = ell == 1 ? rep.chi : chi_exact(chain, n, 1);
  rep.companion = chi1.infinite ? INFINITY : chi1.k * profile[static_cast<std::size_t>(n - 1)];
  return rep;
}

WallMetricContext::WallMetricContext(const Group& group, std::vector<Word> witness)
    : group_(group), witness_(std::move(witness)) {
  if (witness_.empty()) throw Error(ErrorCode::kEmptySet, "wall metric needs a nonempty witness set");
  for (const auto& w : witness_) keys_.insert(group_.canonical_key(w));
  if (keys_.size() != witness_.size()) throw Error(ErrorCode::kInvalidArgument, "witness words are not distinct");
  for (const auto& w : witness_) {
    const Word winv = group_.inverse_word(w);
    for (const auto& w2 : witness_) {
      Word z = winv;
      z.insert(z.end(), w2.begin(), w2.end());
      ++differences_[group_.canonical_key(z)];
    }
  }
}

int WallMetricContext::overlap_key(const Key& z) const {
  auto it = differences_.find(z);
  return it == differences_.end() ? 0 : it->second;
}

int WallMetricContext::overlap(const Word& z) const {
  const Key kz = group_.canonical_key(z);
  if (auto it = cache_.find(kz); it != cache_.end()) return it->second;
  int count = 0;
  Word buf;
  for (const auto& w : witness_) {
    buf = w;
    buf.insert(buf.end(), z.begin(), z.end());
    if (keys_.contains(group_.canonical_key(buf))) ++count;
  }
  cache_.emplace(kz, count);
  return count;
}

int WallMetricContext::distance(const Word& x, const Word& y) const {
  Word z = group_.inverse_word(x);
  z.insert(z.end(), y.begin(), y.end());
  return size() - overlap(z);
}

int WallMetricContext::edge_increment(int generator) const { return size() - overlap(Word{generator}); }

nlohmann::json PseudometricReport::to_json() const {
  return {{"triples", triples},
          {"symmetry_violations", symmetry_violations},
          {"self_violations", self_violations},
          {"triangle_violations", triangle_violations},
          {"range_violations", range_violations},
          {"lipschitz_violations", lipschitz_violations},
          {"max_increment", max_increment},
          {"pass", pass}};
}

PseudometricReport pseudometric_check(const WallMetricContext& ctx, const CayleyBall& ball, std::size_t triples,
                                      std::uint64_t seed) {
  if (!ball.has_index()) throw Error(ErrorCode::kInvalidArgument, "ball needs a key index");
  const Group& g = ctx.group();
  PseudometricReport rep;
  rep.triples = triples;
  for (int s = 0; s < g.generator_count(); ++s) rep.max_increment = std::max(rep.max_increment, ctx.edge_increment(s));
  SplitMix64 rng(seed);
  auto pick = [&] { return ball.word(static_cast<std::size_t>(rng.next() % ball.size())); };
  auto graph_distance_lower = [&](const Word& x, const Word& y) {
    Word z = g.inverse_word(x);
    z.insert(z.end(), y.begin(), y.end());
    auto idx = ball.find(g.canonical_key(z));
    return idx ? ball.radius_of(*idx) : ball.radius() + 1;
  };
  for (std::size_t t = 0; t < triples; ++t) {
    const Word x = pick(), y = pick(), z = pick();
    const int dxy = ctx.distance(x, y);
    const int dyx = ctx.distance(y, x);
    const int dyz = ctx.distance(y, z);
    const int dxz = ctx.distance(x, z);
    if (dxy != dyx) ++rep.symmetry_violations;
    if (ctx.distance(x, x) != 0) ++rep.self_violations;
    if (dxz > dxy + dyz) ++rep.triangle_violations;
    if (dxy < 0 || dxy > ctx.size()) ++rep.range_violations;
    if (rep.max_increment > 0 && dxy > rep.max_increment * static_cast<int>(graph_distance_lower(x, y))) ++rep.lipschitz_violations;
  }
  rep.pass = rep.symmetry_violations + rep.self_violations + rep.triangle_violations + rep.range_violations +
                 rep.lipschitz_violations ==
             0;
  return rep;
}

namespace {

std::vector<std::uint32_t> witness_indices(const WallMetricContext& ctx, const CayleyBall& ball) {
  if (!ball.has_index()) throw Error(ErrorCode::kInvalidArgument, "ball needs a key index");
  std::vector<std::uint32_t> out;
  for (const auto& w : ctx.witness()) {
    auto idx = ball.find(ctx.group().canonical_key(w));
    if (!idx) throw Error(ErrorCode::kRadiusTooSmall, "witness element outside the ball");
    out.push_back(static_cast<std::uint32_t>(*idx));
  }
  return out;
}

}  // namespace

nlohmann::json NormalizationReport::to_json() const {
  return {{"max_increment", max_increment}, {"phi_w", phi_w}, {"bound", bound}, {"pass", pass}};
}

NormalizationReport wall_normalization_check(const WallMetricContext& ctx, const CayleyBall& ball, int window) {
  const Group& g = ctx.group();
  const auto members = witness_indices(ctx, ball);
  NormalizationReport rep;
  const std::size_t end = ball.count_within(window);
  for (std::size_t u = 0; u < end; ++u) {
    const Word wu = ball.word(u);
    for (int s = 0; s < g.generator_count(); ++s) {
      Word v = wu;
      v.push_back(s);
      rep.max_increment = std::max(rep.max_increment, ctx.distance(wu, v));
    }
  }
  rep.phi_w = boundary_ratio(local_from_ball(ball, members), Kernel::simple(g)).to_double();
  rep.bound = g.generator_count() * rep.phi_w * ctx.size();
  rep.pass = rep.max_increment <= rep.bound * (1 + 1e-12);
  return rep;
}

nlohmann::json FirstMomentReport::to_json() const {
  return {{"k", k}, {"lhs", lhs}, {"rhs", rhs}, {"diff", diff}, {"leak", leak}};
}

FirstMomentReport first_moment_identity_check(const WallMetricContext& ctx, const CayleyBall& ball,
                                              const KernelCycle& kernel, int k, int workers) {
  const auto members = witness_indices(ctx, ball);
  FirstMomentReport rep;
  rep.k = k;
  Evolver from_o(ball, kernel, {.limit_radius = -1, .workers = workers});
  from_o.start_at_identity();
  from_o.advance(k);
  Evolver from_w(ball, kernel, {.limit_radius = -1, .workers = workers});
  from_w.start_uniform(members);
  from_w.advance(k);
  rep.leak = std::max(from_o.leaked(), from_w.leaked());
  if (rep.leak > kLeakageTol) throw Error(ErrorCode::kLeakage, "ball too small for k = " + std::to_string(k));
  const auto& p = from_o.p();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0) rep.lhs += p[i] * ctx.overlap_key(ball.key(i));
  }
  double pw = 0;
  for (auto m : members) pw += from_w.p()[m];
  rep.rhs = ctx.size() * pw;
  rep.diff = std::abs(rep.lhs - rep.rhs);
  return rep;
}

int chi_for_witness(const WallMetricContext& ctx, const CayleyBall& ball, const KernelCycle& kernel, int ell,
                    int k_cap, int workers) {
  const auto members = witness_indices(ctx, ball);
  Evolver ev(ball, kernel, {.limit_radius = -1, .workers = workers});
  ev.start_uniform(members);
  const double w = ctx.size();
  const double thr = std::ldexp(w, -ell) * (1 + kChiTol);
  for (int k = 1; k <= k_cap; ++k) {
    ev.step();
    if (ev.leaked() > kLeakageTol) throw Error(ErrorCode::kLeakage, "ball too small at k = " + std::to_string(k));
    double s = 0;
    for (double v : ev.p()) s += v * v;
    if (w * w * s <= thr) return k;
  }
  throw Error(ErrorCode::kNoConvergence, "witness chi exceeds k_cap");
}

nlohmann::json MarkovStepReport::to_json() const {
  return {{"ell", ell},           {"k", k},           {"norm_sq", norm_sq}, {"p_w", p_w},
          {"measured", measured}, {"threshold", threshold}, {"pass", pass}};
}

MarkovStepReport markov_step_check(const WallMetricContext& ctx, const CayleyBall& ball, const KernelCycle& kernel,
                                   int ell, int k, int workers) {
  const auto members = witness_indices(ctx, ball);
  MarkovStepReport rep;
  rep.ell = ell;
  rep.k = k;
  rep.threshold = std::exp2(1.0 - 0.5 * ell);
  Evolver from_o(ball, kernel, {.limit_radius = -1, .workers = workers});
  from_o.start_at_identity();
  from_o.advance(k);
  if (from_o.leaked() > kLeakageTol) throw Error(ErrorCode::kLeakage, "ball too small for k = " + std::to_string(k));
  const auto& p = from_o.p();
  const double half = 0.5 * ctx.size();
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0 && ctx.size() - ctx.overlap_key(ball.key(i)) <= half) rep.measured += p[i];
  }
  rep.measured += from_o.leaked();
  Evolver from_w(ball, kernel, {.limit_radius = -1, .workers = workers});
  from_w.start_uniform(members);
  from_w.advance(k);
  if (from_w.leaked() > kLeakageTol) throw Error(ErrorCode::kLeakage, "ball too small for k = " + std::to_string(k));
  double s = 0;
  for (double v : from_w.p()) s += v * v;
  rep.norm_sq = ctx.size() * s;
  for (auto m : members) rep.p_w += from_w.p()[m];
  rep.pass = rep.measured <= rep.threshold;
  return rep;
}

}  // namespace walklab
