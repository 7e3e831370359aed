#include "walklab/walk.hpp"

#include <cmath>
#include <numbers>

#include "walklab/error.hpp"
#include "walklab/parallel.hpp"
#include "walklab/rng.hpp"

namespace walklab {

namespace {

double neumaier_sum(const std::vector<double>& v, std::size_t n) {
  double sum = 0;
  double comp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double t = sum + v[i];
    if (std::abs(sum) >= std::abs(v[i])) {
      comp += (sum - t) + v[i];
    } else {
      comp += (v[i] - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace

Evolver::Evolver(const CayleyBall& ball, KernelCycle kernel, EvolveOptions options)
    : ball_(ball), kernel_(std::move(kernel)), workers_(options.workers) {
  limit_ = options.limit_radius < 0 ? ball.radius() : options.limit_radius;
  if (limit_ > ball.radius()) {
    throw Error(ErrorCode::kRadiusTooSmall, "limit radius " + std::to_string(limit_) + " exceeds ball radius " +
                                                std::to_string(ball.radius()));
  }
  for (const auto& k : kernel_.steps) {
    if (k.weights.size() != static_cast<std::size_t>(ball.generator_count())) {
      throw Error(ErrorCode::kInvalidArgument, "kernel does not match ball generators");
    }
    weights_.push_back(k.weights_d());
  }
  inside_ = ball.count_within(limit_);
  p_.assign(inside_, 0.0);
  next_.assign(inside_, 0.0);
  start_at_identity();
}

void Evolver::start_at_identity() {
  std::fill(p_.begin(), p_.end(), 0.0);
  std::fill(next_.begin(), next_.end(), 0.0);
  p_[0] = 1.0;
  active_ = 1;
  reach_ = 0;
  time_ = 0;
  leaked_ = 0;
}

void Evolver::start_uniform(std::span<const std::uint32_t> members) {
  if (members.empty()) throw Error(ErrorCode::kEmptySet, "uniform start on empty set");
  std::fill(p_.begin(), p_.end(), 0.0);
  std::fill(next_.begin(), next_.end(), 0.0);
  reach_ = 0;
  for (auto m : members) {
    if (m >= inside_) throw Error(ErrorCode::kRadiusTooSmall, "start vertex outside the limit radius");
    p_[m] += 1.0 / static_cast<double>(members.size());
    reach_ = std::max(reach_, static_cast<int>(ball_.radius_of(m)));
  }
  active_ = ball_.count_within(reach_);
  time_ = 0;
  leaked_ = 0;
}

void Evolver::apply(const Kernel& kernel, const std::vector<double>& weights) {
  const bool moving = kernel.moves();
  const double hold = kernel.hold_d();
  std::vector<std::pair<int, double>> live;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (weights[s] > 0) live.emplace_back(static_cast<int>(s), weights[s]);
  }

  if (moving && reach_ >= limit_) {
    // only the outermost level has neighbors beyond the limit
    for (std::size_t x = ball_.count_within(limit_ - 1); x < inside_; ++x) {
      if (p_[x] == 0) continue;
      double out = 0;
      for (auto [s, w] : live) {
        if (ball_.neighbor(x, s) >= inside_) out += w;
      }
      leaked_ += p_[x] * out;
    }
  }
  const int new_reach = moving ? std::min(reach_ + 1, limit_) : reach_;
  const std::size_t new_active = ball_.count_within(new_reach);
  const std::size_t inside = inside_;
  const auto& p = p_;
  auto& next = next_;
  const CayleyBall& ball = ball_;
  // pull form: the kernel is symmetric, so y receives w_s * p(y s)
  parallel_chunks(new_active, workers_, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t y = begin; y < end; ++y) {
      const std::uint32_t* row = ball.row(y);
      double acc = hold * p[y];
      for (auto [s, w] : live) {
        const std::uint32_t j = row[s];
        if (j < inside) acc += w * p[j];
      }
      next[y] = acc;
    }
  });
  p_.swap(next_);
  active_ = new_active;
  reach_ = new_reach;
}

void Evolver::step() {
  for (std::size_t i = 0; i < kernel_.steps.size(); ++i) apply(kernel_.steps[i], weights_[i]);
  ++time_;
}

double Evolver::mass() const { return neumaier_sum(p_, active_); }

Interval Evolver::within(int r) const {
  if (r > limit_) {
    throw Error(ErrorCode::kRadiusTooSmall, "radius " + std::to_string(r) + " exceeds limit " + std::to_string(limit_));
  }
  double lo = neumaier_sum(p_, std::min(active_, ball_.count_within(r)));
  return {lo, std::min(1.0, lo + leaked_)};
}

Interval small_ball_probability(const CayleyBall& ball, const KernelCycle& kernel, int k, int r, int workers) {
  if (k < 0) throw Error(ErrorCode::kInvalidArgument, "k must be >= 0");
  if (r > ball.radius()) {
    throw Error(ErrorCode::kRadiusTooSmall, "r=" + std::to_string(r) + " > R=" + std::to_string(ball.radius()));
  }
  if (r >= k * kernel.substeps_moving()) return {1.0, 1.0};
  Evolver ev(ball, kernel, {.limit_radius = -1, .workers = workers});
  ev.advance(k);
  return ev.within(r);
}

Interval return_probability(const CayleyBall& ball, const KernelCycle& kernel, int k, int workers) {
  if (k == 0) return {1.0, 1.0};
  Evolver ev(ball, kernel, {.limit_radius = -1, .workers = workers});
  ev.advance(k);
  return ev.within(0);
}

double exit_time_tail(const CayleyBall& ball, const KernelCycle& kernel, int r, int k, int workers) {
  if (r > ball.radius()) throw Error(ErrorCode::kRadiusTooSmall, "exit radius exceeds ball radius");
  if (k == 0) return 1.0;
  Evolver ev(ball, kernel, {.limit_radius = r, .workers = workers});
  ev.advance(k);
  return ev.mass();
}

MonteCarloResult monte_carlo_small_ball(const Group& group, const KernelCycle& kernel, int k,
                                        const std::function<bool(const Key&)>& inside, std::uint64_t samples,
                                        std::uint64_t seed, int workers) {
  if (samples < 1) throw Error(ErrorCode::kInvalidArgument, "samples must be >= 1");
  struct Step {
    std::vector<double> cumulative;  // first entry is the hold mass
  };
  std::vector<Step> table;
  for (const auto& kern : kernel.steps) {
    Step st;
    double acc = kern.hold_d();
    st.cumulative.push_back(acc);
    for (double w : kern.weights_d()) st.cumulative.push_back(acc += w);
    table.push_back(std::move(st));
  }
  const std::size_t max_steps = static_cast<std::size_t>(k) * kernel.steps.size();
  std::vector<std::uint64_t> block_hits(kMonteCarloBlocks, 0);

  parallel_chunks(kMonteCarloBlocks, workers, [&](std::size_t begin, std::size_t end, int) {
    auto walker = group.make_walker(max_steps);
    for (std::size_t b = begin; b < end; ++b) {
      SplitMix64 rng(SplitMix64::mix(seed ^ static_cast<std::uint64_t>(b)));
      const std::uint64_t first = samples * b / kMonteCarloBlocks;
      const std::uint64_t last = samples * (b + 1) / kMonteCarloBlocks;
      std::uint64_t hits = 0;
      for (std::uint64_t i = first; i < last; ++i) {
        walker->reset();
        for (int t = 0; t < k; ++t) {
          for (const auto& st : table) {
            const double u = rng.uniform();
            if (u < st.cumulative[0]) continue;
            std::size_t g = 1;
            while (g + 1 < st.cumulative.size() && u >= st.cumulative[g]) ++g;
            walker->step(static_cast<int>(g - 1));
          }
        }
        if (inside(walker->key())) ++hits;
      }
      block_hits[b] = hits;
    }
  });

  MonteCarloResult res;
  res.samples = samples;
  for (auto h : block_hits) res.hits += h;
  res.estimate = static_cast<double>(res.hits) / static_cast<double>(samples);
  std::tie(res.ci_lo, res.ci_hi) = wilson_interval(res.hits, samples);
  return res;
}

MonteCarloResult monte_carlo_small_ball(const Group& group, const CayleyBall& ball, const KernelCycle& kernel,
                                        int k, int r, std::uint64_t samples, std::uint64_t seed, int workers) {
  if (r > ball.radius()) throw Error(ErrorCode::kRadiusTooSmall, "MC target radius exceeds ball radius");
  if (r >= k * kernel.substeps_moving()) return {samples, samples, 1.0, 1.0, 1.0};
  const auto limit = static_cast<std::uint32_t>(r);
  auto inside = [&](const Key& key) {
    auto idx = ball.find(key);
    return idx && ball.radius_of(*idx) <= limit;
  };
  return monte_carlo_small_ball(group, kernel, k, inside, samples, seed, workers);
}

double lamplighter_range_dp(int n) {
  if (n < 0) throw Error(ErrorCode::kInvalidArgument, "n must be >= 0");
  if (n > kRangeDpMax) throw Error(ErrorCode::kSizeCap, "range DP limited to n <= " + std::to_string(kRangeDpMax));
  if (n == 0) return 1.0;
  if (n % 2 == 1) return 0.0;
  // P(n) = E[2^{-(M-m+1)}; S_n = 0] for the base walk S. Summing by parts
  // over the range endpoints turns this into a weighted sum of the
  // probabilities T(a,b) of staying in [-a, b] and ending at 0; each T has a
  // closed sine expansion.
  const int h = n / 2;
  std::vector<double> u(static_cast<std::size_t>(h) + 1);
  for (int a = 0; a <= h; ++a) u[static_cast<std::size_t>(a)] = a < h ? std::ldexp(1.0, -a) : std::ldexp(1.0, 1 - h);

  double total = 0;
  std::vector<double> cpow;
  std::vector<double> sin2;
  for (int w = 0; w <= 2 * h; ++w) {
    const int len = w + 2;
    cpow.assign(static_cast<std::size_t>(w) + 2, 0.0);
    for (int j = 1; j <= w + 1; ++j) {
      cpow[static_cast<std::size_t>(j)] = std::pow(std::cos(std::numbers::pi * j / len), n);
    }
    sin2.assign(static_cast<std::size_t>(len), 0.0);
    for (int m = 0; m < len; ++m) {
      double s = std::sin(std::numbers::pi * m / len);
      sin2[static_cast<std::size_t>(m)] = s * s;
    }
    for (int a = std::max(0, w - h); a <= std::min(h, w); ++a) {
      const int b = w - a;
      double t = 0;
      int idx = 0;
      for (int j = 1; j <= w + 1; ++j) {
        idx += a + 1;
        if (idx >= len) idx %= len;
        t += sin2[static_cast<std::size_t>(idx)] * cpow[static_cast<std::size_t>(j)];
      }
      t *= 2.0 / len;
      total += t * u[static_cast<std::size_t>(a)] * u[static_cast<std::size_t>(b)];
    }
  }
  return total / 8.0;
}

}  // namespace walklab
