#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "walklab/ball.hpp"
#include "walklab/kernel.hpp"

namespace walklab {

struct Interval {
  double lo = 0;
  double hi = 0;
};

struct EvolveOptions {
  // Walk is killed on leaving the ball of this radius; −1 means the whole ball.
  int limit_radius = -1;
  int workers = 1;
};

/// Killed evolution of a distribution on a ball. Mass that would step outside
/// the limit radius is moved to `leaked`, so for any event A inside the ball
/// the true probability lies in [p(A), p(A) + leaked].
class Evolver {
 public:
  Evolver(const CayleyBall& ball, KernelCycle kernel, EvolveOptions options = {});

  void start_at_identity();
  /// Uniform start on the given vertices (each must lie inside the limit).
  void start_uniform(std::span<const std::uint32_t> members);

  /// Advances one full kernel cycle.
  void step();
  void advance(int steps) {
    for (int i = 0; i < steps; ++i) step();
  }

  int time() const { return time_; }
  const std::vector<double>& p() const { return p_; }
  double leaked() const { return leaked_; }
  /// Compensated sum of p.
  double mass() const;
  /// Killed mass at distance <= r, with the leaked mass as the upper slack.
  Interval within(int r) const;
  int limit_radius() const { return limit_; }
  std::size_t active() const { return active_; }

 private:
  void apply(const Kernel& kernel, const std::vector<double>& weights);

  const CayleyBall& ball_;
  KernelCycle kernel_;
  std::vector<std::vector<double>> weights_;
  int workers_;
  int limit_;
  std::size_t inside_;
  std::size_t active_ = 0;
  int reach_ = 0;
  int time_ = 0;
  std::vector<double> p_;
  std::vector<double> next_;
  double leaked_ = 0;
};

/// P(d(X_0, X_k) <= r) as a rigorous interval; r >= distance reachable in k
/// steps gives [1, 1].
Interval small_ball_probability(const CayleyBall& ball, const KernelCycle& kernel, int k, int r, int workers = 1);
Interval return_probability(const CayleyBall& ball, const KernelCycle& kernel, int k, int workers = 1);
/// Probability that the walk stays within distance r through step k (exact).
double exit_time_tail(const CayleyBall& ball, const KernelCycle& kernel, int r, int k, int workers = 1);

struct MonteCarloResult {
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  double estimate = 0;
  double ci_lo = 0;
  double ci_hi = 0;
};

inline constexpr int kMonteCarloBlocks = 64;

/// Samples endpoints of k-step walks; `inside` decides whether an endpoint
/// key lies within the target ball. Samples are split into a fixed number of
/// blocks, each with its own stream, so results do not depend on `workers`.
MonteCarloResult monte_carlo_small_ball(const Group& group, const KernelCycle& kernel, int k,
                                        const std::function<bool(const Key&)>& inside, std::uint64_t samples,
                                        std::uint64_t seed, int workers = 1);
/// Convenience form using a ball of radius >= r with a key index.
MonteCarloResult monte_carlo_small_ball(const Group& group, const CayleyBall& ball, const KernelCycle& kernel,
                                        int k, int r, std::uint64_t samples, std::uint64_t seed, int workers = 1);

inline constexpr int kRangeDpMax = 2048;

/// Return probability at time n of the switch–walk–switch walk on the
/// lamplighter over Z, from the law of the range of the base walk.
double lamplighter_range_dp(int n);

}  // namespace walklab
