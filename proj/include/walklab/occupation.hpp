#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "walklab/ball.hpp"
#include "walklab/kernel.hpp"

namespace walklab {

inline constexpr double kOccupationLeakBudget = 1e-6;
inline constexpr int kTailWindow = 16;

struct OccupationResult {
  int r = 0;
  int p = 1;
  int horizon = 0;
  double partial = 0;      // Σ_{k<=K} (k+1)^{p−1} P(d(X_0,X_k) <= r), interval midpoints
  double partial_err = 0;  // folded interval half-widths
  double tail = 0;
  std::string tail_status;  // MODEL-DEPENDENT or UNCONTROLLED
  double total = 0;
  nlohmann::json to_json() const;
};

/// One killed evolution to the horizon feeds every (r, p). For the simple walk
/// on Z^d the tail Σ_{k>K} is modelled by the local limit shape
/// Σ_{|x|_1<=r} (d/2πk)^{d/2} exp(−d|x|²/2k), scaled to match the last
/// kTailWindow measured terms; otherwise, or when the model sum diverges, the
/// tail is UNCONTROLLED. LEAKAGE when the leaked mass exceeds the budget.
std::vector<OccupationResult> occupation_moments(const Group& group, const CayleyBall& ball, const KernelCycle& kernel,
                                                 const std::vector<int>& rs, const std::vector<int>& ps, int horizon,
                                                 int workers = 1);

struct ExponentFit {
  int p = 1;
  double slope = 0;  // β̂ p
  double beta = 0;   // slope / p
  std::size_t points = 0;
  nlohmann::json to_json() const;
};

/// Slope of log S against log r over the results with the given p; needs at
/// least four radii with finite totals.
ExponentFit occupation_exponent_fit(const std::vector<OccupationResult>& results, int p);

struct CounterexampleReport {
  int steps = 0;
  std::uint64_t samples = 0;
  std::vector<double> mean_distance;    // per step
  std::vector<double> mean_max_n;       // E[max_{i<=n} N_i]
  std::vector<double> formula_return;   // E[2^{−2 max N_i − 1}]
  std::vector<double> simulated_return; // frequency of all lamps off
  std::vector<double> sigma;            // binomial standard error
  double max_z = 0;                     // max |simulated − formula| / sigma
  double max_distance_ratio = 0;        // max distance / (2 max N + 1)
  nlohmann::json to_json() const;
};

/// Lamplighter over Z with the cursor fixed at 0: step i draws N_i from ν and
/// randomizes every lamp on [−N_i, N_i]. Distances use the word length for
/// {t, T, s}; returns are counted from explicit lamp states.
CounterexampleReport counterexample_walk(const std::vector<double>& nu, int steps, std::uint64_t samples,
                                         std::uint64_t seed, int workers = 1);

}  // namespace walklab
