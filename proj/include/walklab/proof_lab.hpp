#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"
#include "walklab/ball.hpp"
#include "walklab/kernel.hpp"
#include "walklab/rng.hpp"

namespace walklab {

inline constexpr int kChainSizeCap = 16;
inline constexpr int kChiSizeCap = 6;
inline constexpr int kChiCap = 10000;
// relative slack when comparing a squared norm against 2^{-ℓ}|W|
inline constexpr double kChiTol = 1e-12;

/// Symmetric stochastic matrix on at most 16 states.
struct FiniteChain {
  Eigen::MatrixXd q;

  int size() const { return static_cast<int>(q.rows()); }
  /// INVALID_ARGUMENT unless rows sum to 1, Q = Qᵀ and entries are >= 0.
  void validate() const;
};

/// Random connected weighted graph: symmetric weights on a spanning path plus
/// random extra edges, divided by the largest weighted degree, with the
/// remaining mass on the diagonal.
FiniteChain random_symmetric_chain(int size, SplitMix64& rng, double edge_probability = 0.35);
/// Lazy simple walk on the cycle: hold ½, each neighbor ¼.
FiniteChain lazy_cycle(int size);

struct Chi {
  bool infinite = false;
  int k = 0;
  nlohmann::json to_json() const;
};

/// χ(n, ℓ): least k with ‖Q^k 1_W‖² <= 2^{-ℓ}|W| for every nonempty |W| <= n.
/// Uses the spectral decomposition of Q; INFINITE when the k → ∞ limit of
/// some squared norm exceeds the threshold. NO_CONVERGENCE past k_cap.
Chi chi_exact(const FiniteChain& chain, int n, int ell, int k_cap = kChiCap);
/// Independent oracle: bisection on k with Q^k from repeated squaring in plain
/// loops; INFINITE when the condition still fails at k_cap.
Chi chi_bisection_oracle(const FiniteChain& chain, int n, int ell, int k_cap = kChiCap);

/// Λ_Q(m) for m = 1..m_max: least Dirichlet eigenvalue of I − Q over all
/// nonempty Ω with |Ω| <= m (index m−1).
std::vector<double> spectral_profile_exact(const FiniteChain& chain, int m_max);

struct ChainBoundReport {
  int n = 0;
  int ell = 0;
  bool vacuous = false;
  Chi chi;
  double lambda = 0;  // Λ_Q(n 2^{ℓ+1})
  double rhs = 0;     // ℓ log 2 / Λ
  double slack = 0;   // rhs − χ
  double companion = 0;  // χ(n,1) Λ_Q(n), the lower-bound shape
  bool pass = false;
  nlohmann::json to_json() const;
};

/// χ(n, ℓ) <= ℓ log 2 / Λ_Q(n 2^{ℓ+1}); VACUOUS unless n 2^{ℓ+1} < |V|.
ChainBoundReport chain_bound_verify(const FiniteChain& chain, int n, int ell);

/// Measured-wall metric d(x, y) = |W| − #{w ∈ W : w x^{-1} y ∈ W} on a Cayley
/// graph with counting Haar measure. Elements are given as words.
class WallMetricContext {
 public:
  WallMetricContext(const Group& group, std::vector<Word> witness);

  const Group& group() const { return group_; }
  const std::vector<Word>& witness() const { return witness_; }
  int size() const { return static_cast<int>(witness_.size()); }

  /// #{w ∈ W : wz ∈ W}, iterating over W.
  int overlap(const Word& z) const;
  /// The same count from the table of differences w^{-1}w' (each w admits at
  /// most one w'), so a lookup by key is O(1).
  int overlap_key(const Key& z) const;
  int distance(const Word& x, const Word& y) const;
  /// |W| minus the overlap of a generator; the increment across any edge
  /// labelled s.
  int edge_increment(int generator) const;

 private:
  const Group& group_;
  std::vector<Word> witness_;
  std::unordered_set<Key> keys_;
  std::unordered_map<Key, int> differences_;
  mutable std::unordered_map<Key, int> cache_;
};

struct PseudometricReport {
  std::size_t triples = 0;
  std::size_t symmetry_violations = 0;
  std::size_t self_violations = 0;
  std::size_t triangle_violations = 0;
  std::size_t range_violations = 0;
  std::size_t lipschitz_violations = 0;
  int max_increment = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Symmetry, d(x,x)=0, triangle inequality and d <= |W| on random triples of
/// ball vertices, plus d/max_increment <= graph distance on the same pairs.
PseudometricReport pseudometric_check(const WallMetricContext& ctx, const CayleyBall& ball, std::size_t triples,
                                      std::uint64_t seed);

struct NormalizationReport {
  int max_increment = 0;
  double phi_w = 0;  // boundary ratio of W for the simple walk
  double bound = 0;  // deg(o) Φ_W |W|
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Max of d(u, us) over u in the ball of radius `window` and all generators,
/// against deg(o) Φ_W |W| (each oriented edge orbit meets o once).
NormalizationReport wall_normalization_check(const WallMetricContext& ctx, const CayleyBall& ball, int window);

inline constexpr double kLeakageTol = 1e-9;

struct FirstMomentReport {
  int k = 0;
  double lhs = 0;  // E[|W| − d(X_0, X_k)]
  double rhs = 0;  // |W| P_W(X_k ∈ W)
  double diff = 0;
  double leak = 0;
  nlohmann::json to_json() const;
};

/// Both sides of the first-moment identity from two separate evolutions.
/// Every element of W must lie in the ball; LEAKAGE if either side leaks.
FirstMomentReport first_moment_identity_check(const WallMetricContext& ctx, const CayleyBall& ball,
                                              const KernelCycle& kernel, int k, int workers = 1);

/// Least k with ‖Q^k 1_W‖² <= 2^{-ℓ}|W| for the group walk, found by evolving
/// the uniform start on W. NO_CONVERGENCE past k_cap, LEAKAGE if the ball is
/// too small.
int chi_for_witness(const WallMetricContext& ctx, const CayleyBall& ball, const KernelCycle& kernel, int ell,
                    int k_cap, int workers = 1);

struct MarkovStepReport {
  int ell = 0;
  int k = 0;
  double norm_sq = 0;    // ‖Q^k 1_W‖² / |W|
  double p_w = 0;        // P_W(X_k ∈ W)
  double measured = 0;   // P(d(X_0, X_k) <= |W|/2), upper end
  double threshold = 0;  // 2^{1−ℓ/2}
  bool pass = false;
  nlohmann::json to_json() const;
};

MarkovStepReport markov_step_check(const WallMetricContext& ctx, const CayleyBall& ball, const KernelCycle& kernel,
                                   int ell, int k, int workers = 1);

}  // namespace walklab
