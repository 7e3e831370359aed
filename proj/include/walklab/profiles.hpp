#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "walklab/ball.hpp"
#include "walklab/kernel.hpp"
#include "walklab/linalg.hpp"

namespace walklab {

/// A finite vertex set with the neighbor of each member under each generator
/// expressed as a member position, or −1 when the neighbor lies outside.
struct LocalSet {
  int gens = 0;
  std::vector<std::int32_t> nbr;
  std::size_t size() const { return gens == 0 ? 0 : nbr.size() / static_cast<std::size_t>(gens); }
};

LocalSet local_from_ball(const CayleyBall& ball, std::span<const std::uint32_t> members);
LocalSet local_from_states(const Group& group, std::span<const State> members);

/// Exact value of the boundary functional (1/|Ω|) Σ_{x∈Ω, y∉Ω} P(x,y).
Rational boundary_ratio(const LocalSet& set, const Kernel& kernel);

/// λ_P(Ω): smallest eigenvalue of I − P on functions supported in Ω. Sets of
/// at most 400 vertices use a dense solver, larger ones restarted Lanczos.
EigenEstimate dirichlet_gap(const LocalSet& set, const Kernel& kernel);

enum class Kind { kUpper, kLower, kExact };
std::string to_string(Kind kind);
Kind kind_from_string(const std::string& s);

struct ProfilePoint {
  double n = 0;
  double value = 0;
  Kind kind = Kind::kExact;
  std::string witness;
};

/// Tabulated profile points of one quantity ("phi" or "lambda").
struct ProfileTable {
  std::string quantity;
  std::vector<ProfilePoint> points;

  /// Points of the given kinds sorted by n; EXACT counts as both bounds.
  std::vector<ProfilePoint> bounds(Kind side) const;
  /// Monotone closure: upper bounds propagate to larger n, lower bounds to
  /// smaller n, for a nonincreasing profile.
  void close_envelope();
  nlohmann::json to_json() const;
  static ProfileTable from_json(const nlohmann::json& j);
};

struct ExactProfile {
  ProfileTable phi;
  ProfileTable lambda;
  std::vector<Rational> phi_exact;                    // index n-1
  std::vector<std::vector<std::uint32_t>> phi_witness;  // ball indices, index n
  std::vector<std::vector<std::uint32_t>> lambda_witness;
  std::vector<std::uint64_t> sets_per_size;
  bool lambda_converged = true;
};

inline constexpr int kExactSizeCap = 12;

/// Exhaustive Φ and Λ over connected sets containing the identity with at most
/// n_max vertices. The ball radius must be at least n_max.
ExactProfile profile_exact_small(const CayleyBall& ball, const Kernel& kernel, int n_max);

struct WindowAudit {
  std::size_t window = 0;
  std::uint64_t subsets = 0;
  std::uint64_t below_exact = 0;  // subsets whose gap beats the connected optimum
};

/// Exhaustive Λ over all subsets (connected or not) of the radius-w window,
/// compared with the connected optimum of the same size.
WindowAudit lambda_window_audit(const CayleyBall& ball, const Kernel& kernel, const ExactProfile& exact, int window,
                                int n_max);

enum class Strategy { kStructured, kGreedy, kAnneal };
Strategy strategy_from_string(const std::string& s);

struct AnnealOptions {
  int iterations = 10000;
  int restarts = 8;
  double t0 = 0.05;
  double cooling = 0.995;
  std::uint64_t seed = 1;
};

struct UpperProfile {
  ProfileTable phi;
  ProfileTable lambda;
  bool lambda_converged = true;
};

/// UPPER points on the grid; every value is recomputed from the witness.
UpperProfile profile_upper(const Group& group, const CayleyBall& ball, const Kernel& kernel,
                           const std::vector<double>& grid, Strategy strategy, const AnnealOptions& anneal = {},
                           bool with_lambda = true);

/// Structured witness families: boxes in Z^d, lamp-interval sets in the
/// lamplighter over Z with s = 2, word balls otherwise.
struct Witness {
  std::string label;
  std::vector<State> members;
};
std::vector<Witness> structured_witnesses(const Group& group, const CayleyBall* ball, double max_volume);

/// Gr^{-1}(x) = min{r : Gr(r) >= x}; nullopt beyond the table.
std::optional<int> growth_inverse(std::span<const std::uint64_t> growth, double x);

/// Coulhon–Saloff-Coste: Φ(n) >= μ_min / (2 Gr^{-1}(2n)), which is
/// 1/(2 deg Gr^{-1}(2n)) for the simple walk. Points where 2n exceeds the
/// table are skipped (csc_lower_at throws RANGE).
double csc_lower_at(std::span<const std::uint64_t> growth, const Kernel& kernel, double n);
ProfileTable csc_lower(std::span<const std::uint64_t> growth, const Kernel& kernel, const std::vector<double>& grid);

/// Φ(n) <= 2^{1/(b-a-1)} − 1 with a = Gr^{-1}(n/2), b = Gr^{-1}(n).
double growth_isoperimetry_upper_at(std::span<const std::uint64_t> growth, double n);
ProfileTable growth_isoperimetry_upper(std::span<const std::uint64_t> growth, const std::vector<double>& grid);

struct CheegerViolation {
  double n;
  std::string inequality;
  double lhs;
  double rhs;
};

struct CheegerReport {
  std::size_t pairs_checked = 0;
  std::vector<CheegerViolation> violations;
  nlohmann::json to_json() const;
};

/// Checks ½Φ² <= Λ <= Φ on every n where a certified violation is possible.
CheegerReport cheeger_consistency(const ProfileTable& phi, const ProfileTable& lambda, double tol = 1e-12);

}  // namespace walklab
