#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "walklab/ball.hpp"
#include "walklab/kernel.hpp"
#include "walklab/monotone.hpp"
#include "walklab/profiles.hpp"
#include "walklab/rational.hpp"

namespace walklab {

/// 1/(2|S|): every left-translation orbit of oriented edges meets the edges
/// leaving the identity in exactly one edge.
Rational edge_orbit_constant(const Group& group);
/// The same constant from explicit enumeration of the oriented edges of the
/// ball: for each edge (x, xs) count generators t with t = x^{-1}(xs).
Rational edge_orbit_audit(const Group& group, const CayleyBall& ball);

inline constexpr int kEllCap = 128;

struct BoundReport {
  int k = 0;
  int r = 0;
  double c = 0;
  std::string phi_id;
  std::string lambda_id;
  int ell_star = 0;
  double rhs = 2;
  std::string regime = "general";
  bool extrapolated = false;
  bool capped = false;
  nlohmann::json to_json() const;
};

/// rhs = 2 exp[−(log 2 / 2) ℓ*] with
/// ℓ* = max{ℓ >= 0 : ℓ log 2 / Λ(2^{ℓ+1} Φ^{-1}(c/r)) <= k}.
BoundReport small_ball_bound(int k, int r, const MonotoneFunction& lambda, const MonotoneFunction& phi, double c);

/// ψ(t) solving t = ∫_1^ψ dx / (x Λ(x)), computed as exp(U) with
/// ∫_0^U du / Λ(e^u) = t by adaptive Gauss–Kronrod and TOMS 748.
double grigoryan_psi(const MonotoneFunction& lambda, double t);

/// Ψ(x) = x / Λ(2^x) and its generalized inverse inf{x >= 0 : Ψ(x) >= n}.
double psi_doubling(const MonotoneFunction& lambda, double x);
double psi_doubling_inverse(const MonotoneFunction& lambda, double n);

struct DoublingCaseReport {
  double value = 1;
  double diffusive = 0;  // k / r^β
  double heat = 0;       // Ψ^{-1}(c k)
  std::string regime;
  double crossover_k = 0;
  nlohmann::json to_json() const;
};

/// exp[−c min{k/r^β, Ψ^{-1}(ck)}]; NOT_DOUBLING unless Λ(2^n) passes the
/// doubling diagnostic on [n_lo, n_hi].
DoublingCaseReport doubling_case_bound(double k, double r, double beta, double c, const MonotoneFunction& lambda,
                                    int n_lo = 1, int n_hi = 200, double threshold = 0.05);

struct SaturationFit {
  double alpha = 0;
  double stderr_alpha = 0;
  double band_lo = 0;
  double band_hi = 0;
  std::size_t points = 0;
  bool one_sided = false;
  nlohmann::json to_json() const;
};

/// Slope of log Λ against log Φ on the common n of the two tables. EXACT
/// points are preferred; mixing UPPER Λ with LOWER Φ makes the fit one-sided.
SaturationFit saturation_exponent_fit(const ProfileTable& phi, const ProfileTable& lambda);

struct RearrangementReport {
  struct Row {
    double c2;
    double c3_needed;
    double slope;
  };
  std::vector<Row> rows;
  double best_c2 = 0;
  double best_c3 = 0;
  bool holds = false;
  nlohmann::json to_json() const;
};

/// Smallest C3 with Λ(C2 Φ^{-1}(ε)) <= C3 ε² over ε in the Φ table, for
/// C2 in {1, 2, 4, 8}. Holds when the log-log slope in ε is at least 1.5.
RearrangementReport rearrangement_check(const ProfileTable& phi, const ProfileTable& lambda);

struct DominationPoint {
  int k;
  int r;
  double lo;
  double hi;
  double rhs;
  int ell_star;
  bool violation;
};

struct DominationReport {
  std::vector<DominationPoint> points;
  std::size_t violations = 0;
  bool extrapolated = false;
  nlohmann::json to_json() const;
};

/// Measured small-ball intervals from killed evolution against the bound
/// evaluated with a LOWER model of Λ and an UPPER model of Φ (both make the
/// right side larger, so a violation is an implementation error).
DominationReport empirical_domination(const CayleyBall& ball, const KernelCycle& kernel, std::vector<int> ks,
                                      const std::vector<int>& rs, const MonotoneFunction& lambda_lower,
                                      const MonotoneFunction& phi_upper, double c, int workers = 1);

// Certified profile models for the simple walk.
MonotoneFunction z_phi_exact();
MonotoneFunction z_lambda_exact();
/// Φ(L 2^L) <= 2/(3L) from lamp-interval sets (lamplighter over Z, s = 2).
MonotoneFunction lamplighter_phi_upper();
/// ½ Φ_low² with Φ_low(n) = 1/(6 G(2n)), G(N) = 3m − 2 for the least m with
/// m 2^m >= N (an upper bound on the inverse growth).
MonotoneFunction lamplighter_lambda_lower();

}  // namespace walklab
