#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "walklab/monotone.hpp"
#include "walklab/profiles.hpp"

namespace walklab {

inline constexpr double kDoublingThreshold = 0.05;
inline constexpr double kSlowBandLo = 0.8;
inline constexpr double kSlowBandHi = 1.25;

struct DoublingReport {
  double min_ratio = 1;
  int argmin = 0;
  double threshold = kDoublingThreshold;
  bool pass = true;
  nlohmann::json to_json() const;
};

/// min over n in [n_lo, n_hi] of f(2^{2n}) / f(2^n). Tabulated functions must
/// cover every argument (RANGE otherwise).
DoublingReport doubling_diagnostic(const MonotoneFunction& f, int n_lo, int n_hi,
                                   double threshold = kDoublingThreshold);

struct SlowBand {
  double log2_t;
  double sup;
  double inf;
};

struct SlowVaryingReport {
  std::vector<SlowBand> bands;
  double top_sup = 1;
  double top_inf = 1;
  bool pass = true;
  nlohmann::json to_json() const;
};

/// Bands of f(λt)/f(t) over λ in [1,2] on a log grid t = 2^a .. 2^b. PASS
/// when both bands lie in [0.8, 1.25] over the top decade of the grid.
SlowVaryingReport slowly_varying_diagnostic(const MonotoneFunction& f, double log2_lo, double log2_hi,
                                            int grid_points = 64);

enum class TildeVariant { kAsDisplayed, kGeometric };
std::string to_string(TildeVariant v);

struct TildeResult {
  MonotoneFunction f_tilde;
  DoublingReport doubling;
  // f(c2 x) c1 <= f~(x) <= c3 f(c4 x) for decreasing f
  double c1 = 1, c2 = 2, c3 = 1, c4 = 0.5;
};

/// Interpolates f between dyadic points. kAsDisplayed uses the exponent
/// assignment f(2^m)^θ f(2^{m+1})^{1−θ} with θ = log2 x − m; kGeometric swaps
/// the exponents. Throws NOT_DOUBLING when f(2^n) is not doubling on
/// [n_lo, n_hi].
TildeResult tilde_interpolate(const MonotoneFunction& f, TildeVariant variant, int n_lo, int n_hi,
                              double threshold = kDoublingThreshold);

struct PowerCompressionReport {
  int iterations = 1;       // j with c^j < 1/2
  double effective_c1 = 0;  // C1^j
  double effective_c2 = 0;  // C2^{(1−c^j)/(1−c)}
  int n1 = 0;
  int checked_to = 0;
  bool direct_consistent = true;  // f(2^{2n}) <= C1^j f(2^n) on [n1, checked_to]
  nlohmann::json to_json() const;
};

/// Given increasing f with f(n) <= C1 f(C2 n^c) for n >= n0 (verified on
/// n = 2^j up to 2^{log2_max}), certifies f(2^{2n}) <= C1' f(2^n) for n >= n1.
PowerCompressionReport power_compression_doubling(const MonotoneFunction& f, double c, double c1, double c2,
                                                  double n0, int log2_max);

struct ProductProfileReport {
  double slope = 0;
  double intercept = 0;
  std::size_t points = 0;
  bool pass = false;
  nlohmann::json to_json() const;
};

/// Log-log regression of f_{G^m}(n) against f_G(n^{1/m}); PASS iff the slope
/// is 1 ± 0.2. `base` is evaluated by log-log interpolation of its table.
ProductProfileReport product_profile_check(const std::vector<std::pair<double, double>>& base,
                                           const std::vector<std::pair<double, double>>& product, int m);

/// Ordinary least squares y = a + b x; returns {b, a}.
std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace walklab
