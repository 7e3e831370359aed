#include "walklab/regularity.hpp"

#include <algorithm>
#include <cmath>

namespace walklab {

std::pair<double, double> least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  if (x.size() < 2) throw Error(ErrorCode::kInsufficientData, "regression needs two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw Error(ErrorCode::kInsufficientData, "regression with constant abscissa");
  const double b = sxy / sxx;
  return {b, my - b * mx};
}

nlohmann::json DoublingReport::to_json() const {
  return {{"min_ratio", min_ratio}, {"argmin", argmin}, {"threshold", threshold}, {"pass", pass}};
}

DoublingReport doubling_diagnostic(const MonotoneFunction& f, int n_lo, int n_hi, double threshold) {
  if (n_lo < 0 || n_hi < n_lo || 2 * n_hi > 1020) throw Error(ErrorCode::kRange, "bad doubling range");
  DoublingReport rep;
  rep.threshold = threshold;
  rep.min_ratio = INFINITY;
  for (int n = n_lo; n <= n_hi; ++n) {
    const double x = std::ldexp(1.0, n);
    const double x2 = std::ldexp(1.0, 2 * n);
    // tables are only trusted on their span
    if (!f.table().empty() && (f.extrapolates(x) || f.extrapolates(x2))) {
      throw Error(ErrorCode::kRange, "table does not cover 2^" + std::to_string(2 * n));
    }
    const double ratio = f(x2) / f(x);
    if (ratio < rep.min_ratio) {
      rep.min_ratio = ratio;
      rep.argmin = n;
    }
  }
  rep.pass = rep.min_ratio >= threshold;
  return rep;
}

nlohmann::json SlowVaryingReport::to_json() const {
  nlohmann::json b = nlohmann::json::array();
  for (const auto& x : bands) b.push_back({{"log2_t", x.log2_t}, {"sup", x.sup}, {"inf", x.inf}});
  return {{"bands", b}, {"top_sup", top_sup}, {"top_inf", top_inf}, {"pass", pass}};
}

SlowVaryingReport slowly_varying_diagnostic(const MonotoneFunction& f, double log2_lo, double log2_hi,
                                            int grid_points) {
  if (!(log2_hi > log2_lo) || log2_hi > 1020 || grid_points < 2) throw Error(ErrorCode::kRange, "bad slow-variation range");
  SlowVaryingReport rep;
  constexpr int kLambdaSteps = 32;
  const double top_from = log2_hi - std::log2(10.0);
  rep.top_sup = -INFINITY;
  rep.top_inf = INFINITY;
  for (int i = 0; i < grid_points; ++i) {
    const double a = log2_lo + (log2_hi - log2_lo) * i / (grid_points - 1);
    const double t = std::exp2(a);
    const double ft = f(t);
    SlowBand band{a, -INFINITY, INFINITY};
    for (int j = 0; j <= kLambdaSteps; ++j) {
      const double lambda = 1.0 + static_cast<double>(j) / kLambdaSteps;
      const double r = f(lambda * t) / ft;
      band.sup = std::max(band.sup, r);
      band.inf = std::min(band.inf, r);
    }
    if (a >= top_from) {
      rep.top_sup = std::max(rep.top_sup, band.sup);
      rep.top_inf = std::min(rep.top_inf, band.inf);
    }
    rep.bands.push_back(band);
  }
  rep.pass = rep.top_sup <= kSlowBandHi && rep.top_inf >= kSlowBandLo;
  return rep;
}

std::string to_string(TildeVariant v) { return v == TildeVariant::kAsDisplayed ? "as_displayed" : "geometric"; }

TildeResult tilde_interpolate(const MonotoneFunction& f, TildeVariant variant, int n_lo, int n_hi, double threshold) {
  auto doubling = doubling_diagnostic(f, n_lo, n_hi, threshold);
  if (!doubling.pass) {
    throw Error(ErrorCode::kNotDoubling, "min f(2^{2n})/f(2^n) = " + std::to_string(doubling.min_ratio) + " at n = " +
                                             std::to_string(doubling.argmin));
  }
  auto fn = [f, variant](double x) {
    const double l = std::log2(std::max(x, 1.0));
    const double m = std::floor(l);
    const double theta = l - m;
    const double lo = f(std::exp2(m));
    const double hi = f(std::exp2(m + 1));
    if (variant == TildeVariant::kAsDisplayed) return std::pow(lo, theta) * std::pow(hi, 1.0 - theta);
    return std::pow(lo, 1.0 - theta) * std::pow(hi, theta);
  };
  TildeResult res{MonotoneFunction::custom(fn, f.direction(), "tilde:" + to_string(variant) + ":" + f.label()), doubling};
  // both variants take values between f(2^{m+1}) and f(2^m), so for
  // decreasing f: f(2x) <= f~(x) <= f(x/2)
  if (f.direction() == Direction::kIncreasing) {
    res.c2 = 0.5;
    res.c4 = 2.0;
  }
  return res;
}

nlohmann::json PowerCompressionReport::to_json() const {
  return {{"iterations", iterations}, {"effective_c1", effective_c1}, {"effective_c2", effective_c2},
          {"n1", n1},                 {"checked_to", checked_to},     {"direct_consistent", direct_consistent}};
}

PowerCompressionReport power_compression_doubling(const MonotoneFunction& f, double c, double c1, double c2,
                                                  double n0, int log2_max) {
  if (!(c > 0 && c < 1) || !(c1 >= 1) || !(c2 >= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "need 0 < c < 1, C1 >= 1, C2 >= 1");
  }
  if (log2_max > 1000) throw Error(ErrorCode::kRange, "log2_max too large");
  const int j0 = std::max(0, static_cast<int>(std::ceil(std::log2(std::max(n0, 1.0)))));
  for (int j = j0; j <= log2_max; ++j) {
    const double n = std::exp2(j);
    const double rhs = c1 * f(c2 * std::pow(n, c));
    if (f(n) > rhs * (1 + 1e-12)) {
      throw Error(ErrorCode::kHypothesisFail, "f(n) > C1 f(C2 n^c) at n = 2^" + std::to_string(j));
    }
  }
  PowerCompressionReport rep;
  // f(n) <= C1^j f(C2^{1+c+...+c^{j-1}} n^{c^j}); pick j with 2 c^j < 1
  int j = 1;
  while (2 * std::pow(c, j) >= 1) ++j;
  const double cj = std::pow(c, j);
  rep.iterations = j;
  rep.effective_c1 = std::pow(c1, j);
  rep.effective_c2 = std::pow(c2, (1 - cj) / (1 - c));
  // C2' 2^{2n c^j} <= 2^n  iff  n >= log2 C2' / (1 − 2c^j)
  rep.n1 = std::max(j0, static_cast<int>(std::ceil(std::log2(rep.effective_c2) / (1 - 2 * cj) - 1e-12)));
  rep.n1 = std::max(rep.n1, 0);
  rep.checked_to = log2_max / 2;
  for (int n = rep.n1; n <= rep.checked_to; ++n) {
    if (f(std::exp2(2 * n)) > rep.effective_c1 * f(std::exp2(n)) * (1 + 1e-12)) rep.direct_consistent = false;
  }
  return rep;
}

nlohmann::json ProductProfileReport::to_json() const {
  return {{"slope", slope}, {"intercept", intercept}, {"points", points}, {"pass", pass}};
}

ProductProfileReport product_profile_check(const std::vector<std::pair<double, double>>& base,
                                           const std::vector<std::pair<double, double>>& product, int m) {
  if (m < 1) throw Error(ErrorCode::kInvalidArgument, "m must be >= 1");
  if (base.size() < 2) throw Error(ErrorCode::kInsufficientData, "base table too small");
  auto sorted = base;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> xs, ys;
  for (const auto& [n, v] : product) {
    const double arg = std::pow(n, 1.0 / m);
    if (arg < sorted.front().first || arg > sorted.back().first || !(v > 0)) continue;
    // log-log interpolation of the base table
    auto it = std::lower_bound(sorted.begin(), sorted.end(), arg, [](const auto& p, double a) { return p.first < a; });
    double g;
    if (it->first == arg) {
      g = it->second;
    } else {
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double t = (std::log(arg) - std::log(lo.first)) / (std::log(hi.first) - std::log(lo.first));
      g = std::exp(std::log(lo.second) + t * (std::log(hi.second) - std::log(lo.second)));
    }
    xs.push_back(std::log(g));
    ys.push_back(std::log(v));
  }
  if (xs.size() < 3) throw Error(ErrorCode::kInsufficientData, "fewer than 3 common points");
  ProductProfileReport rep;
  std::tie(rep.slope, rep.intercept) = least_squares(xs, ys);
  rep.points = xs.size();
  rep.pass = std::abs(rep.slope - 1) <= 0.2;
  return rep;
}

}  // namespace walklab
