#include "walklab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "walklab/regularity.hpp"
#include "walklab/walk.hpp"

namespace walklab {

Rational edge_orbit_constant(const Group& group) { return Rational(1, 2 * group.generator_count()); }

Rational edge_orbit_audit(const Group& group, const CayleyBall& ball) {
  std::vector<Key> gen_keys;
  for (int t = 0; t < group.generator_count(); ++t) gen_keys.push_back(group.canonical_key(Word{t}));
  std::int64_t min_meet = INT64_MAX;
  for (std::size_t x = 0; x < ball.size(); ++x) {
    const Word wx = ball.word(x);
    for (int s = 0; s < group.generator_count(); ++s) {
      // the translate by x^{-1} moves (x, xs) to (1, x^{-1} x s)
      Word w = group.inverse_word(wx);
      w.insert(w.end(), wx.begin(), wx.end());
      w.push_back(s);
      const Key z = group.canonical_key(w);
      const auto meet = std::count(gen_keys.begin(), gen_keys.end(), z);
      min_meet = std::min<std::int64_t>(min_meet, meet);
    }
  }
  return Rational(min_meet, 2 * group.generator_count());
}

nlohmann::json BoundReport::to_json() const {
  return {{"k", k},           {"r", r},           {"c", c},           {"phi", phi_id},
          {"lambda", lambda_id}, {"ell_star", ell_star}, {"rhs", rhs}, {"regime", regime},
          {"extrapolated", extrapolated}, {"capped", capped}};
}

BoundReport small_ball_bound(int k, int r, const MonotoneFunction& lambda, const MonotoneFunction& phi, double c) {
  if (k < 1 || r < 1) throw Error(ErrorCode::kInvalidArgument, "small-ball bound needs k, r >= 1");
  BoundReport rep;
  rep.k = k;
  rep.r = r;
  rep.c = c;
  rep.phi_id = phi.label();
  rep.lambda_id = lambda.label();
  const double base = generalized_inverse(phi, c / r);
  rep.extrapolated = phi.extrapolates(base);
  int best = 0;
  for (int ell = 1; ell <= kEllCap; ++ell) {
    const double arg = std::ldexp(base, ell + 1);
    const double lam = lambda(arg);
    rep.extrapolated = rep.extrapolated || lambda.extrapolates(arg);
    // the left side grows with ℓ because Λ is nonincreasing
    if (ell * std::numbers::ln2 / lam > k) break;
    best = ell;
  }
  rep.ell_star = best;
  rep.capped = best == kEllCap;
  rep.rhs = 2.0 * std::exp(-0.5 * std::numbers::ln2 * best);
  return rep;
}

double grigoryan_psi(const MonotoneFunction& lambda, double t) {
  if (t < 0) throw Error(ErrorCode::kInvalidArgument, "t must be >= 0");
  if (t == 0) return 1.0;
  auto integrand = [&](double u) { return 1.0 / lambda(std::exp(u)); };
  auto big_f = [&](double upper) {
    if (upper <= 0) return 0.0;
    double err = 0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, upper, 20, 1e-13, &err);
  };
  double hi = 1.0;
  while (big_f(hi) < t) {
    hi *= 2;
    if (hi > 700) throw Error(ErrorCode::kNoConvergence, "psi(t) overflows for t = " + std::to_string(t));
  }
  double lo = hi > 1 ? hi / 2 : 0.0;
  std::uintmax_t iters = 200;
  auto [a, b] = boost::math::tools::toms748_solve([&](double u) { return big_f(u) - t; }, lo, hi,
                                                  boost::math::tools::eps_tolerance<double>(48), iters);
  if (iters >= 200) throw Error(ErrorCode::kNoConvergence, "psi root finding did not converge");
  return std::exp(0.5 * (a + b));
}

double psi_doubling(const MonotoneFunction& lambda, double x) { return x / lambda(std::exp2(x)); }

double psi_doubling_inverse(const MonotoneFunction& lambda, double n) {
  if (n <= 0) return 0.0;
  double lo = 0;
  double hi = 1;
  while (psi_doubling(lambda, hi) < n) {
    lo = hi;
    hi *= 2;
    if (hi > 1000) throw OutOfRangeError(OutOfRangeError::Side::kAbove, "Psi does not reach " + std::to_string(n));
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (psi_doubling(lambda, mid) >= n) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

nlohmann::json DoublingCaseReport::to_json() const {
  return {{"value", value}, {"diffusive", diffusive}, {"heat", heat}, {"regime", regime}, {"crossover_k", crossover_k}};
}

DoublingCaseReport doubling_case_bound(double k, double r, double beta, double c, const MonotoneFunction& lambda,
                                    int n_lo, int n_hi, double threshold) {
  if (!(beta > 0)) throw Error(ErrorCode::kInvalidArgument, "beta must be > 0");
  auto dbl = doubling_diagnostic(lambda, n_lo, n_hi, threshold);
  if (!dbl.pass) {
    throw Error(ErrorCode::kNotDoubling, "Lambda(2^n) min ratio " + std::to_string(dbl.min_ratio) + " at n = " +
                                             std::to_string(dbl.argmin));
  }
  DoublingCaseReport rep;
  rep.diffusive = k / std::pow(r, beta);
  rep.heat = psi_doubling_inverse(lambda, c * k);
  rep.regime = rep.diffusive <= rep.heat ? "diffusive" : "return";
  rep.value = std::exp(-c * std::min(rep.diffusive, rep.heat));
  // k/r^β − Ψ^{-1}(ck) changes sign once; bisect in log k
  auto g = [&](double kk) { return kk / std::pow(r, beta) - psi_doubling_inverse(lambda, c * kk); };
  auto defined = [&](double kk) {
    try {
      (void)g(kk);
      return true;
    } catch (const OutOfRangeError&) {
      return false;
    }
  };
  double lo = 1e-6, hi = 1e30;
  while (hi > k && !defined(hi)) hi /= 10;
  if (defined(hi) && g(lo) < 0 && g(hi) > 0) {
    for (int i = 0; i < 200; ++i) {
      const double mid = std::sqrt(lo * hi);
      (g(mid) < 0 ? lo : hi) = mid;
    }
    rep.crossover_k = hi;
  }
  return rep;
}

nlohmann::json SaturationFit::to_json() const {
  return {{"alpha", alpha}, {"stderr", stderr_alpha}, {"band_lo", band_lo}, {"band_hi", band_hi},
          {"points", points}, {"one_sided", one_sided}};
}

SaturationFit saturation_exponent_fit(const ProfileTable& phi, const ProfileTable& lambda) {
  auto pick = [](const ProfileTable& t, double n, Kind prefer) -> std::optional<ProfilePoint> {
    std::optional<ProfilePoint> best;
    for (const auto& p : t.points) {
      if (p.n != n) continue;
      if (p.kind == Kind::kExact) return p;
      if (p.kind == prefer && !best) best = p;
    }
    return best;
  };
  SaturationFit fit;
  std::vector<double> ns;
  for (const auto& p : phi.points) ns.push_back(p.n);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::vector<double> xs, ys;
  for (double n : ns) {
    auto ph = pick(phi, n, Kind::kUpper);
    auto la = pick(lambda, n, Kind::kUpper);
    if (!ph || !la || !(ph->value > 0) || !(la->value > 0) || ph->value >= 1) continue;
    if (ph->kind != Kind::kExact || la->kind != Kind::kExact) fit.one_sided = true;
    xs.push_back(std::log(ph->value));
    ys.push_back(std::log(la->value));
  }
  if (xs.size() < 6) throw Error(ErrorCode::kInsufficientData, "saturation fit needs >= 6 common points");
  auto [slope, icpt] = least_squares(xs, ys);
  double ss = 0;
  double mx = 0;
  for (double x : xs) mx += x;
  mx /= static_cast<double>(xs.size());
  double sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (icpt + slope * xs[i]);
    ss += e * e;
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  fit.alpha = slope;
  fit.points = xs.size();
  fit.stderr_alpha = xs.size() > 2 ? std::sqrt(ss / static_cast<double>(xs.size() - 2) / sxx) : 0.0;
  fit.band_lo = slope - 2 * fit.stderr_alpha;
  fit.band_hi = slope + 2 * fit.stderr_alpha;
  return fit;
}

nlohmann::json RearrangementReport::to_json() const {
  nlohmann::json r = nlohmann::json::array();
  for (const auto& row : rows) r.push_back({{"c2", row.c2}, {"c3_needed", row.c3_needed}, {"slope", row.slope}});
  return {{"rows", r}, {"best_c2", best_c2}, {"best_c3", best_c3}, {"holds", holds}};
}

RearrangementReport rearrangement_check(const ProfileTable& phi, const ProfileTable& lambda) {
  auto phi_pts = phi.bounds(Kind::kUpper);
  auto lam_pts = lambda.bounds(Kind::kUpper);
  if (phi_pts.size() < 6 || lam_pts.size() < 2) throw Error(ErrorCode::kInsufficientData, "need >= 6 Phi points");
  std::vector<std::pair<double, double>> lt;
  for (const auto& p : lam_pts) {
    if (lt.empty() || p.n > lt.back().first) lt.emplace_back(p.n, std::min(p.value, lt.empty() ? p.value : lt.back().second));
  }
  auto lam_fn = MonotoneFunction::tabulated(lt, Direction::kDecreasing, Interp::kLogLog);
  std::vector<std::pair<double, double>> pt;
  for (const auto& p : phi_pts) {
    if (pt.empty() || p.n > pt.back().first) pt.emplace_back(p.n, std::min(p.value, pt.empty() ? p.value : pt.back().second));
  }
  auto phi_fn = MonotoneFunction::tabulated(pt, Direction::kDecreasing, Interp::kStep);

  RearrangementReport rep;
  rep.best_c3 = INFINITY;
  for (double c2 : {1.0, 2.0, 4.0, 8.0}) {
    RearrangementReport::Row row{c2, 0, 0};
    std::vector<double> xs, ys;
    for (const auto& [n, eps] : pt) {
      const double t = generalized_inverse(phi_fn, eps);
      const double arg = c2 * t;
      if (arg > lt.back().first || eps >= 1) continue;
      const double lam = lam_fn(arg);
      row.c3_needed = std::max(row.c3_needed, lam / (eps * eps));
      xs.push_back(std::log(eps));
      ys.push_back(std::log(lam));
    }
    if (xs.size() < 3) continue;
    row.slope = least_squares(xs, ys).first;
    rep.rows.push_back(row);
    if (row.c3_needed < rep.best_c3) {
      rep.best_c3 = row.c3_needed;
      rep.best_c2 = c2;
    }
  }
  if (rep.rows.empty()) throw Error(ErrorCode::kInsufficientData, "no usable epsilon grid");
  rep.holds = std::all_of(rep.rows.begin(), rep.rows.end(), [](const auto& r) { return r.slope >= 1.5; });
  return rep;
}

nlohmann::json DominationReport::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    pts.push_back({{"k", p.k}, {"r", p.r}, {"lo", p.lo}, {"hi", p.hi}, {"rhs", p.rhs}, {"ell_star", p.ell_star},
                   {"violation", p.violation}});
  }
  return {{"points", pts}, {"violations", violations}, {"extrapolated", extrapolated}};
}

DominationReport empirical_domination(const CayleyBall& ball, const KernelCycle& kernel, std::vector<int> ks,
                                      const std::vector<int>& rs, const MonotoneFunction& lambda_lower,
                                      const MonotoneFunction& phi_upper, double c, int workers) {
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  for (int r : rs) {
    if (r > ball.radius()) throw Error(ErrorCode::kRadiusTooSmall, "grid radius exceeds ball radius");
  }
  DominationReport rep;
  Evolver ev(ball, kernel, {.limit_radius = -1, .workers = workers});
  for (int k : ks) {
    ev.advance(k - ev.time());
    for (int r : rs) {
      auto iv = r >= k * kernel.substeps_moving() ? Interval{1.0, 1.0} : ev.within(r);
      auto b = small_ball_bound(k, r, lambda_lower, phi_upper, c);
      rep.extrapolated = rep.extrapolated || b.extrapolated;
      const bool bad = iv.hi > b.rhs * (1 + 1e-12);
      rep.violations += bad ? 1 : 0;
      rep.points.push_back({k, r, iv.lo, iv.hi, b.rhs, b.ell_star, bad});
    }
  }
  return rep;
}

MonotoneFunction z_phi_exact() {
  auto f = MonotoneFunction::custom([](double n) { return 1.0 / std::floor(std::max(n, 1.0)); }, Direction::kDecreasing,
                                    "z:phi:exact", [](double x) { return x >= 1 ? 1.0 : std::ceil(1.0 / x - 1e-12); });
  f.certified_on(1, INFINITY);
  return f;
}

MonotoneFunction z_lambda_exact() {
  auto f = MonotoneFunction::custom(
      [](double n) {
        // 1 − cos x written as 2 sin²(x/2) so the value stays accurate for huge n
        const double s = std::sin(std::numbers::pi / (2 * (std::floor(std::max(n, 1.0)) + 1.0)));
        return 2 * s * s;
      },
      Direction::kDecreasing, "z:lambda:exact");
  f.certified_on(1, INFINITY);
  return f;
}

MonotoneFunction lamplighter_phi_upper() {
  auto fn = [](double n) {
    if (n < 2) return 1.0;
    int len = 1;
    while (static_cast<double>(len + 1) * std::ldexp(1.0, len + 1) <= n) ++len;
    return 2.0 / (3.0 * len);
  };
  auto inv = [](double x) {
    if (x >= 1) return 1.0;
    const double len = std::ceil(2.0 / (3.0 * x) - 1e-12);
    return len * std::exp2(len);
  };
  auto f = MonotoneFunction::custom(fn, Direction::kDecreasing, "lamplighter:phi:upper", inv);
  f.certified_on(1, INFINITY);
  return f;
}

MonotoneFunction lamplighter_lambda_lower() {
  auto fn = [](double n) {
    const double big_n = 2 * std::max(n, 1.0);
    double m = 1;
    while (m * std::exp2(m) < big_n) m += 1;
    const double phi_low = 1.0 / (6.0 * (3 * m - 2));
    return 0.5 * phi_low * phi_low;
  };
  auto f = MonotoneFunction::custom(fn, Direction::kDecreasing, "lamplighter:lambda:lower");
  f.certified_on(1, INFINITY);
  return f;
}

}  // namespace walklab
