#include "walklab/monotone.hpp"

#include <algorithm>
#include <cmath>

namespace walklab {

MonotoneFunction MonotoneFunction::power_log(double a, double p, double q) {
  if (!(a > 0) || p < 0 || q < 0) throw Error(ErrorCode::kInvalidArgument, "power-log model needs a > 0, p, q >= 0");
  MonotoneFunction f;
  f.kind_ = Repr::kPowerLog;
  f.direction_ = Direction::kDecreasing;
  f.a_ = a;
  f.p_ = p;
  f.q_ = q;
  f.label_ = "model:" + std::to_string(a) + "*n^-" + std::to_string(p) + "*log(n)^-" + std::to_string(q);
  return f;
}

MonotoneFunction MonotoneFunction::tabulated(std::vector<std::pair<double, double>> points, Direction direction,
                                             Interp interp) {
  if (points.empty()) throw Error(ErrorCode::kInsufficientData, "empty table");
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i].first > points[i - 1].first)) throw Error(ErrorCode::kInvalidArgument, "table x not increasing");
    const bool ok = direction == Direction::kDecreasing ? points[i].second <= points[i - 1].second
                                                        : points[i].second >= points[i - 1].second;
    if (!ok) throw Error(ErrorCode::kInvalidArgument, "table is not monotone");
  }
  if (interp == Interp::kLogLog) {
    for (const auto& [x, y] : points) {
      if (!(x > 0) || !(y > 0)) throw Error(ErrorCode::kInvalidArgument, "log-log table needs positive entries");
    }
  }
  MonotoneFunction f;
  f.kind_ = Repr::kTable;
  f.direction_ = direction;
  f.table_ = std::move(points);
  f.interp_ = interp;
  f.label_ = interp == Interp::kStep ? "table:step" : "table:loglog";
  return f;
}

MonotoneFunction MonotoneFunction::custom(std::function<double(double)> fn, Direction direction, std::string label,
                                          std::function<double(double)> inverse) {
  MonotoneFunction f;
  f.kind_ = Repr::kCustom;
  f.direction_ = direction;
  f.fn_ = std::move(fn);
  f.inverse_ = std::move(inverse);
  f.label_ = std::move(label);
  return f;
}

MonotoneFunction& MonotoneFunction::certified_on(double lo, double hi) {
  certified_ = std::make_pair(lo, hi);
  return *this;
}

double MonotoneFunction::operator()(double x) const {
  switch (kind_) {
    case Repr::kPowerLog: {
      double v = a_;
      if (p_ > 0) v *= std::pow(x, -p_);
      if (q_ > 0) v *= std::pow(std::log(x), -q_);
      return v;
    }
    case Repr::kTable: {
      if (x <= table_.front().first) return table_.front().second;
      if (x >= table_.back().first) return table_.back().second;
      auto it = std::upper_bound(table_.begin(), table_.end(), x,
                                 [](double v, const auto& pt) { return v < pt.first; });
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      if (interp_ == Interp::kStep) {
        // a value tabulated at n holds from n onward
        return lo.second;
      }
      const double t = (std::log(x) - std::log(lo.first)) / (std::log(hi.first) - std::log(lo.first));
      return std::exp(std::log(lo.second) + t * (std::log(hi.second) - std::log(lo.second)));
    }
    case Repr::kCustom:
      return fn_(x);
  }
  return NAN;
}

bool MonotoneFunction::extrapolates(double x) const {
  if (kind_ == Repr::kTable) return x < table_.front().first || x > table_.back().first;
  if (certified_) return x < certified_->first || x > certified_->second;
  return kind_ == Repr::kPowerLog;
}

std::optional<double> MonotoneFunction::closed_inverse(double x) const {
  if (inverse_) return inverse_(x);
  if (kind_ == Repr::kPowerLog && q_ == 0 && p_ > 0) {
    if (x >= a_) return 1.0;
    return std::pow(a_ / x, 1.0 / p_);
  }
  if (kind_ == Repr::kTable && interp_ == Interp::kStep) {
    for (const auto& [t, v] : table_) {
      const bool hit = direction_ == Direction::kDecreasing ? v <= x : v >= x;
      if (hit) return t;
    }
    throw OutOfRangeError(direction_ == Direction::kDecreasing ? OutOfRangeError::Side::kBelow
                                                               : OutOfRangeError::Side::kAbove,
                          "table never reaches " + std::to_string(x));
  }
  return std::nullopt;
}

double generalized_inverse(const MonotoneFunction& f, double x, double t_max) {
  if (auto closed = f.closed_inverse(x)) return *closed;
  const bool dec = f.direction() == Direction::kDecreasing;
  auto hit = [&](double t) { return dec ? f(t) <= x : f(t) >= x; };
  double lo = 1.0;
  if (hit(lo)) return lo;
  // grow the bracket geometrically, then bisect in log scale
  double hi = 2.0;
  while (!hit(hi)) {
    lo = hi;
    if (hi >= t_max) {
      throw OutOfRangeError(dec ? OutOfRangeError::Side::kBelow : OutOfRangeError::Side::kAbove,
                            f.label() + " does not reach " + std::to_string(x));
    }
    hi = std::min(hi * hi, t_max);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    const double m = (mid > lo && mid < hi) ? mid : 0.5 * (lo + hi);
    if (hit(m)) {
      hi = m;
    } else {
      lo = m;
    }
  }
  return hi;
}

}  // namespace walklab
