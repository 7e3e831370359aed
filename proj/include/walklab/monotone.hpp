#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "walklab/error.hpp"

namespace walklab {

enum class Direction { kIncreasing, kDecreasing };
enum class Interp { kStep, kLogLog };

/// Thrown by generalized_inverse when x lies outside the closure of the range.
class OutOfRangeError : public Error {
 public:
  enum class Side { kBelow, kAbove };
  OutOfRangeError(Side side, const std::string& detail)
      : Error(ErrorCode::kOutOfRange, std::string(side == Side::kBelow ? "below" : "above") + " range: " + detail),
        side_(side) {}
  Side side() const { return side_; }

 private:
  Side side_;
};

/// Monotone function on [1, inf): an analytic a·n^{-p}(log n)^{-q} model, a
/// tabulated profile, or a custom callable.
class MonotoneFunction {
 public:
  static MonotoneFunction power_log(double a, double p, double q);
  /// Points must be sorted by x and monotone in the stated direction. Beyond
  /// the table the end values are held and the result is flagged.
  static MonotoneFunction tabulated(std::vector<std::pair<double, double>> points, Direction direction,
                                    Interp interp = Interp::kLogLog);
  static MonotoneFunction custom(std::function<double(double)> f, Direction direction, std::string label,
                                 std::function<double(double)> inverse = nullptr);

  double operator()(double x) const;
  Direction direction() const { return direction_; }
  const std::string& label() const { return label_; }
  /// True when x lies outside the range where values are certified rather
  /// than modeled (tables: outside the tabulated span; analytic models:
  /// everywhere unless certified_on was given).
  bool extrapolates(double x) const;
  /// Marks [lo, hi] as the certified span of an analytic or custom function.
  MonotoneFunction& certified_on(double lo, double hi);

  // Closed-form inverse when available.
  std::optional<double> closed_inverse(double x) const;
  const std::vector<std::pair<double, double>>& table() const { return table_; }
  bool is_step_table() const { return kind_ == Repr::kTable && interp_ == Interp::kStep; }

 private:
  enum class Repr { kPowerLog, kTable, kCustom };
  Repr kind_ = Repr::kCustom;
  Direction direction_ = Direction::kDecreasing;
  std::string label_;
  double a_ = 1, p_ = 0, q_ = 0;
  std::vector<std::pair<double, double>> table_;
  Interp interp_ = Interp::kLogLog;
  std::function<double(double)> fn_;
  std::function<double(double)> inverse_;
  std::optional<std::pair<double, double>> certified_;
};

/// Decreasing f: inf{t >= 1 : f(t) <= x}. Increasing f: inf{t >= 1 : f(t) >= x}.
/// Bisection returns the upper end of the final bracket, so for decreasing f
/// f(f^{-1}(x)) <= x holds at the returned point.
double generalized_inverse(const MonotoneFunction& f, double x, double t_max = 1e300);

}  // namespace walklab
