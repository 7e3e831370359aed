#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "walklab/group.hpp"
#include "walklab/rational.hpp"

namespace walklab {

/// Symmetric step distribution over the generators plus an optional holding
/// probability. Weights are exact rationals; double copies feed the engines.
struct Kernel {
  std::vector<Rational> weights;
  Rational hold{0};

  static Kernel simple(const Group& group);
  /// Throws INVALID_ARGUMENT unless weights are nonnegative, symmetric under
  /// the inverse pairing and sum to 1 together with hold.
  void validate(const Group& group) const;
  std::vector<double> weights_d() const;
  double hold_d() const { return hold.to_double(); }
  Rational min_positive_weight() const;
  bool moves() const;
};

/// One time step applies each kernel of the cycle in order (for example
/// switch, walk, switch on a lamplighter group).
struct KernelCycle {
  std::vector<Kernel> steps;
  std::string label;

  int substeps_moving() const;
};

KernelCycle single(const Kernel& kernel, std::string label = "custom");
/// Accepts "srw", "switch-walk-switch" (lamplighter only), an object
/// {"weights": {name: rational, ...}, "hold": rational} or {"cycle": [...]}.
KernelCycle parse_kernel(const nlohmann::json& spec, const Group& group);

}  // namespace walklab
