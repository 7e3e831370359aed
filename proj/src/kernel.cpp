#include "walklab/kernel.hpp"

#include "walklab/error.hpp"

namespace walklab {

namespace {

Rational as_rational(const nlohmann::json& v) {
  if (v.is_string()) return Rational::parse(v.get<std::string>());
  if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
  if (v.is_number_float()) return Rational::parse(v.dump());
  throw Error(ErrorCode::kInvalidArgument, "weight must be a rational string or number");
}

Kernel parse_single(const nlohmann::json& spec, const Group& group) {
  if (spec.is_string() && spec.get<std::string>() == "srw") return Kernel::simple(group);
  if (!spec.is_object() || !spec.contains("weights")) {
    throw Error(ErrorCode::kInvalidArgument, "kernel needs \"weights\"");
  }
  Kernel k;
  k.weights.assign(static_cast<std::size_t>(group.generator_count()), Rational(0));
  for (const auto& [name, value] : spec.at("weights").items()) {
    auto g = group.find_generator(name);
    if (!g) throw Error(ErrorCode::kInvalidArgument, "unknown generator '" + name + "'");
    k.weights[static_cast<std::size_t>(*g)] = as_rational(value);
  }
  if (spec.contains("hold")) k.hold = as_rational(spec.at("hold"));
  k.validate(group);
  return k;
}

}  // namespace

Kernel Kernel::simple(const Group& group) {
  Kernel k;
  k.weights.assign(static_cast<std::size_t>(group.generator_count()), Rational(1, group.generator_count()));
  return k;
}

void Kernel::validate(const Group& group) const {
  if (weights.size() != static_cast<std::size_t>(group.generator_count())) {
    throw Error(ErrorCode::kInvalidArgument, "kernel has wrong number of weights");
  }
  Rational total = hold;
  if (hold < Rational(0)) throw Error(ErrorCode::kInvalidArgument, "negative hold");
  for (std::size_t s = 0; s < weights.size(); ++s) {
    if (weights[s] < Rational(0)) throw Error(ErrorCode::kInvalidArgument, "negative weight");
    if (!(weights[s] == weights[static_cast<std::size_t>(group.inverse(static_cast<int>(s)))])) {
      throw Error(ErrorCode::kInvalidArgument, "kernel is not symmetric at " + group.generator_name(static_cast<int>(s)));
    }
    total = total + weights[s];
  }
  if (!(total == Rational(1))) throw Error(ErrorCode::kInvalidArgument, "kernel mass is " + total.str());
}

std::vector<double> Kernel::weights_d() const {
  std::vector<double> out;
  out.reserve(weights.size());
  for (const auto& w : weights) out.push_back(w.to_double());
  return out;
}

Rational Kernel::min_positive_weight() const {
  Rational best(1);
  for (const auto& w : weights) {
    if (Rational(0) < w && w < best) best = w;
  }
  return best;
}

bool Kernel::moves() const {
  for (const auto& w : weights) {
    if (Rational(0) < w) return true;
  }
  return false;
}

int KernelCycle::substeps_moving() const {
  int n = 0;
  for (const auto& k : steps) n += k.moves() ? 1 : 0;
  return n;
}

KernelCycle single(const Kernel& kernel, std::string label) {
  return KernelCycle{{kernel}, std::move(label)};
}

KernelCycle parse_kernel(const nlohmann::json& spec, const Group& group) {
  if (spec.is_string()) {
    const auto name = spec.get<std::string>();
    if (name == "srw") return single(Kernel::simple(group), "srw");
    if (name == "switch-walk-switch") {
      if (group.family() != GroupFamily::kLamplighter || group.generator_count() != 3) {
        throw Error(ErrorCode::kInvalidArgument, "switch-walk-switch needs the lamplighter over Z with s=2");
      }
      Kernel sw;
      sw.weights = {Rational(0), Rational(0), Rational(1, 2)};
      sw.hold = Rational(1, 2);
      Kernel walk;
      walk.weights = {Rational(1, 2), Rational(1, 2), Rational(0)};
      return KernelCycle{{sw, walk, sw}, "switch-walk-switch"};
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown kernel '" + name + "'");
  }
  if (spec.is_object() && spec.contains("cycle")) {
    KernelCycle cycle{{}, "cycle"};
    for (const auto& part : spec.at("cycle")) cycle.steps.push_back(parse_single(part, group));
    if (cycle.steps.empty()) throw Error(ErrorCode::kInvalidArgument, "empty kernel cycle");
    return cycle;
  }
  return single(parse_single(spec, group));
}

}  // namespace walklab
