#include "walklab/occupation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/parallel.hpp"
#include "walklab/regularity.hpp"
#include "walklab/rng.hpp"
#include "walklab/walk.hpp"

namespace walklab {

namespace {

constexpr int kTailExplicitEnd = 1 << 14;

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

bool is_simple_zd(const Group& group, const KernelCycle& kernel) {
  if (group.family() != GroupFamily::kZd || kernel.steps.size() != 1) return false;
  const Kernel& k = kernel.steps.front();
  if (!(k.hold == Rational(0))) return false;
  return std::all_of(k.weights.begin(), k.weights.end(), [&](const Rational& w) { return w == k.weights.front(); });
}

// |x|² multiplicities over the L1 ball of radius r in Z^d
std::map<std::int64_t, double> square_norm_histogram(const Group& group, const CayleyBall& ball, int r, int dim) {
  std::map<std::int64_t, double> hist;
  const std::size_t end = ball.count_within(r);
  for (std::size_t i = 0; i < end; ++i) {
    const auto coords = zd_coords(group.canonical_key(ball.word(i)), dim);
    std::int64_t s = 0;
    for (auto c : coords) s += c * c;
    hist[s] += 1;
  }
  return hist;
}

}  // namespace

nlohmann::json OccupationResult::to_json() const {
  return {{"r", r},
          {"p", p},
          {"horizon", horizon},
          {"partial", partial},
          {"partial_err", partial_err},
          {"tail", finite_or_null(tail)},
          {"tail_status", tail_status},
          {"total", total}};
}

std::vector<OccupationResult> occupation_moments(const Group& group, const CayleyBall& ball, const KernelCycle& kernel,
                                                 const std::vector<int>& rs, const std::vector<int>& ps, int horizon,
                                                 int workers) {
  if (horizon < 0) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 0");
  for (int r : rs) {
    if (r < 0 || r > ball.radius()) throw Error(ErrorCode::kRadiusTooSmall, "occupation radius exceeds ball radius");
  }
  for (int p : ps) {
    if (p < 1) throw Error(ErrorCode::kInvalidArgument, "moment order p must be >= 1");
  }
  // mid[j][k], half[j][k] for rs[j]
  std::vector<std::vector<double>> mid(rs.size()), half(rs.size());
  Evolver ev(ball, kernel, {.limit_radius = -1, .workers = workers});
  ev.start_at_identity();
  for (int k = 0; k <= horizon; ++k) {
    if (k > 0) ev.step();
    for (std::size_t j = 0; j < rs.size(); ++j) {
      const Interval iv = ev.within(rs[j]);
      mid[j].push_back(0.5 * (iv.lo + iv.hi));
      half[j].push_back(0.5 * (iv.hi - iv.lo));
    }
  }
  if (ev.leaked() > kOccupationLeakBudget) {
    throw Error(ErrorCode::kLeakage, "leaked mass " + std::to_string(ev.leaked()) + " exceeds budget");
  }

  const bool model = is_simple_zd(group, kernel) && horizon >= kTailWindow;
  const int dim = group.generator_count() / 2;
  const double dd = dim;
  std::vector<OccupationResult> out;
  for (std::size_t j = 0; j < rs.size(); ++j) {
    std::map<std::int64_t, double> hist;
    double volume = 0;
    double scale = 0;
    auto shape = [&](double k) {
      double s = 0;
      for (const auto& [sq, count] : hist) s += count * std::exp(-dd * static_cast<double>(sq) / (2 * k));
      return s * std::pow(dd / (2 * std::numbers::pi * k), dd / 2);
    };
    if (model) {
      hist = square_norm_histogram(group, ball, rs[j], dim);
      for (const auto& [sq, count] : hist) volume += count;
      // window of even length so both parities weigh equally
      double measured = 0, modelled = 0;
      for (int k = horizon - kTailWindow + 1; k <= horizon; ++k) {
        measured += mid[j][static_cast<std::size_t>(k)];
        modelled += shape(k);
      }
      scale = measured / modelled;
    }
    for (int p : ps) {
      OccupationResult res;
      res.r = rs[j];
      res.p = p;
      res.horizon = horizon;
      for (int k = 0; k <= horizon; ++k) {
        const double w = std::pow(k + 1.0, p - 1);
        res.partial += w * mid[j][static_cast<std::size_t>(k)];
        res.partial_err += w * half[j][static_cast<std::size_t>(k)];
      }
      const double s = dd / 2 - (p - 1);
      if (model && s > 1) {
        double tail = 0;
        const int kend = std::max(kTailExplicitEnd, horizon);
        for (int k = horizon + 1; k <= kend; ++k) tail += std::pow(k + 1.0, p - 1) * shape(k);
        tail += volume * std::pow(dd / (2 * std::numbers::pi), dd / 2) * std::pow(kend + 0.5, 1 - s) / (s - 1);
        res.tail = scale * tail;
        res.tail_status = "MODEL-DEPENDENT";
        res.total = res.partial + res.tail;
      } else {
        res.tail = model ? INFINITY : NAN;
        res.tail_status = "UNCONTROLLED";
        res.total = res.partial;
      }
      out.push_back(res);
    }
  }
  return out;
}

nlohmann::json ExponentFit::to_json() const {
  return {{"p", p}, {"slope", slope}, {"beta", beta}, {"points", points}};
}

ExponentFit occupation_exponent_fit(const std::vector<OccupationResult>& results, int p) {
  std::vector<double> xs, ys;
  for (const auto& r : results) {
    if (r.p != p || r.r < 1 || r.tail_status != "MODEL-DEPENDENT") continue;
    xs.push_back(std::log(r.r));
    ys.push_back(std::log(r.total));
  }
  if (xs.size() < 4) {
    throw Error(ErrorCode::kInsufficientData, "exponent fit needs >= 4 radii with controlled tails");
  }
  ExponentFit fit;
  fit.p = p;
  fit.slope = least_squares(xs, ys).first;
  fit.beta = fit.slope / p;
  fit.points = xs.size();
  return fit;
}

nlohmann::json CounterexampleReport::to_json() const {
  return {{"steps", steps},
          {"samples", samples},
          {"mean_distance", mean_distance},
          {"mean_max_n", mean_max_n},
          {"formula_return", formula_return},
          {"simulated_return", simulated_return},
          {"sigma", sigma},
          {"max_z", max_z},
          {"max_distance_ratio", max_distance_ratio}};
}

CounterexampleReport counterexample_walk(const std::vector<double>& nu, int steps, std::uint64_t samples,
                                         std::uint64_t seed, int workers) {
  if (nu.empty() || steps < 1 || samples == 0) throw Error(ErrorCode::kInvalidArgument, "need nu, steps, samples");
  double total = 0;
  for (double v : nu) {
    if (v < 0) throw Error(ErrorCode::kInvalidArgument, "nu must be nonnegative");
    total += v;
  }
  if (!(total > 0)) throw Error(ErrorCode::kInvalidArgument, "nu has zero mass");
  std::vector<double> cdf;
  double acc = 0;
  for (double v : nu) cdf.push_back(acc += v / total);
  const int support = static_cast<int>(nu.size()) - 1;
  const auto n_steps = static_cast<std::size_t>(steps);

  struct Block {
    std::vector<double> dist, maxn, formula, ratio;
    std::vector<std::uint64_t> returns;
  };
  std::vector<Block> blocks(kMonteCarloBlocks);
  parallel_chunks(kMonteCarloBlocks, workers, [&](std::size_t begin, std::size_t end, int) {
    for (std::size_t b = begin; b < end; ++b) {
      Block& blk = blocks[b];
      blk.dist.assign(n_steps, 0);
      blk.maxn.assign(n_steps, 0);
      blk.formula.assign(n_steps, 0);
      blk.ratio.assign(n_steps, 0);
      blk.returns.assign(n_steps, 0);
      SplitMix64 rng(SplitMix64::mix(seed ^ static_cast<std::uint64_t>(b)));
      const std::uint64_t first = samples * b / kMonteCarloBlocks;
      const std::uint64_t last = samples * (b + 1) / kMonteCarloBlocks;
      std::vector<int> lamps(static_cast<std::size_t>(2 * support + 1));
      for (std::uint64_t s = first; s < last; ++s) {
        std::fill(lamps.begin(), lamps.end(), 0);
        int max_n = 0;
        for (std::size_t i = 0; i < n_steps; ++i) {
          const double u = rng.uniform();
          const int n = static_cast<int>(std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
          const int nn = std::min(n, support);
          max_n = std::max(max_n, nn);
          for (int x = -nn; x <= nn; ++x) lamps[static_cast<std::size_t>(x + support)] = static_cast<int>(rng.next() & 1);
          LamplighterElement e;
          e.cursor = {0};
          bool all_off = true;
          for (int x = -support; x <= support; ++x) {
            if (lamps[static_cast<std::size_t>(x + support)]) {
              e.lamps.push_back({{x}, 1});
              all_off = false;
            }
          }
          const double d = static_cast<double>(lamplighter_z_word_length(e));
          blk.dist[i] += d;
          blk.maxn[i] += max_n;
          blk.formula[i] += std::exp2(-2.0 * max_n - 1);
          blk.ratio[i] = std::max(blk.ratio[i], d / (2.0 * max_n + 1));
          if (all_off) ++blk.returns[i];
        }
      }
    }
  });

  CounterexampleReport rep;
  rep.steps = steps;
  rep.samples = samples;
  const double ns = static_cast<double>(samples);
  for (std::size_t i = 0; i < n_steps; ++i) {
    double dist = 0, maxn = 0, formula = 0;
    std::uint64_t returns = 0;
    for (const auto& blk : blocks) {
      dist += blk.dist[i];
      maxn += blk.maxn[i];
      formula += blk.formula[i];
      returns += blk.returns[i];
      rep.max_distance_ratio = std::max(rep.max_distance_ratio, blk.ratio[i]);
    }
    const double f = formula / ns;
    const double sim = static_cast<double>(returns) / ns;
    const double sigma = std::sqrt(f * (1 - f) / ns);
    rep.mean_distance.push_back(dist / ns);
    rep.mean_max_n.push_back(maxn / ns);
    rep.formula_return.push_back(f);
    rep.simulated_return.push_back(sim);
    rep.sigma.push_back(sigma);
    if (sigma > 0) rep.max_z = std::max(rep.max_z, std::abs(sim - f) / sigma);
  }
  return rep;
}

}  // namespace walklab
