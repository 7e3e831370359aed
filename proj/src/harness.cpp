#include "walklab/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "walklab/bounds.hpp"
#include "walklab/error.hpp"
#include "walklab/group.hpp"
#include "walklab/kernel.hpp"
#include "walklab/occupation.hpp"
#include "walklab/profiles.hpp"
#include "walklab/proof_lab.hpp"
#include "walklab/regularity.hpp"
#include "walklab/walk.hpp"

namespace walklab {

namespace fs = std::filesystem;
using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingInput, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::uint64_t fnv1a_file(const fs::path& path) { return fnv1a(read_file(path)); }

std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// ------------------------------ config reading -----------------------------

class Reader {
 public:
  Reader(const json& j, std::string base) : j_(j), base_(std::move(base)) {
    if (!j_.is_object()) throw Error(ErrorCode::kConfigInvalid, (base_.empty() ? "/" : base_) + ": expected an object");
  }

  std::string ptr(const std::string& key) const { return base_ + "/" + key; }
  [[noreturn]] void fail(const std::string& key, const std::string& why) const {
    throw Error(ErrorCode::kConfigInvalid, ptr(key) + ": " + why);
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }
  const json& raw(const std::string& key) {
    if (!has(key)) fail(key, "required field missing");
    return j_.at(key);
  }

  std::string str(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!has(key)) {
      if (def) return *def;
      fail(key, "required field missing");
    }
    if (!j_.at(key).is_string()) fail(key, "expected a string");
    return j_.at(key).get<std::string>();
  }

  std::int64_t integer(const std::string& key, std::optional<std::int64_t> def, std::int64_t lo, std::int64_t hi) {
    if (!has(key)) {
      if (def) return *def;
      fail(key, "required field missing");
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) fail(key, "out of range [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return x;
  }

  double number(const std::string& key, std::optional<double> def) {
    if (!has(key)) {
      if (def) return *def;
      fail(key, "required field missing");
    }
    if (!j_.at(key).is_number()) fail(key, "expected a number");
    return j_.at(key).get<double>();
  }

  bool boolean(const std::string& key, bool def) {
    if (!has(key)) return def;
    if (!j_.at(key).is_boolean()) fail(key, "expected a boolean");
    return j_.at(key).get<bool>();
  }

  std::vector<int> int_list(const std::string& key, std::optional<std::vector<int>> def, int lo, int hi) {
    if (!has(key)) {
      if (def) return *def;
      fail(key, "required field missing");
    }
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a nonempty array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) fail(key + "/" + std::to_string(i), "expected an integer");
      const auto x = v[i].get<std::int64_t>();
      if (x < lo || x > hi) fail(key + "/" + std::to_string(i), "out of range");
      out.push_back(static_cast<int>(x));
    }
    return out;
  }

  std::vector<double> num_list(const std::string& key, std::optional<std::vector<double>> def) {
    if (!has(key)) {
      if (def) return *def;
      fail(key, "required field missing");
    }
    const json& v = j_.at(key);
    if (!v.is_array() || v.empty()) fail(key, "expected a nonempty array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(key + "/" + std::to_string(i), "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  Reader child(const std::string& key) { return Reader(raw(key), ptr(key)); }

  void finish() const {
    for (const auto& [k, v] : j_.items()) {
      if (!used_.contains(k)) fail(k, "unknown field");
    }
  }

 private:
  const json& j_;
  std::string base_;
  std::set<std::string> used_;
};

struct Ctx {
  fs::path out_dir;
  int workers = 1;
  bool dry = false;
  std::string primary_name;
  std::vector<std::string> flags;
  std::vector<fs::path> outputs;
  std::map<std::string, std::string> inputs;
  std::vector<std::uint64_t> seeds;

  fs::path path_for(const std::string& name, bool primary) const {
    return out_dir / (primary && !primary_name.empty() ? primary_name : name);
  }
  void write(const std::string& name, const std::string& content, bool primary = false) {
    const fs::path p = path_for(name, primary);
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + p.string());
    out << content;
    outputs.push_back(p);
  }
  void write_json(const std::string& name, const json& j, bool primary = false) {
    write(name, j.dump(2) + "\n", primary);
  }
  void flag(const std::string& f) {
    if (std::find(flags.begin(), flags.end(), f) == flags.end()) flags.push_back(f);
  }
};

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) { row_strings(header); }
  template <typename... T>
  void row(const T&... cells) {
    std::vector<std::string> v{cell(cells)...};
    row_strings(v);
  }
  const std::string& str() const { return out_; }

 private:
  static std::string cell(double x) { return format_double(x); }
  static std::string cell(int x) { return std::to_string(x); }
  static std::string cell(std::int64_t x) { return std::to_string(x); }
  static std::string cell(std::size_t x) { return std::to_string(x); }
  static std::string cell(bool x) { return x ? "true" : "false"; }
  static std::string cell(const std::string& x) { return x; }
  static std::string cell(const char* x) { return x; }
  void row_strings(const std::vector<std::string>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) out_ += ',';
      if (v[i].find_first_of(",\"\n") != std::string::npos) {
        out_ += '"';
        for (char c : v[i]) out_ += c == '"' ? std::string("\"\"") : std::string(1, c);
        out_ += '"';
      } else {
        out_ += v[i];
      }
    }
    out_ += '\n';
  }
  std::string out_;
};

std::unique_ptr<Group> read_group(Reader& rd) {
  const std::string spec = rd.str("group");
  try {
    return make_group(spec);
  } catch (const Error& e) {
    rd.fail("group", e.what());
  }
}

KernelCycle read_kernel(Reader& rd, const Group& group) {
  if (!rd.has("kernel")) return single(Kernel::simple(group), "srw");
  try {
    return parse_kernel(rd.raw("kernel"), group);
  } catch (const Error& e) {
    rd.fail("kernel", e.what());
  }
}

const Kernel& single_step(Reader& rd, const KernelCycle& cycle) {
  if (cycle.steps.size() != 1) rd.fail("kernel", "profiles need a single-step kernel");
  return cycle.steps.front();
}

std::size_t read_memory_cap(Reader& rd) {
  return static_cast<std::size_t>(
      rd.integer("memory_cap_bytes", std::int64_t{2} << 30, std::int64_t{1} << 20, std::int64_t{1} << 40));
}

int read_radius(Reader& rd, int lo = 0) { return static_cast<int>(rd.integer("radius", std::nullopt, lo, 1 << 20)); }

std::uint64_t read_seed(Reader& rd, Ctx& ctx, const std::string& key = "seed") {
  const auto s = static_cast<std::uint64_t>(rd.integer(key, 1, 0, INT64_MAX));
  ctx.seeds.push_back(s);
  return s;
}

// Either {"ball": path} or {"group", "radius"}; the ball file names its group.
struct BallSpec {
  std::unique_ptr<Group> group;
  int radius = 0;
  std::string path;
  std::size_t cap = 0;
};

BallSpec read_ball_spec(Reader& rd, Ctx& ctx, int min_radius = 0) {
  BallSpec spec;
  if (rd.has("ball")) {
    spec.path = rd.str("ball");
    if (rd.has("group")) rd.fail("group", "give either a ball file or a group");
    std::string name;
    try {
      std::tie(spec.radius, name) = CayleyBall::peek(spec.path);
      ctx.inputs[spec.path] = hex64(fnv1a_file(spec.path));
    } catch (const Error& e) {
      rd.fail("ball", e.what());
    }
    if (name.empty()) rd.fail("ball", "ball file does not name its group");
    spec.group = make_group(name);
    if (spec.radius < min_radius) rd.fail("ball", "ball radius too small");
  } else {
    spec.group = read_group(rd);
    spec.radius = read_radius(rd, min_radius);
  }
  spec.cap = read_memory_cap(rd);
  return spec;
}

CayleyBall load_ball(const BallSpec& spec, bool need_index) {
  if (spec.path.empty()) return obtain_ball(*spec.group, spec.radius, need_index, spec.cap);
  auto ball = CayleyBall::load(spec.path);
  if (need_index) ball.attach_index(*spec.group);
  return ball;
}

// A list of numbers or "log:a..b:m", m log-spaced integers from a to b.
std::vector<double> read_grid(Reader& rd, const std::string& key) {
  const json& g = rd.raw(key);
  if (!g.is_string()) return rd.num_list(key, std::nullopt);
  const std::string s = g.get<std::string>();
  double a = 0, b = 0;
  int m = 0;
  const auto dots = s.find(".."), colon = s.rfind(':');
  try {
    if (s.rfind("log:", 0) != 0 || dots == std::string::npos || colon < dots) throw std::invalid_argument(s);
    a = std::stod(s.substr(4, dots - 4));
    b = std::stod(s.substr(dots + 2, colon - dots - 2));
    m = std::stoi(s.substr(colon + 1));
  } catch (const std::exception&) {
    m = 0;
  }
  if (!(a >= 1) || !(b >= a) || m < 1) rd.fail(key, "expected a number list or log:a..b:m");
  std::vector<double> out;
  for (int i = 0; i < m; ++i) {
    const double t = m == 1 ? 0.0 : static_cast<double>(i) / (m - 1);
    const double v = std::round(a * std::pow(b / a, t));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

// ------------------------------ experiments --------------------------------

void exp_ball(Reader& rd, Ctx& ctx) {
  auto group = read_group(rd);
  const int radius = read_radius(rd);
  const auto cap = read_memory_cap(rd);
  rd.finish();
  if (ctx.dry) return;
  auto ball = obtain_ball(*group, radius, false, cap);
  const fs::path p = ctx.path_for("ball.wlb", true);
  ball.save(p);
  ctx.outputs.push_back(p);
  Csv csv({"r", "growth"});
  const auto growth = ball.growth();
  for (std::size_t r = 0; r < growth.size(); ++r) csv.row(r, static_cast<std::size_t>(growth[r]));
  ctx.write("growth.csv", csv.str());
}

void exp_walk(Reader& rd, Ctx& ctx) {
  auto spec = read_ball_spec(rd, ctx);
  auto kernel = read_kernel(rd, *spec.group);
  auto ks = rd.int_list("k", std::nullopt, 0, 1 << 24);
  const auto rs = rd.int_list("r", std::nullopt, 0, spec.radius);
  const std::string mode = rd.str("mode", "exact");
  if (mode != "exact" && mode != "mc") rd.fail("mode", "expected \"exact\" or \"mc\"");
  std::uint64_t samples = 0, seed = 0;
  if (mode == "mc") {
    samples = static_cast<std::uint64_t>(rd.integer("samples", 100000, 1, std::int64_t{1} << 40));
    seed = read_seed(rd, ctx);
  }
  rd.finish();
  if (ctx.dry) return;
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  auto ball = load_ball(spec, mode == "mc");
  Csv csv({"k", "r", "lo", "hi", "estimate", "ci_lo", "ci_hi", "leaked", "kind"});
  if (mode == "exact") {
    Evolver ev(ball, kernel, {.limit_radius = -1, .workers = ctx.workers});
    ev.start_at_identity();
    for (int k : ks) {
      ev.advance(k - ev.time());
      for (int r : rs) {
        const Interval iv = ev.within(r);
        csv.row(k, r, iv.lo, iv.hi, 0.5 * (iv.lo + iv.hi), iv.lo, iv.hi, ev.leaked(),
                iv.lo == iv.hi ? "EXACT" : "INTERVAL");
      }
    }
  } else {
    for (int k : ks) {
      for (int r : rs) {
        auto mc = monte_carlo_small_ball(*spec.group, ball, kernel, k, r, samples, seed, ctx.workers);
        csv.row(k, r, mc.ci_lo, mc.ci_hi, mc.estimate, mc.ci_lo, mc.ci_hi, 0.0, "MC");
      }
    }
  }
  ctx.write("walk.csv", csv.str(), true);
}

void exp_profile(Reader& rd, Ctx& ctx) {
  auto spec = read_ball_spec(rd, ctx);
  auto cycle = read_kernel(rd, *spec.group);
  const Kernel& kernel = single_step(rd, cycle);
  int n_max = 0;
  if (rd.has("n_max")) n_max = static_cast<int>(rd.integer("n_max", std::nullopt, 1, kExactSizeCap));
  if (spec.radius < n_max) rd.fail("n_max", "exact profiles need ball radius >= n_max");
  int window = -1;
  if (rd.has("window_audit")) {
    if (n_max == 0) rd.fail("window_audit", "needs n_max");
    window = static_cast<int>(rd.integer("window_audit", std::nullopt, 0, 8));
  }
  std::vector<double> grid;
  AnnealOptions anneal;
  Strategy strategy = Strategy::kStructured;
  if (rd.has("grid")) {
    grid = read_grid(rd, "grid");
    try {
      strategy = strategy_from_string(rd.str("strategy", "structured"));
    } catch (const Error&) {
      rd.fail("strategy", "expected structured, greedy or anneal");
    }
    anneal.seed = read_seed(rd, ctx);
    anneal.iterations = static_cast<int>(rd.integer("iterations", anneal.iterations, 1, 10000000));
    anneal.restarts = static_cast<int>(rd.integer("restarts", anneal.restarts, 1, 1000));
  }
  if (n_max == 0 && grid.empty()) rd.fail("n_max", "need n_max, grid or both");
  const bool with_lambda = rd.boolean("lambda", true);
  rd.finish();
  if (ctx.dry) return;

  auto ball = load_ball(spec, true);
  json out = {{"group", spec.group->name()}, {"kernel", cycle.label}};
  ProfileTable phi{"phi", {}}, lambda{"lambda", {}};
  if (n_max > 0) {
    auto ex = profile_exact_small(ball, kernel, n_max);
    phi = ex.phi;
    lambda = ex.lambda;
    out["sets_per_size"] = ex.sets_per_size;
    out["lambda_converged"] = ex.lambda_converged;
    if (window >= 0) {
      auto audit = lambda_window_audit(ball, kernel, ex, window, n_max);
      out["window_audit"] = {{"window", audit.window}, {"subsets", audit.subsets}, {"below_exact", audit.below_exact}};
    }
  }
  std::vector<double> upper_grid;
  for (double n : grid) {
    if (n > n_max) upper_grid.push_back(n);
  }
  if (!upper_grid.empty()) {
    auto up = profile_upper(*spec.group, ball, kernel, upper_grid, strategy, anneal, with_lambda);
    phi.points.insert(phi.points.end(), up.phi.points.begin(), up.phi.points.end());
    lambda.points.insert(lambda.points.end(), up.lambda.points.begin(), up.lambda.points.end());
    out["lambda_converged"] = out.value("lambda_converged", true) && up.lambda_converged;
  }
  out["points"] = phi.to_json()["points"];
  out["phi"] = phi.to_json();
  if (with_lambda) {
    out["lambda"] = lambda.to_json();
    out["cheeger"] = cheeger_consistency(phi, lambda).to_json();
  }
  std::vector<double> ns;
  for (const auto& p : phi.points) ns.push_back(p.n);
  const auto growth = ball.growth();
  auto csc = csc_lower(growth, kernel, ns);
  out["csc_lower"] = csc.to_json();
  out["growth_upper"] = growth_isoperimetry_upper(growth, ns).to_json();
  ctx.write_json("profile.json", out, true);

  Csv csv({"quantity", "n", "value", "kind", "witness"});
  for (const auto* t : {&phi, &lambda, &csc}) {
    if (t == &lambda && !with_lambda) continue;
    for (const auto& p : t->points) csv.row(t->quantity, p.n, p.value, to_string(p.kind), p.witness);
  }
  ctx.write("profile.csv", csv.str());
}

MonotoneFunction read_model(Reader& rd, const std::string& key, Ctx& ctx) {
  return model_from_json(rd.raw(key), rd.ptr(key), &ctx.inputs);
}

void exp_bound(Reader& rd, Ctx& ctx) {
  auto phi = read_model(rd, "phi", ctx);
  auto lambda = read_model(rd, "lambda", ctx);
  double c = 0;
  if (rd.has("c")) {
    c = rd.number("c", std::nullopt);
    if (!(c > 0)) rd.fail("c", "must be > 0");
  } else {
    auto group = read_group(rd);
    c = edge_orbit_constant(*group).to_double();
  }
  const auto ks = rd.int_list("k", std::nullopt, 1, 1 << 30);
  const auto rs = rd.int_list("r", std::nullopt, 1, 1 << 30);
  std::vector<double> psi_t;
  if (rd.has("psi_t")) psi_t = rd.num_list("psi_t", std::nullopt);
  std::optional<double> beta;
  if (rd.has("beta")) beta = rd.number("beta", std::nullopt);
  rd.finish();
  if (ctx.dry) return;

  Csv csv({"k", "r", "ell_star", "rhs", "extrapolated", "capped", "kind"});
  for (int k : ks) {
    for (int r : rs) {
      auto b = small_ball_bound(k, r, lambda, phi, c);
      if (b.extrapolated) ctx.flag("extrapolation");
      if (b.capped) ctx.flag("ell_cap");
      csv.row(k, r, b.ell_star, b.rhs, b.extrapolated, b.capped, "MODEL");
    }
  }
  ctx.write("bound.csv", csv.str(), true);
  if (!psi_t.empty()) {
    Csv p({"t", "psi", "Psi_inverse", "kind"});
    for (double t : psi_t) p.row(t, grigoryan_psi(lambda, t), psi_doubling_inverse(lambda, t), "MODEL");
    ctx.write("psi.csv", p.str());
  }
  if (beta) {
    json rows = json::array();
    for (int k : ks) {
      for (int r : rs) {
        try {
          auto rep = doubling_case_bound(k, r, *beta, c, lambda);
          json j = rep.to_json();
          j["k"] = k;
          j["r"] = r;
          rows.push_back(j);
        } catch (const Error& e) {
          rows.push_back({{"k", k}, {"r", r}, {"error", e.what()}});
          ctx.flag("not_doubling");
        }
      }
    }
    ctx.write_json("doubling_bound.json", rows);
  }
}

void exp_domination(Reader& rd, Ctx& ctx) {
  auto spec = read_ball_spec(rd, ctx, 1);
  const Group* group = spec.group.get();
  auto kernel = read_kernel(rd, *group);
  const auto ks = rd.int_list("k", std::nullopt, 1, 1 << 24);
  const auto rs = rd.int_list("r", std::nullopt, 1, spec.radius);
  std::optional<MonotoneFunction> phi, lambda;
  if (rd.has("model")) {
    const std::string m = rd.str("model");
    if (m == "z") {
      phi = z_phi_exact();
      lambda = z_lambda_exact();
    } else if (m == "lamplighter") {
      phi = lamplighter_phi_upper();
      lambda = lamplighter_lambda_lower();
    } else {
      rd.fail("model", "expected \"z\" or \"lamplighter\"");
    }
  } else {
    phi = read_model(rd, "phi", ctx);
    lambda = read_model(rd, "lambda", ctx);
  }
  double c = edge_orbit_constant(*group).to_double();
  if (rd.has("c")) c = rd.number("c", std::nullopt);
  rd.finish();
  if (ctx.dry) return;

  auto ball = load_ball(spec, false);
  auto rep = empirical_domination(ball, kernel, ks, rs, *lambda, *phi, c, ctx.workers);
  Csv csv({"k", "r", "lo", "hi", "rhs", "ell_star", "violation"});
  for (const auto& p : rep.points) csv.row(p.k, p.r, p.lo, p.hi, p.rhs, p.ell_star, p.violation);
  ctx.write("domination.csv", csv.str(), true);
  std::size_t trivial = 0;
  for (const auto& p : rep.points) trivial += p.ell_star == 0 ? 1 : 0;
  ctx.write_json("domination.json", {{"group", group->name()},
                                      {"kernel", kernel.label},
                                      {"c", c},
                                      {"phi", phi->label()},
                                      {"lambda", lambda->label()},
                                      {"points", rep.points.size()},
                                      {"violations", rep.violations},
                                      {"trivial_points", trivial},
                                      {"extrapolated", rep.extrapolated}});
  if (rep.violations > 0) ctx.flag("violation");
  if (rep.extrapolated) ctx.flag("extrapolation");
}

std::vector<Word> read_witness(Reader& rd, const Group& group, const CayleyBall* ball) {
  const json& w = rd.raw("witness");
  const std::string p = rd.ptr("witness");
  if (w.is_string()) {
    if (ball == nullptr) return {};
    const std::string label = w.get<std::string>();
    for (const auto& wit : structured_witnesses(group, ball, static_cast<double>(ball->size()))) {
      if (wit.label != label) continue;
      std::vector<Word> out;
      for (const auto& s : wit.members) {
        auto idx = ball->find(group.key(s));
        if (!idx) throw Error(ErrorCode::kRadiusTooSmall, "witness " + label + " does not fit in the ball");
        out.push_back(ball->word(*idx));
      }
      return out;
    }
    throw Error(ErrorCode::kConfigInvalid, p + ": no structured witness named " + label);
  }
  if (!w.is_array() || w.empty()) throw Error(ErrorCode::kConfigInvalid, p + ": expected a label or word list");
  std::vector<Word> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (!w[i].is_string()) throw Error(ErrorCode::kConfigInvalid, p + "/" + std::to_string(i) + ": expected a word");
    Word word;
    std::istringstream in(w[i].get<std::string>());
    std::string tok;
    while (in >> tok) {
      auto g = group.find_generator(tok);
      if (!g) throw Error(ErrorCode::kConfigInvalid, p + "/" + std::to_string(i) + ": unknown generator " + tok);
      word.push_back(*g);
    }
    out.push_back(word);
  }
  return out;
}

void exp_prooflab(Reader& rd, Ctx& ctx) {
  const std::string mode = rd.str("mode");
  if (mode == "chi" || mode == "chain-bound") {
    const std::string chain_kind = rd.str("chain", "random");
    if (chain_kind != "random" && chain_kind != "lazy-cycle") rd.fail("chain", "expected random or lazy-cycle");
    const int size = static_cast<int>(rd.integer("size", mode == "chi" ? 8 : 12, 3, kChainSizeCap));
    const int trials = static_cast<int>(rd.integer("trials", mode == "chi" ? 20 : 200, 1, 100000));
    const auto seed = read_seed(rd, ctx);
    std::vector<std::pair<int, int>> pairs;
    if (mode == "chi") {
      pairs.emplace_back(static_cast<int>(rd.integer("n", 2, 1, kChiSizeCap)),
                         static_cast<int>(rd.integer("ell", 1, 1, 30)));
    } else if (rd.has("pairs")) {
      const json& pj = rd.raw("pairs");
      if (!pj.is_array() || pj.empty()) rd.fail("pairs", "expected [[n, ell], ...]");
      for (std::size_t i = 0; i < pj.size(); ++i) {
        const auto& e = pj[i];
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            e[0].get<int>() < 1 || e[0].get<int>() > kChiSizeCap || e[1].get<int>() < 1 || e[1].get<int>() > 30) {
          rd.fail("pairs/" + std::to_string(i), "expected [n, ell] with 1 <= n <= 6, 1 <= ell <= 30");
        }
        pairs.emplace_back(e[0].get<int>(), e[1].get<int>());
      }
    } else {
      pairs = {{1, 1}, {2, 1}, {3, 1}, {1, 2}};
    }
    for (auto [n, ell] : pairs) {
      if (n > size) rd.fail(mode == "chi" ? "n" : "pairs", "n exceeds chain size");
    }
    rd.finish();
    if (ctx.dry) return;

    SplitMix64 rng(seed);
    json instances = json::array();
    std::size_t non_vacuous = 0, passed = 0, vacuous = 0, agree = 0;
    for (int t = 0; t < trials; ++t) {
      const FiniteChain chain = chain_kind == "random" ? random_symmetric_chain(size, rng) : lazy_cycle(size);
      for (auto [n, ell] : pairs) {
        if (mode == "chi") {
          const Chi a = chi_exact(chain, n, ell);
          const Chi b = chi_bisection_oracle(chain, n, ell);
          const bool same = a.infinite == b.infinite && a.k == b.k;
          agree += same ? 1 : 0;
          instances.push_back({{"trial", t}, {"n", n}, {"ell", ell}, {"chi", a.to_json()}, {"oracle", b.to_json()},
                               {"agree", same}});
        } else {
          auto rep = chain_bound_verify(chain, n, ell);
          json j = rep.to_json();
          j["trial"] = t;
          instances.push_back(j);
          if (rep.vacuous) {
            ++vacuous;
          } else {
            ++non_vacuous;
            passed += rep.pass ? 1 : 0;
          }
        }
      }
    }
    json out = {{"mode", mode}, {"chain", chain_kind}, {"size", size}, {"trials", trials}, {"instances", instances}};
    if (mode == "chi") {
      out["summary"] = {{"instances", instances.size()}, {"agree", agree}};
    } else {
      out["summary"] = {{"non_vacuous", non_vacuous}, {"passed", passed}, {"violations", non_vacuous - passed},
                        {"vacuous", vacuous}};
      if (vacuous > 0) ctx.flag("vacuous");
      if (passed < non_vacuous) ctx.flag("violation");
    }
    ctx.write_json("prooflab.json", out, true);
    return;
  }
  if (mode != "wall") rd.fail("mode", "expected chi, chain-bound or wall");
  auto spec = read_ball_spec(rd, ctx, 1);
  const Group* group = spec.group.get();
  const int radius = spec.radius;
  auto kernel = read_kernel(rd, *group);
  const auto triples = static_cast<std::size_t>(rd.integer("triples", 10000, 0, 100000000));
  const auto seed = read_seed(rd, ctx);
  const auto ks = rd.int_list("k", std::vector<int>{0, 1, 2, 4}, 0, 1 << 20);
  const auto ells = rd.int_list("ell", std::vector<int>{4, 6}, 1, 30);
  const int k_cap = static_cast<int>(rd.integer("k_cap", 1000, 1, 1 << 20));
  const int window = static_cast<int>(rd.integer("window", 2, 0, radius));
  (void)rd.raw("witness");
  rd.finish();
  if (ctx.dry) return;

  auto ball = load_ball(spec, true);
  WallMetricContext wctx(*group, read_witness(rd, *group, &ball));
  json out = {{"mode", "wall"}, {"group", group->name()}, {"kernel", kernel.label}, {"witness_size", wctx.size()}};
  out["pseudometric"] = pseudometric_check(wctx, ball, triples, seed).to_json();
  out["normalization"] = wall_normalization_check(wctx, ball, window).to_json();
  json fm = json::array();
  for (int k : ks) fm.push_back(first_moment_identity_check(wctx, ball, kernel, k, ctx.workers).to_json());
  out["first_moment"] = fm;
  json mk = json::array();
  for (int ell : ells) {
    int k = 0;
    try {
      k = chi_for_witness(wctx, ball, kernel, ell, k_cap, ctx.workers);
    } catch (const Error& e) {
      // the mixing time outran the ball or k_cap: record it, keep the rest
      if (e.code() != ErrorCode::kLeakage && e.code() != ErrorCode::kNoConvergence) throw;
      mk.push_back({{"ell", ell}, {"skipped", e.what()}});
      ctx.flag("skipped");
      continue;
    }
    auto rep = markov_step_check(wctx, ball, kernel, ell, k, ctx.workers);
    if (rep.threshold >= 1) ctx.flag("vacuous");
    if (!rep.pass) ctx.flag("violation");
    mk.push_back(rep.to_json());
  }
  out["markov"] = mk;
  ctx.write_json("prooflab.json", out, true);
}

void exp_regularity(Reader& rd, Ctx& ctx) {
  std::optional<MonotoneFunction> f;
  if (rd.has("function")) f = read_model(rd, "function", ctx);
  struct Dbl {
    int lo, hi;
    double thr;
  };
  struct Slow {
    double lo, hi;
    int grid;
  };
  struct Tilde {
    TildeVariant variant;
    int lo, hi;
    Slow slow;
  };
  struct Power {
    double c, c1, c2, n0;
    int log2_max;
  };
  struct Product {
    std::string base;
    int m;
    std::vector<double> grid;
  };
  std::optional<Dbl> dbl;
  std::optional<Slow> slow;
  std::optional<Tilde> tilde;
  std::optional<Power> power;
  std::optional<Product> product;
  auto need_f = [&](const std::string& key) {
    if (!f) rd.fail(key, "needs a \"function\"");
  };
  // tables only answer on their span, so default ranges shrink to fit it
  int n_hi_def = 200;
  double log2_lo_def = 4, log2_hi_def = 200;
  if (f && !f->table().empty()) {
    const double span = std::log2(f->table().back().first);
    n_hi_def = std::max(0, static_cast<int>(std::floor(span / 2)));
    log2_hi_def = span - 1;
    log2_lo_def = std::min(4.0, log2_hi_def / 2);
  }
  const int n_lo_def = std::min(1, n_hi_def);
  if (rd.has("doubling")) {
    need_f("doubling");
    Reader c = rd.child("doubling");
    dbl = Dbl{static_cast<int>(c.integer("n_lo", n_lo_def, 0, 500)),
              static_cast<int>(c.integer("n_hi", n_hi_def, 0, 500)), c.number("threshold", kDoublingThreshold)};
    c.finish();
  }
  auto read_slow = [&](Reader& c) {
    return Slow{c.number("log2_lo", log2_lo_def), c.number("log2_hi", log2_hi_def),
                static_cast<int>(c.integer("grid", 64, 2, 4096))};
  };
  if (rd.has("slow")) {
    need_f("slow");
    Reader c = rd.child("slow");
    slow = read_slow(c);
    c.finish();
  }
  if (rd.has("tilde")) {
    need_f("tilde");
    Reader c = rd.child("tilde");
    const std::string v = c.str("variant", "as_displayed");
    if (v != "as_displayed" && v != "geometric") c.fail("variant", "expected as_displayed or geometric");
    tilde = Tilde{v == "geometric" ? TildeVariant::kGeometric : TildeVariant::kAsDisplayed,
                  static_cast<int>(c.integer("n_lo", n_lo_def, 0, 500)),
                  static_cast<int>(c.integer("n_hi", n_hi_def, 0, 500)), read_slow(c)};
    c.finish();
  }
  if (rd.has("power_compression")) {
    need_f("power_compression");
    Reader c = rd.child("power_compression");
    power = Power{c.number("c", 0.25), c.number("c1", 1), c.number("c2", 1), c.number("n0", 2),
                  static_cast<int>(c.integer("log2_max", 512, 1, 1000))};
    c.finish();
  }
  if (rd.has("product")) {
    Reader c = rd.child("product");
    product = Product{c.str("base_group", "z:1"), static_cast<int>(c.integer("m", 2, 2, 4)),
                      c.num_list("grid", std::vector<double>{16, 64, 256, 1024, 4096})};
    c.finish();
  }
  if (!dbl && !slow && !tilde && !power && !product) rd.fail("doubling", "no regularity check requested");
  rd.finish();
  if (ctx.dry) return;

  json out = json::object();
  if (f) out["function"] = f->label();
  if (dbl) out["doubling"] = doubling_diagnostic(*f, dbl->lo, dbl->hi, dbl->thr).to_json();
  if (slow) out["slow"] = slowly_varying_diagnostic(*f, slow->lo, slow->hi, slow->grid).to_json();
  if (tilde) {
    try {
      auto res = tilde_interpolate(*f, tilde->variant, tilde->lo, tilde->hi);
      out["tilde"] = {{"variant", to_string(tilde->variant)},
                      {"doubling", res.doubling.to_json()},
                      {"constants", {res.c1, res.c2, res.c3, res.c4}},
                      {"slow", slowly_varying_diagnostic(res.f_tilde, tilde->slow.lo, tilde->slow.hi, tilde->slow.grid)
                                   .to_json()}};
    } catch (const Error& e) {
      out["tilde"] = {{"variant", to_string(tilde->variant)}, {"error", e.what()}};
      ctx.flag("not_doubling");
    }
  }
  if (power) {
    try {
      out["power_compression"] = power_compression_doubling(*f, power->c, power->c1, power->c2, power->n0,
                                                            power->log2_max)
                                     .to_json();
    } catch (const Error& e) {
      out["power_compression"] = {{"error", e.what()}};
      ctx.flag("hypothesis_fail");
    }
  }
  if (product) {
    auto base = make_group(product->base);
    if (base->family() != GroupFamily::kZd) throw Error(ErrorCode::kInvalidArgument, "product check needs a Z^d base");
    const int d = base->generator_count() / 2;
    auto prod = make_group("zd:" + std::to_string(d * product->m));
    auto table = [](const Group& g, const std::vector<double>& grid) {
      auto up = profile_upper(g, CayleyBall::enumerate(g, 0), Kernel::simple(g), grid, Strategy::kStructured, {},
                              false);
      std::vector<std::pair<double, double>> pts;
      for (const auto& p : up.phi.points) pts.emplace_back(p.n, p.value);
      return pts;
    };
    std::vector<double> base_grid;
    for (double n : product->grid) base_grid.push_back(std::ceil(std::pow(n, 1.0 / product->m)));
    std::sort(base_grid.begin(), base_grid.end());
    base_grid.erase(std::unique(base_grid.begin(), base_grid.end()), base_grid.end());
    auto rep = product_profile_check(table(*base, base_grid), table(*prod, product->grid), product->m);
    out["product"] = rep.to_json();
    out["product"]["base_group"] = base->name();
    out["product"]["product_group"] = prod->name();
  }
  ctx.write_json("regularity.json", out, true);
}

void exp_occupation(Reader& rd, Ctx& ctx) {
  std::optional<BallSpec> spec;
  const Group* group = nullptr;
  std::optional<KernelCycle> kernel;
  int horizon = 0;
  std::vector<int> rs, ps;
  if (rd.has("group") || rd.has("ball")) {
    spec = read_ball_spec(rd, ctx);
    group = spec->group.get();
    kernel = read_kernel(rd, *group);
    horizon = static_cast<int>(rd.integer("horizon", 1 << 14, 0, 1 << 24));
    rs = rd.int_list("r", std::nullopt, 0, spec->radius);
    ps = rd.int_list("p", std::vector<int>{1}, 1, 8);
  }
  struct Cx {
    std::vector<double> nu;
    int steps;
    std::uint64_t samples, seed;
  };
  std::optional<Cx> cx;
  if (rd.has("counterexample")) {
    Reader c = rd.child("counterexample");
    cx = Cx{c.num_list("nu", std::nullopt), static_cast<int>(c.integer("steps", 20, 1, 100000)),
            static_cast<std::uint64_t>(c.integer("samples", 100000, 1, std::int64_t{1} << 36)),
            read_seed(c, ctx)};
    for (double v : cx->nu) {
      if (v < 0) c.fail("nu", "probabilities must be >= 0");
    }
    c.finish();
  }
  if (!group && !cx) rd.fail("group", "required unless only a counterexample is requested");
  rd.finish();
  if (ctx.dry) return;

  if (group) {
    auto ball = load_ball(*spec, false);
    auto res = occupation_moments(*group, ball, *kernel, rs, ps, horizon, ctx.workers);
    Csv csv({"r", "p", "horizon", "partial", "partial_err", "tail", "tail_status", "total"});
    json fits = json::array();
    for (const auto& r : res) {
      csv.row(r.r, r.p, r.horizon, r.partial, r.partial_err, r.tail, r.tail_status, r.total);
      if (r.tail_status == "UNCONTROLLED") ctx.flag("uncontrolled_tail");
    }
    std::set<int> pset(ps.begin(), ps.end());
    for (int p : pset) {
      try {
        fits.push_back(occupation_exponent_fit(res, p).to_json());
      } catch (const Error& e) {
        fits.push_back({{"p", p}, {"error", e.what()}});
      }
    }
    ctx.write("occupation.csv", csv.str(), true);
    ctx.write_json("occupation.json", {{"group", group->name()}, {"kernel", kernel->label}, {"fits", fits}});
  }
  if (cx) {
    auto rep = counterexample_walk(cx->nu, cx->steps, cx->samples, cx->seed, ctx.workers);
    ctx.write_json("counterexample.json", rep.to_json(), !group);
  }
}

using ExpFn = void (*)(Reader&, Ctx&);

ExpFn experiment_fn(Reader& rd, const std::string& name) {
  static const std::map<std::string, ExpFn> table = {
      {"ball", exp_ball},         {"walk", exp_walk},           {"profile", exp_profile},
      {"bound", exp_bound},       {"check-domination", exp_domination}, {"prooflab", exp_prooflab},
      {"regularity", exp_regularity}, {"occupation", exp_occupation}};
  auto it = table.find(name);
  if (it == table.end()) rd.fail("experiment", "unknown experiment " + name);
  return it->second;
}

void dispatch(const json& config, Ctx& ctx) {
  Reader rd(config, "");
  const std::string name = rd.str("experiment");
  rd.str("description", "");
  experiment_fn(rd, name)(rd, ctx);
}

}  // namespace

MonotoneFunction model_from_json(const json& spec, const std::string& pointer,
                                 std::map<std::string, std::string>* inputs) {
  auto bad = [&](const std::string& why) -> MonotoneFunction {
    throw Error(ErrorCode::kConfigInvalid, pointer + ": " + why);
  };
  if (spec.is_string()) {
    const auto s = spec.get<std::string>();
    if (s == "z:phi") return z_phi_exact();
    if (s == "z:lambda") return z_lambda_exact();
    if (s == "lamplighter:phi-upper") return lamplighter_phi_upper();
    if (s == "lamplighter:lambda-lower") return lamplighter_lambda_lower();
    return bad("unknown model " + s);
  }
  if (!spec.is_object() || spec.size() != 1) return bad("expected a model keyword or a one-key object");
  const auto& [kind, body] = *spec.items().begin();
  if (kind == "power_log" || kind == "increasing_power_log") {
    Reader rd(body, pointer + "/" + kind);
    const double a = rd.number("a", 1.0), p = rd.number("p", 0.0), q = rd.number("q", 0.0);
    rd.finish();
    if (!(a > 0) || p < 0 || q < 0) rd.fail("a", "need a > 0 and p, q >= 0");
    if (kind == "power_log") return MonotoneFunction::power_log(a, p, q);
    auto fn = [a, p, q](double n) {
      const double x = std::max(n, std::exp(1.0));
      return a * std::pow(x, p) * std::pow(std::log(x), q);
    };
    return MonotoneFunction::custom(fn, Direction::kIncreasing, "increasing:" + std::to_string(a) + "*n^" +
                                                                    std::to_string(p) + "*log(n)^" + std::to_string(q));
  }
  if (kind == "table") {
    Reader rd(body, pointer + "/table");
    const std::string path = rd.str("path");
    const std::string quantity = rd.str("quantity", "lambda");
    const std::string side = rd.str("side", "upper");
    const std::string interp = rd.str("interp", "loglog");
    rd.finish();
    if (quantity != "phi" && quantity != "lambda") rd.fail("quantity", "expected phi or lambda");
    if (side != "upper" && side != "lower") rd.fail("side", "expected upper or lower");
    if (interp != "step" && interp != "loglog") rd.fail("interp", "expected step or loglog");
    std::string text;
    try {
      text = read_file(path);
    } catch (const Error&) {
      rd.fail("path", "cannot read " + path);
    }
    if (inputs) (*inputs)[path] = hex64(fnv1a(text));
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::exception&) {
      rd.fail("path", "not a JSON profile file");
    }
    const json& tj = doc.contains(quantity) ? doc.at(quantity) : doc;
    auto table = ProfileTable::from_json(tj);
    table.close_envelope();
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : table.bounds(side == "upper" ? Kind::kUpper : Kind::kLower)) {
      if (!pts.empty() && p.n <= pts.back().first) continue;
      const double v = pts.empty() ? p.value : std::min(p.value, pts.back().second);
      pts.emplace_back(p.n, v);
    }
    if (pts.empty()) rd.fail("path", "table has no " + side + " points");
    return MonotoneFunction::tabulated(pts, Direction::kDecreasing, interp == "step" ? Interp::kStep : Interp::kLogLog);
  }
  return bad("unknown model kind " + kind);
}

void validate_config(const json& config) {
  Ctx ctx;
  ctx.dry = true;
  dispatch(config, ctx);
}

RunResult run_experiment(const json& config, const fs::path& out_dir, int workers, const std::string& primary_name) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);
  Ctx ctx;
  ctx.out_dir = out_dir;
  ctx.workers = std::max(1, workers);
  ctx.primary_name = primary_name;
  dispatch(config, ctx);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  RunResult res;
  res.flags = ctx.flags;
  res.outputs = ctx.outputs;
  res.exit_code = ctx.flags.empty() ? 0 : 2;
  json outputs = json::object();
  for (const auto& p : ctx.outputs) outputs[p.filename().string()] = hex64(fnv1a_file(p));
  res.manifest = {{"command", config.at("experiment")},
                  {"config", config},
                  {"config_hash", hex64(fnv1a(config.dump()))},
                  {"seeds", ctx.seeds},
                  {"version", kVersion},
                  {"workers", ctx.workers},
                  {"inputs", ctx.inputs},
                  {"outputs", outputs},
                  {"flags", ctx.flags},
                  {"wall_clock_seconds", elapsed}};
  std::ofstream(out_dir / "manifest.json") << res.manifest.dump(2) << "\n";
  return res;
}

CayleyBall obtain_ball(const Group& group, int radius, bool need_index, std::size_t memory_cap_bytes) {
  const char* dir = std::getenv("WALKLAB_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') {
    return CayleyBall::enumerate(group, radius, {.memory_cap_bytes = memory_cap_bytes, .keep_index = need_index});
  }
  const fs::path path = fs::path(dir) / ("ball-" + hex64(fnv1a(group.name() + "#" + std::to_string(radius))) + ".wlb");
  if (fs::exists(path)) {
    auto ball = CayleyBall::load(path);
    if (ball.group_name() == group.name() && ball.radius() == radius) {
      if (need_index) ball.attach_index(group);
      return ball;
    }
  }
  auto ball = CayleyBall::enumerate(group, radius, {.memory_cap_bytes = memory_cap_bytes, .keep_index = need_index});
  fs::create_directories(dir);
  // write then rename so concurrent readers never see a partial file
  const fs::path tmp = path.string() + ".tmp" + std::to_string(fnv1a(std::to_string(reinterpret_cast<std::uintptr_t>(&ball))));
  ball.save(tmp);
  fs::rename(tmp, path);
  return ball;
}

namespace {

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(read_file(path));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char c = line[i];
      if (quoted) {
        if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else if (c == '"') {
          quoted = false;
        } else {
          cur += c;
        }
      } else if (c == '"') {
        quoted = true;
      } else if (c == ',') {
        cells.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    cells.push_back(cur);
    rows.push_back(cells);
  }
  return rows;
}

struct SeriesPoint {
  std::string x, y, kind;
};

}  // namespace

ReportResult build_report(const fs::path& results_dir) {
  if (!fs::is_directory(results_dir)) throw Error(ErrorCode::kMissingInput, results_dir.string() + " is not a directory");
  // (source, series) -> points, in file order
  std::map<std::pair<std::string, std::string>, std::vector<SeriesPoint>> series;
  auto column = [](const std::vector<std::string>& header, const std::string& name) {
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorCode::kMissingInput, "column " + name + " missing");
    return static_cast<std::size_t>(it - header.begin());
  };
  // every directory under results_dir except earlier reports; sources are
  // relative paths, so runs kept side by side stay apart
  std::vector<fs::path> dirs{results_dir};
  for (auto it = fs::recursive_directory_iterator(results_dir); it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_directory()) continue;
    if (it->path().filename() == "report") {
      it.disable_recursion_pending();
      continue;
    }
    dirs.push_back(it->path());
  }
  std::sort(dirs.begin(), dirs.end());
  for (const auto& dir : dirs) {
    auto source = [&](const std::string& file) { return (dir / file).lexically_relative(results_dir).generic_string(); };
    auto csv_series = [&](const std::string& file, const std::string& prefix, const std::string& group_col,
                          const std::string& x_col, const std::string& y_col, const std::string& kind_col,
                          const std::string& fixed_kind) {
      const fs::path p = dir / file;
      if (!fs::exists(p)) return;
      auto rows = read_csv(p);
      if (rows.empty()) return;
      const auto& h = rows.front();
      const auto gi = group_col.empty() ? 0 : column(h, group_col);
      const auto xi = column(h, x_col), yi = column(h, y_col);
      const auto ki = kind_col.empty() ? 0 : column(h, kind_col);
      for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string name = group_col.empty() ? prefix : prefix + "_" + group_col + r[gi];
        series[{source(file), name}].push_back({r[xi], r[yi], kind_col.empty() ? fixed_kind : r[ki]});
      }
    };
    csv_series("growth.csv", "growth", "", "r", "growth", "", "EXACT");
    csv_series("walk.csv", "small_ball", "r", "k", "estimate", "kind", "");
    csv_series("bound.csv", "rhs", "r", "k", "rhs", "kind", "");
    csv_series("domination.csv", "measured", "r", "k", "hi", "", "UPPER");
    csv_series("domination.csv", "rhs", "r", "k", "rhs", "", "MODEL");
    csv_series("occupation.csv", "occupation", "p", "r", "total", "", "MODEL");
    csv_series("psi.csv", "psi", "", "t", "psi", "kind", "");
    const fs::path prof = dir / "profile.json";
    if (fs::exists(prof)) {
      const json doc = json::parse(read_file(prof));
      for (const char* q : {"phi", "lambda", "csc_lower", "growth_upper"}) {
        if (!doc.contains(q)) continue;
        for (const auto& p : doc.at(q).at("points")) {
          series[{source("profile.json"), q}].push_back(
              {format_double(p.at("n").get<double>()), format_double(p.at("value").get<double>()), p.at("kind")});
        }
      }
    }
  }
  if (series.empty()) throw Error(ErrorCode::kMissingInput, "no known outputs in " + results_dir.string());

  const fs::path out = results_dir / "report";
  fs::create_directories(out / "series");
  ReportResult res;
  Csv all({"source", "series", "x", "y", "kind"});
  for (const auto& [key, pts] : series) {
    Csv one({"x", "y", "kind"});
    for (const auto& p : pts) {
      all.row(key.first, key.second, p.x, p.y, p.kind);
      one.row(p.x, p.y, p.kind);
      ++res.rows;
    }
    std::string stem = key.first.substr(0, key.first.rfind('.'));
    std::replace(stem.begin(), stem.end(), '/', '_');
    stem += "_" + key.second;
    const fs::path sp = out / "series" / (stem + ".csv");
    std::ofstream(sp, std::ios::binary) << one.str();
    res.series.push_back(sp);
  }
  res.report_csv = out / "report.csv";
  std::ofstream(res.report_csv, std::ios::binary) << all.str();
  return res;
}

}  // namespace walklab
