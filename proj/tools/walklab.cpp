// walklab command-line entry point. Every subcommand builds a run config and
// hands it to run_experiment, so CLI runs and config runs share one path.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "walklab/error.hpp"
#include "walklab/harness.hpp"
#include "walklab/rational.hpp"

namespace {

using nlohmann::json;
using walklab::Error;
using walklab::ErrorCode;

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

int to_int(const std::string& s) {
  std::size_t pos = 0;
  const long v = std::stol(s, &pos);
  if (pos != s.size()) throw Error(ErrorCode::kInvalidArgument, "not an integer: " + s);
  return static_cast<int>(v);
}

// "1,2,5", "1..32", "16..4096*2" (geometric), "2^4..2^12".
std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split(s, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(to_int(item));
      continue;
    }
    std::string lo = item.substr(0, dots), hi = item.substr(dots + 2);
    if (lo.rfind("2^", 0) == 0 && hi.rfind("2^", 0) == 0) {
      for (int e = to_int(lo.substr(2)); e <= to_int(hi.substr(2)); ++e) out.push_back(1 << e);
      continue;
    }
    int factor = 0;
    if (auto star = hi.find('*'); star != std::string::npos) {
      factor = to_int(hi.substr(star + 1));
      hi = hi.substr(0, star);
    }
    const int a = to_int(lo), b = to_int(hi);
    if (factor > 1) {
      if (a < 1) throw Error(ErrorCode::kInvalidArgument, "geometric range must start at >= 1");
      for (long v = a; v <= b; v *= factor) out.push_back(static_cast<int>(v));
    } else {
      for (int v = a; v <= b; ++v) out.push_back(v);
    }
  }
  if (out.empty()) throw Error(ErrorCode::kInvalidArgument, "empty list: " + s);
  return out;
}

std::vector<double> parse_num_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(std::stod(item));
  return out;
}

// Inline JSON, a path to a JSON file, or a bare word such as "srw".
json parse_json_arg(const std::string& s) {
  if (!s.empty() && (s.front() == '{' || s.front() == '[' || s.front() == '"')) return json::parse(s);
  std::ifstream in(s);
  if (in) return json::parse(in);
  return s;
}

// Keywords, "power_log:a,p,q", "increasing_power_log:a,p,q", or a profile
// JSON path with an optional ":upper"/":lower" suffix.
json parse_model_arg(const std::string& s, const std::string& quantity) {
  for (const char* kind : {"power_log", "increasing_power_log"}) {
    const std::string prefix = std::string(kind) + ":";
    if (s.rfind(prefix, 0) == 0) {
      const auto v = parse_num_list(s.substr(prefix.size()));
      if (v.size() != 3) throw Error(ErrorCode::kInvalidArgument, prefix + " needs a,p,q");
      return {{kind, {{"a", v[0]}, {"p", v[1]}, {"q", v[2]}}}};
    }
  }
  if (s.find(".json") != std::string::npos) {
    std::string path = s, side = quantity == "phi" ? "upper" : "lower";
    if (auto c = s.rfind(':'); c != std::string::npos && c > s.rfind(".json")) {
      path = s.substr(0, c);
      side = s.substr(c + 1);
    }
    return {{"table", {{"path", path}, {"quantity", quantity}, {"side", side}}}};
  }
  return s;
}

double parse_rational(const std::string& s) {
  if (auto slash = s.find('/'); slash != std::string::npos) {
    return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
  }
  return std::stod(s);
}

int default_ball_radius(const std::vector<int>& rs, int time) {
  return *std::max_element(rs.begin(), rs.end()) + static_cast<int>(std::ceil(8 * std::sqrt(time)));
}

struct Common {
  std::string out = "results";
  int workers = 1;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "output directory, or a file name for the main output");
  app->add_option("--workers", c.workers, "worker threads")->check(CLI::Range(1, 1024));
}

int execute(const json& config, const Common& c) {
  std::filesystem::path out(c.out);
  std::string primary;
  const auto ext = out.extension().string();
  if (ext == ".csv" || ext == ".json" || ext == ".wlb") {
    primary = out.filename().string();
    out = out.has_parent_path() ? out.parent_path() : std::filesystem::path(".");
  }
  auto res = walklab::run_experiment(config, out, c.workers, primary);
  for (const auto& f : res.flags) std::cerr << "flag: " << f << "\n";
  return res.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"walklab: numerical lab for random walks on groups"};
  app.set_version_flag("--version", walklab::kVersion);
  app.require_subcommand(1);
  std::function<int()> action;

  Common common;

  // run
  std::string config_path;
  auto* run = app.add_subcommand("run", "run an experiment from a JSON config");
  run->add_option("config", config_path)->required();
  add_common(run, common);
  run->callback([&] {
    action = [&] {
      std::ifstream in(config_path);
      if (!in) throw Error(ErrorCode::kMissingInput, "cannot read " + config_path);
      json cfg;
      try {
        cfg = json::parse(in);
      } catch (const json::exception& e) {
        throw Error(ErrorCode::kConfigInvalid, std::string("/: ") + e.what());
      }
      return execute(cfg, common);
    };
  });

  // ball
  std::string group;
  int radius = -1;
  std::int64_t memory_cap = std::int64_t{2} << 30;
  auto* ball = app.add_subcommand("ball", "enumerate a Cayley ball");
  ball->add_option("--group", group)->required();
  ball->add_option("--radius", radius)->required();
  ball->add_option("--memory-cap", memory_cap);
  add_common(ball, common);
  ball->callback([&] {
    action = [&] {
      return execute({{"experiment", "ball"}, {"group", group}, {"radius", radius}, {"memory_cap_bytes", memory_cap}},
                     common);
    };
  });

  // shared ball/kernel options
  std::string ball_path, weights, steps, rlist, mode = "exact", seed_s;
  std::uint64_t samples = 100000, seed = 1;
  int ball_radius = -1;
  auto add_ball_source = [&](CLI::App* sub) {
    sub->add_option("--ball", ball_path, "ball file from `walklab ball`");
    sub->add_option("--group", group, "group name (enumerates a ball instead of --ball)");
    sub->add_option("--ball-radius", ball_radius, "ball radius when --group is used");
    sub->add_option("--weights", weights, "kernel: srw, switch-walk-switch, JSON or JSON file");
    sub->add_option("--memory-cap", memory_cap);
  };
  auto source = [&](json& cfg, int default_radius) {
    if (!ball_path.empty()) {
      cfg["ball"] = ball_path;
    } else {
      if (group.empty()) throw Error(ErrorCode::kInvalidArgument, "need --ball or --group");
      cfg["group"] = group;
      cfg["radius"] = ball_radius >= 0 ? ball_radius : default_radius;
    }
    if (!weights.empty()) cfg["kernel"] = parse_json_arg(weights);
    cfg["memory_cap_bytes"] = memory_cap;
  };

  // walk
  auto* walk = app.add_subcommand("walk", "small-ball probabilities");
  add_ball_source(walk);
  walk->add_option("--steps", steps, "step list, e.g. 16..4096*2")->required();
  walk->add_option("--radius", rlist, "radius list")->required();
  walk->add_option("--mode", mode)->check(CLI::IsMember({"exact", "mc"}));
  walk->add_option("--samples", samples);
  walk->add_option("--seed", seed);
  add_common(walk, common);
  walk->callback([&] {
    action = [&] {
      const auto ks = parse_int_list(steps);
      const auto rs = parse_int_list(rlist);
      json cfg = {{"experiment", "walk"}, {"k", ks}, {"r", rs}, {"mode", mode}};
      if (mode == "mc") {
        cfg["samples"] = samples;
        cfg["seed"] = seed;
      }
      source(cfg, default_ball_radius(rs, *std::max_element(ks.begin(), ks.end())));
      return execute(cfg, common);
    };
  });

  // profile
  int exact_max = 0;
  std::string grid, strategy = "structured";
  int iterations = 10000, restarts = 8;
  bool no_lambda = false;
  auto* profile = app.add_subcommand("profile", "isoperimetric and spectral profiles");
  add_ball_source(profile);
  profile->add_option("--exact-max", exact_max, "exhaustive search up to this size");
  profile->add_option("--grid", grid, "upper-bound grid: list or log:a..b:m");
  profile->add_option("--strategy", strategy)->check(CLI::IsMember({"structured", "greedy", "anneal"}));
  profile->add_option("--iterations", iterations);
  profile->add_option("--restarts", restarts);
  profile->add_option("--seed", seed);
  profile->add_flag("--no-lambda", no_lambda);
  add_common(profile, common);
  profile->callback([&] {
    action = [&] {
      json cfg = {{"experiment", "profile"}};
      if (exact_max > 0) cfg["n_max"] = exact_max;
      int need = exact_max;
      if (!grid.empty()) {
        cfg["grid"] = grid.rfind("log:", 0) == 0 ? json(grid) : json(parse_num_list(grid));
        cfg["strategy"] = strategy;
        cfg["seed"] = seed;
        cfg["iterations"] = iterations;
        cfg["restarts"] = restarts;
        need = std::max(need, 8);
      }
      if (no_lambda) cfg["lambda"] = false;
      source(cfg, need);
      return execute(cfg, common);
    };
  });

  // bound
  std::string phi, lambda, c_str, klist, psi_t;
  double beta = NAN;
  auto* bound = app.add_subcommand("bound", "evaluate the small-ball bound from profile models");
  bound->add_option("--phi", phi)->required();
  bound->add_option("--lambda", lambda)->required();
  bound->add_option("--c", c_str, "edge-orbit constant, e.g. 1/4");
  bound->add_option("--group", group, "derive c from this group instead of --c");
  bound->add_option("--k", klist)->required();
  bound->add_option("--r", rlist)->required();
  bound->add_option("--psi-t", psi_t, "times at which to tabulate psi");
  bound->add_option("--beta", beta, "also evaluate the doubling-case bound with this exponent");
  add_common(bound, common);
  bound->callback([&] {
    action = [&] {
      json cfg = {{"experiment", "bound"},
                  {"phi", parse_model_arg(phi, "phi")},
                  {"lambda", parse_model_arg(lambda, "lambda")},
                  {"k", parse_int_list(klist)},
                  {"r", parse_int_list(rlist)}};
      if (!c_str.empty()) {
        cfg["c"] = parse_rational(c_str);
      } else if (!group.empty()) {
        cfg["group"] = group;
      } else {
        throw Error(ErrorCode::kInvalidArgument, "need --c or --group");
      }
      if (!psi_t.empty()) cfg["psi_t"] = parse_num_list(psi_t);
      if (!std::isnan(beta)) cfg["beta"] = beta;
      return execute(cfg, common);
    };
  });

  // check-domination
  std::string model;
  auto* dom = app.add_subcommand("check-domination", "compare measured small-ball probabilities with the bound");
  add_ball_source(dom);
  dom->add_option("--grid", grid, "k=LIST;r=LIST");
  dom->add_option("--k", klist);
  dom->add_option("--r", rlist);
  dom->add_option("--model", model, "z or lamplighter");
  dom->add_option("--phi", phi);
  dom->add_option("--lambda", lambda);
  dom->add_option("--c", c_str);
  add_common(dom, common);
  dom->callback([&] {
    action = [&] {
      for (const auto& part : split(grid, ';')) {
        if (part.rfind("k=", 0) == 0) klist = part.substr(2);
        else if (part.rfind("r=", 0) == 0) rlist = part.substr(2);
        else throw Error(ErrorCode::kInvalidArgument, "bad --grid part " + part);
      }
      if (klist.empty() || rlist.empty()) throw Error(ErrorCode::kInvalidArgument, "need k and r grids");
      const auto ks = parse_int_list(klist);
      const auto rs = parse_int_list(rlist);
      json cfg = {{"experiment", "check-domination"}, {"k", ks}, {"r", rs}};
      if (!model.empty()) {
        cfg["model"] = model;
      } else {
        if (phi.empty() || lambda.empty()) throw Error(ErrorCode::kInvalidArgument, "need --model or --phi/--lambda");
        cfg["phi"] = parse_model_arg(phi, "phi");
        cfg["lambda"] = parse_model_arg(lambda, "lambda");
      }
      if (!c_str.empty()) cfg["c"] = parse_rational(c_str);
      source(cfg, default_ball_radius(rs, *std::max_element(ks.begin(), ks.end())));
      return execute(cfg, common);
    };
  });

  // prooflab
  std::string lab_mode, chain = "random", witness, ells;
  int size = -1, trials = -1, n_set = -1, triples = 10000;
  auto* lab = app.add_subcommand("prooflab", "finite-chain and wall-metric checks");
  lab->add_option("mode", lab_mode)->required()->check(CLI::IsMember({"chi", "chain-bound", "wall"}));
  lab->add_option("--seed", seed);
  lab->add_option("--size", size, "chain size");
  lab->add_option("--trials", trials);
  lab->add_option("--chain", chain)->check(CLI::IsMember({"random", "lazy-cycle"}));
  lab->add_option("--n", n_set, "set size for chi");
  lab->add_option("--ell", ells, "ell (chi) or ell list (wall)");
  add_ball_source(lab);
  lab->add_option("--radius", ball_radius, "ball radius for wall");
  lab->add_option("--witness", witness, "structured witness label or comma-separated words");
  lab->add_option("--triples", triples);
  lab->add_option("--k", klist, "first-moment times");
  add_common(lab, common);
  lab->callback([&] {
    action = [&] {
      json cfg = {{"experiment", "prooflab"}, {"mode", lab_mode}, {"seed", seed}};
      if (lab_mode == "wall") {
        if (witness.empty()) throw Error(ErrorCode::kInvalidArgument, "wall needs --witness");
        cfg["witness"] = witness.find(',') == std::string::npos && witness.find(':') != std::string::npos
                             ? json(witness)
                             : json(split(witness, ','));
        cfg["triples"] = triples;
        if (!klist.empty()) cfg["k"] = parse_int_list(klist);
        if (!ells.empty()) cfg["ell"] = parse_int_list(ells);
        source(cfg, 16);
      } else {
        cfg["chain"] = chain;
        if (size > 0) cfg["size"] = size;
        if (trials > 0) cfg["trials"] = trials;
        if (lab_mode == "chi") {
          if (n_set > 0) cfg["n"] = n_set;
          if (!ells.empty()) cfg["ell"] = to_int(ells);
        }
      }
      return execute(cfg, common);
    };
  });

  // regularity
  std::string input, checks = "doubling,slowvary,tilde", quantity = "lambda", side = "upper", function, variant;
  auto* reg = app.add_subcommand("regularity", "doubling and slow-variation diagnostics");
  reg->add_option("--input", input, "profile JSON");
  reg->add_option("--function", function, "model instead of --input");
  reg->add_option("--quantity", quantity)->check(CLI::IsMember({"phi", "lambda"}));
  reg->add_option("--side", side)->check(CLI::IsMember({"upper", "lower"}));
  reg->add_option("--checks", checks, "doubling,slowvary,tilde,power,product");
  reg->add_option("--variant", variant, "tilde variant: as_displayed or geometric");
  add_common(reg, common);
  reg->callback([&] {
    action = [&] {
      json cfg = {{"experiment", "regularity"}};
      if (!input.empty()) {
        cfg["function"] = {{"table", {{"path", input}, {"quantity", quantity}, {"side", side}}}};
      } else if (!function.empty()) {
        cfg["function"] = parse_model_arg(function, quantity);
      }
      for (const auto& check : split(checks, ',')) {
        if (check == "doubling") cfg["doubling"] = json::object();
        else if (check == "slowvary") cfg["slow"] = json::object();
        else if (check == "tilde") cfg["tilde"] = variant.empty() ? json::object() : json{{"variant", variant}};
        else if (check == "power") cfg["power_compression"] = json::object();
        else if (check == "product") cfg["product"] = json::object();
        else throw Error(ErrorCode::kInvalidArgument, "unknown check " + check);
      }
      return execute(cfg, common);
    };
  });

  // occupation
  std::string plist = "1", nu;
  int horizon = 1 << 14, cx_steps = 20;
  auto* occ = app.add_subcommand("occupation", "occupation moments and the lamplighter counterexample walk");
  add_ball_source(occ);
  occ->add_option("--r", rlist);
  occ->add_option("--p", plist);
  occ->add_option("--horizon", horizon);
  occ->add_option("--counterexample-nu", nu, "jump-size law for the counterexample walk");
  occ->add_option("--steps", cx_steps);
  occ->add_option("--samples", samples);
  occ->add_option("--seed", seed);
  add_common(occ, common);
  occ->callback([&] {
    action = [&] {
      json cfg = {{"experiment", "occupation"}};
      if (!rlist.empty()) {
        const auto rs = parse_int_list(rlist);
        cfg["r"] = rs;
        cfg["p"] = parse_int_list(plist);
        cfg["horizon"] = horizon;
        source(cfg, default_ball_radius(rs, horizon));
      }
      if (!nu.empty()) {
        cfg["counterexample"] = {
            {"nu", parse_num_list(nu)}, {"steps", cx_steps}, {"samples", samples}, {"seed", seed}};
      }
      return execute(cfg, common);
    };
  });

  // report
  std::string results_dir;
  auto* report = app.add_subcommand("report", "tidy CSV and plot series from a results directory");
  report->add_option("dir", results_dir)->required();
  report->callback([&] {
    action = [&] {
      auto res = walklab::build_report(results_dir);
      std::cout << res.report_csv.string() << " (" << res.rows << " rows, " << res.series.size() << " series)\n";
      return 0;
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  try {
    return action ? action() : 1;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
