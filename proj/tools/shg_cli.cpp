// Batch front-end: run solvers on a game and write traces and reports.
//
//   shg_cli run --game p111 --solver dbi --alpha 1e-5 --iters 200000 --out results
//   shg_cli compare --game epidemic_1_20 --grid 101 --out results
//
// Exit status: 0 success, 1 configuration error, 2 solver error.

#include "shg/analysis.hpp"
#include "shg/brd.hpp"
#include "shg/dbi.hpp"
#include "shg/fields.hpp"
#include "shg/game_file.hpp"
#include "shg/games.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace shg;

namespace {

struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Experiment {
  std::string game = "";
  json game_inline;
  std::vector<std::string> solvers{"dbi"};
  std::uint64_t seed = 0;
  SolverConfig solver;
  BrdConfig brd;
  bool local_regret = true;
  bool global_regret = true;
  BrdConfig eval;
  bool eval_grid_set = false;
  long local_iters = 10000;
  bool stability = true;
  double stability_tol = 1e-6;
  double stationarity_tol = 1e-3;
  int checkpoints = 10;
  fs::path out = "results";
  fs::path base = ".";
};

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vec(const Vector& v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

template <class T>
void take(const json& j, const char* key, T& dst) {
  if (j.contains(key)) dst = j.at(key).get<T>();
}

void apply_config_file(Experiment& e, const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config is not valid JSON: ") + ex.what());
  }
  e.base = path.parent_path();
  try {
    if (j.contains("game")) {
      if (j.at("game").is_object())
        e.game_inline = j.at("game");
      else
        e.game = j.at("game").get<std::string>();
    }
    if (j.contains("game_file")) e.game = (e.base / j.at("game_file").get<std::string>()).string();
    take(j, "solvers", e.solvers);
    take(j, "seed", e.seed);
    take(j, "learning_rate", e.solver.learning_rate);
    take(j, "max_iters", e.solver.max_iters);
    take(j, "grad_tol", e.solver.grad_tol);
    take(j, "record_every", e.solver.record_every);
    if (j.contains("init")) {
      auto v = j.at("init").get<std::vector<double>>();
      e.solver.init = Eigen::Map<Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
    }
    if (j.contains("init_box")) {
      auto b = j.at("init_box").get<std::vector<double>>();
      if (b.size() != 2) throw ConfigError("init_box is [lo, hi]");
      e.solver.unbounded_init = {b[0], b[1]};
    }
    if (j.contains("brd")) {
      const json& b = j.at("brd");
      take(b, "grid_points", e.brd.grid.points);
      take(b, "rounds", e.brd.rounds);
    }
    if (j.contains("regret")) {
      const json& r = j.at("regret");
      take(r, "local", e.local_regret);
      take(r, "global", e.global_regret);
      if (r.contains("grid_points")) {
        e.eval.grid.points = r.at("grid_points").get<int>();
        e.eval_grid_set = true;
      }
      take(r, "rounds", e.eval.rounds);
      take(r, "local_iters", e.local_iters);
    }
    if (j.contains("stability")) {
      const json& s = j.at("stability");
      take(s, "enabled", e.stability);
      take(s, "tol", e.stability_tol);
      take(s, "stationarity_tol", e.stationarity_tol);
    }
    take(j, "checkpoints", e.checkpoints);
    if (j.contains("out")) e.out = e.base / j.at("out").get<std::string>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("bad config: ") + ex.what());
  }
}

Game load_game(const Experiment& e) {
  if (!e.game_inline.is_null()) return parse_game_definition(e.game_inline.dump(), e.base, e.seed);
  if (e.game.empty()) throw ConfigError("no game given (--game or config 'game')");
  fs::path p(e.game);
  if (p.extension() == ".json" || fs::exists(p)) return load_game_file(p, e.seed);
  return make_builtin(e.game, e.seed);
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string trace_csv(const GameTree& tree, const Trace& t) {
  std::ostringstream os;
  os << "iter,field_norm,total_grad_norm";
  for (PlayerId i = 0; i < tree.num_players(); ++i) os << ",grad_norm_" << i;
  for (int k = 0; k < tree.total_dim(); ++k) os << ",x" << k;
  os << "\n";
  for (const TraceEntry& e : t.entries) {
    os << e.iter << "," << fmt(e.field_norm) << "," << fmt(e.total_grad_norm);
    for (double v : e.player_norms) os << "," << fmt(v);
    for (double v : e.profile) os << "," << fmt(v);
    os << "\n";
  }
  return os.str();
}

struct BrdRound {
  int round;
  double eps;
  Vector profile;
  double seconds;
};

std::string brd_csv(const GameTree& tree, const std::vector<BrdRound>& rounds) {
  std::ostringstream os;
  os << "round,epsilon";
  for (int k = 0; k < tree.total_dim(); ++k) os << ",x" << k;
  os << "\n";
  for (const BrdRound& r : rounds) {
    os << r.round << "," << fmt(r.eps);
    for (double v : r.profile) os << "," << fmt(v);
    os << "\n";
  }
  return os.str();
}

json regret_json(const RegretReport& r) {
  json per = json::array();
  for (double v : r.per_player) per.push_back(num(v));
  json j{{"kind", r.kind}, {"epsilon", num(r.epsilon)}, {"per_player", per}};
  if (r.kind == "global") {
    j["grid_points"] = r.grid_points;
    j["rounds"] = r.rounds;
  } else {
    j["errors"] = r.errors;
  }
  return j;
}

json stability_json(const StabilityReport& r) {
  json eig = json::array();
  for (const auto& l : r.eigenvalues) eig.push_back({num(l.real()), num(l.imag())});
  json j{{"eigenvalues", eig},
         {"classification", to_string(r.classification)},
         {"field_norm", num(r.field_norm)},
         {"lr_bound", r.lr_bound ? num(*r.lr_bound) : json(nullptr)},
         {"alpha", r.alpha ? num(*r.alpha) : json(nullptr)},
         {"contraction", r.contraction ? num(*r.contraction) : json(nullptr)}};
  if (r.lspe) {
    json flags = json::array();
    for (Definiteness d : r.lspe->flags) flags.push_back(to_string(d));
    j["is_lspe"] = r.lspe->is_lspe;
    j["definiteness"] = flags;
    j["hessian_eigenvalues"] = r.lspe->eigenvalues;
  }
  return j;
}

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

BrdConfig evaluator(const Experiment& e) {
  BrdConfig c = e.eval;
  if (!e.eval_grid_set) c.grid.points = 2 * (e.brd.grid.points - 1) + 1;
  c.seed = e.seed + 0x5eed;
  return c;
}

// Runs one gradient solver ("dbi" or a baseline field).
Trace run_gradient(const Game& game, const std::string& solver, const SolverConfig& config) {
  if (solver == "dbi") return dbi_solve(game, config);
  return iterate_field(game, FieldSpec{parse_field_kind(solver), 0.1}, config);
}

int cmd_run(Experiment& e) {
  Game game = load_game(e);
  const GameTree& tree = game.shape();
  e.solver.seed = e.seed;
  e.solver.validate();
  e.brd.seed = e.seed;
  if (e.solvers.empty()) throw ConfigError("at least one solver is required");
  for (const std::string& s : e.solvers)
    if (s != "dbi" && s != "brd") parse_field_kind(s);

  json summary{{"game", game.name}, {"seed", e.seed}, {"solvers", json::object()}};
  json stability = json::object(), regret = json::object(), timing = json::object();
  bool solver_failed = false;

  for (const std::string& s : e.solvers) {
    json entry;
    Vector final;
    auto t0 = Clock::now();
    if (s == "brd") {
      std::vector<BrdRound> rounds;
      SolveResult r = brd_solve(game, e.brd, e.solver.init, [&](int round, const ActionProfile& x, double eps) {
        rounds.push_back({round, eps, x.flat(), 0.0});
      });
      timing[s] = since(t0);
      final = r.profile.flat();
      entry = {{"status", "finished"}, {"epsilon", num(r.eps)}, {"rounds", r.round_eps.size()},
               {"best_round", r.best_round}, {"grid_points", e.brd.grid.points}, {"final_profile", vec(final)}};
      write_file(e.out / s / "trace.csv", brd_csv(tree, rounds));
    } else {
      Trace t = run_gradient(game, s, e.solver);
      timing[s] = since(t0);
      final = t.final;
      entry = {{"status", to_string(t.reason)}, {"converged", t.converged}, {"iterations", t.iterations}};
      if (!t.entries.empty()) {
        const TraceEntry& last = t.entries.back();
        // Blow-up counts as divergence too: a finite run whose watched norm grew tenfold.
        const double first = t.entries.front().total_grad_norm;
        double growth = first > 0 ? last.total_grad_norm / first
                                  : (last.total_grad_norm > 0 ? std::numeric_limits<double>::infinity() : 1.0);
        entry["diverged"] = t.reason == StopReason::Diverged || !(growth < 10.0);
        entry["norm_growth"] = num(growth);
        entry["final_field_norm"] = num(last.field_norm);
        entry["final_total_grad_norm"] = num(last.total_grad_norm);
      } else {
        entry["diverged"] = t.reason == StopReason::Diverged;
      }
      entry["final_profile"] = vec(final);
      if (t.reason == StopReason::Error) {
        entry["error"] = t.error;
        solver_failed = true;
      }
      write_file(e.out / s / "trace.csv", trace_csv(tree, t));
    }
    summary["solvers"][s] = entry;
    if (entry.contains("error")) continue;

    if (!final.allFinite()) {
      stability[s] = {{"error", "non-finite final profile"}};
      regret[s] = {{"error", "non-finite final profile"}};
      continue;
    }
    ActionProfile x(tree, final);
    if (e.stability) {
      try {
        stability[s] = stability_json(
            analyze_point(game, x, e.stability_tol, e.stationarity_tol, e.solver.learning_rate));
      } catch (const Error& ex) {
        stability[s] = {{"error", ex.what()}};
      }
    }
    json rj = json::object();
    if (e.local_regret) {
      SolverConfig lc = e.solver;
      lc.max_iters = e.local_iters;
      lc.record_every = lc.max_iters;
      rj["local"] = regret_json(local_regret(x, game, lc));
    }
    if (e.global_regret) rj["global"] = regret_json(compute_eps(x, game, evaluator(e)));
    regret[s] = rj;
  }

  json ratios = json::object();
  if (timing.contains("dbi") && timing["dbi"].get<double>() > 0)
    for (auto& [k, v] : timing.items()) ratios[k] = v.get<double>() / timing["dbi"].get<double>();
  write_file(e.out / "summary.json", summary.dump(2) + "\n");
  write_file(e.out / "stability.json", stability.dump(2) + "\n");
  write_file(e.out / "regret.json", regret.dump(2) + "\n");
  write_file(e.out / "timing.json", json{{"wall_seconds", timing}, {"ratio_to_dbi", ratios}}.dump(2) + "\n");
  if (solver_failed) {
    std::cerr << "solver error; see summary.json\n";
    return 2;
  }
  return 0;
}

int cmd_compare(Experiment& e) {
  Game game = load_game(e);
  const GameTree& tree = game.shape();
  e.solver.seed = e.seed;
  e.solver.validate();
  e.brd.seed = e.seed;
  if (e.checkpoints < 1) throw ConfigError("checkpoints must be positive");
  BrdConfig eval = evaluator(e);

  // DBI, timestamping every recorded iterate.
  std::vector<double> stamps;
  SolverConfig dc = e.solver;
  auto t0 = Clock::now();
  dc.on_record = [&](long) { stamps.push_back(since(t0)); };
  Trace dbi = dbi_solve(game, dc);
  double dbi_time = since(t0);

  std::vector<BrdRound> rounds;
  auto t1 = Clock::now();
  SolveResult brd = brd_solve(game, e.brd, e.solver.init, [&](int round, const ActionProfile& x, double eps) {
    rounds.push_back({round, eps, x.flat(), since(t1)});
  });
  double brd_time = since(t1);

  std::ostringstream timed, steps;
  timed << "solver,wall_seconds,epsilon\n";
  steps << "solver,step,epsilon\n";
  json summary{{"game", game.name}, {"seed", e.seed}, {"eval_grid_points", eval.grid.points},
               {"eval_rounds", eval.rounds}};

  // Evenly spaced checkpoints over the recorded DBI iterates, always ending at the last.
  const int n = static_cast<int>(dbi.entries.size());
  const int k = std::min(e.checkpoints, n);
  double dbi_eps = 0.0;
  for (int c = 1; c <= k; ++c) {
    int idx = static_cast<int>((static_cast<long>(c) * n) / k) - 1;
    const TraceEntry& entry = dbi.entries[idx];
    if (!entry.profile.allFinite()) continue;
    dbi_eps = compute_eps(ActionProfile(tree, entry.profile), game, eval).epsilon;
    timed << "dbi," << fmt(stamps[idx]) << "," << fmt(dbi_eps) << "\n";
    steps << "dbi," << entry.iter << "," << fmt(dbi_eps) << "\n";
  }
  double brd_eps = 0.0;
  for (const BrdRound& r : rounds) {
    brd_eps = compute_eps(ActionProfile(tree, r.profile), game, eval).epsilon;
    timed << "brd," << fmt(r.seconds) << "," << fmt(brd_eps) << "\n";
    steps << "brd," << r.round << "," << fmt(brd_eps) << "\n";
  }
  // BRD's answer is its best round, which need not be the last one evaluated.
  brd_eps = compute_eps(brd.profile, game, eval).epsilon;

  summary["dbi"] = {{"status", to_string(dbi.reason)}, {"iterations", dbi.iterations},
                    {"final_epsilon", num(dbi_eps)}, {"final_profile", vec(dbi.final)}};
  summary["brd"] = {{"rounds", brd.round_eps.size()}, {"best_round", brd.best_round},
                    {"final_epsilon", num(brd_eps)}, {"final_profile", vec(brd.profile.flat())}};
  summary["dbi_epsilon_le_brd"] = dbi_eps <= brd_eps;

  write_file(e.out / "regret_vs_time.csv", timed.str());
  write_file(e.out / "regret_checkpoints.csv", steps.str());
  write_file(e.out / "dbi" / "trace.csv", trace_csv(tree, dbi));
  write_file(e.out / "brd" / "trace.csv", brd_csv(tree, rounds));
  write_file(e.out / "summary.json", summary.dump(2) + "\n");
  write_file(e.out / "timing.json",
             json{{"wall_seconds", {{"dbi", dbi_time}, {"brd", brd_time}}},
                  {"ratio_to_dbi", {{"dbi", 1.0}, {"brd", dbi_time > 0 ? brd_time / dbi_time : 0.0}}}}
                     .dump(2) + "\n");
  if (dbi.reason == StopReason::Error) {
    std::cerr << "DBI failed: " << dbi.error << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured hierarchical game solvers"};
  app.require_subcommand(1);

  Experiment e;
  std::string config, game, solvers, out;
  std::optional<double> alpha;
  std::optional<long> iters;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid, rounds, eval_grid;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "Experiment config (JSON)");
    sub->add_option("--game", game, "Built-in game name or game definition file");
    sub->add_option("--alpha", alpha, "Learning rate");
    sub->add_option("--iters", iters, "Maximum iterations");
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--grid", grid, "BRD grid points per action dimension");
    sub->add_option("--rounds", rounds, "BRD best-response rounds");
    sub->add_option("--eval-grid", eval_grid, "Grid points for global regret evaluation");
    sub->add_option("--out", out, "Output directory");
  };
  CLI::App* run = app.add_subcommand("run", "Run solvers and write traces and reports");
  add_common(run);
  run->add_option("--solver", solvers, "Comma-separated: dbi,sim,sym,sym_aln,co,ham,brd");
  CLI::App* compare = app.add_subcommand("compare", "DBI vs BRD global regret over time");
  add_common(compare);
  CLI::App* list = app.add_subcommand("list", "List built-in games");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    int code = app.exit(ex);
    return code == 0 ? 0 : 1;
  }

  if (list->parsed()) {
    for (const auto& n : builtin_names()) std::cout << n << "\n";
    return 0;
  }

  try {
    if (!config.empty()) apply_config_file(e, config);
    if (!game.empty()) {
      e.game = game;
      e.game_inline = nullptr;
    }
    if (!solvers.empty()) {
      e.solvers.clear();
      std::stringstream ss(solvers);
      for (std::string s; std::getline(ss, s, ',');)
        if (!s.empty()) e.solvers.push_back(s);
    }
    if (alpha) e.solver.learning_rate = *alpha;
    if (iters) e.solver.max_iters = *iters;
    if (seed) e.seed = *seed;
    if (grid) e.brd.grid.points = *grid;
    if (rounds) e.brd.rounds = *rounds;
    if (eval_grid) {
      e.eval.grid.points = *eval_grid;
      e.eval_grid_set = true;
    }
    if (!out.empty()) e.out = out;
    return run->parsed() ? cmd_run(e) : cmd_compare(e);
  } catch (const Error& ex) {
    // Anything raised while reading the setup is the caller's fault.
    bool setup = dynamic_cast<const ConfigError*>(&ex) || dynamic_cast<const InvalidParams*>(&ex) ||
                 dynamic_cast<const InvalidWeights*>(&ex) || dynamic_cast<const MalformedTree*>(&ex) ||
                 dynamic_cast<const EmptyLevel*>(&ex) || dynamic_cast<const BadNetworkFile*>(&ex) ||
                 dynamic_cast<const BadPartition*>(&ex) || dynamic_cast<const DependencyViolation*>(&ex);
    std::cerr << (setup ? "config error: " : "solver error: ") << ex.what() << "\n";
    return setup ? 1 : 2;
  } catch (const std::exception& ex) {
    std::cerr << "solver error: " << ex.what() << "\n";
    return 2;
  }
}
