#include "shg/brd.hpp"

#include <algorithm>
#include <limits>

namespace shg {

Grid::Grid(const GameTree& tree, const GridSpec& spec) : per_dim_(spec.points) {
  if (spec.points < 1) throw ConfigError("grid needs at least one point per dimension");
  points_.resize(tree.num_players());
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    const int d = tree.action_dim(i);
    const Bounds& b = tree.bounds(i);
    std::vector<std::vector<double>> axes(d);
    for (int k = 0; k < d; ++k) {
      Interval box = b.empty() ? spec.unbounded_box : b[k];
      for (int p = 0; p < spec.points; ++p)
        axes[k].push_back(spec.points == 1 ? 0.5 * (box.lo + box.hi)
                                           : box.lo + (box.hi - box.lo) * p / (spec.points - 1));
    }
    // Cartesian product, first dimension varying slowest.
    std::vector<int> idx(d, 0);
    while (true) {
      Vector v(d);
      for (int k = 0; k < d; ++k) v[k] = axes[k][idx[k]];
      points_[i].push_back(v);
      int k = d - 1;
      while (k >= 0 && ++idx[k] == spec.points) idx[k--] = 0;
      if (k < 0) break;
    }
  }
}

BestResponseSolver::BestResponseSolver(const Game& game, BrdConfig config)
    : game_(&game), config_(config), grid_(game.shape(), config.grid), rng_(config.seed) {
  if (config_.rounds < 1) throw ConfigError("best-response rounds must be at least 1");
}

SearchResult BestResponseSolver::search(const ActionProfile& x, PlayerId i) {
  ReEqResult current = re_eq(i, x);
  SearchResult out;
  out.action = x.slice(i);
  out.payoff = current.payoff;
  out.profile = current.profile;
  out.current_payoff = current.payoff;
  out.current_eps = current.eps;
  out.current_profile = current.profile;
  ActionProfile probe = x;
  for (const Vector& candidate : grid_.points(i)) {
    probe.slice(i) = candidate;
    ReEqResult r = re_eq(i, probe);
    if (r.payoff > out.payoff) {
      out.action = candidate;
      out.payoff = r.payoff;
      out.profile = std::move(r.profile);
    }
  }
  return out;
}

ReEqResult BestResponseSolver::re_eq(PlayerId i, const ActionProfile& x) {
  if (game_->shape().is_leaf(i)) return {game_->utility().value(i, x), 0.0, x};
  SolveResult s = shg_solve(i, x);
  double payoff = game_->utility().value(i, s.profile);
  return {payoff, s.eps, std::move(s.profile)};
}

SolveResult BestResponseSolver::shg_solve(PlayerId i, const ActionProfile& x) {
  const auto& children = game_->shape().children_of(i);
  if (children.empty()) throw Error("shg_solve needs a player with children");
  return solve_group(children, x);
}

SolveResult BestResponseSolver::solve_group(const std::vector<PlayerId>& players, const ActionProfile& x,
                                            const RoundCallback& on_round) {
  const GameTree& tree = game_->shape();
  ActionProfile current = x;
  for (PlayerId j : players) {
    const auto& pts = grid_.points(j);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    current.slice(j) = pts[pick(rng_)];
  }

  SolveResult best;
  best.eps = std::numeric_limits<double>::infinity();
  for (int t = 0; t < config_.rounds; ++t) {
    ActionProfile next = current;
    // The round's ε describes x^{t-1} with every child's subgame
    // re-equilibrated at its current action, so that is the profile kept.
    ActionProfile evaluated = current;
    double round_eps = 0.0;
    for (PlayerId j : players) {
      SearchResult s = search(current, j);
      double eps_j = std::max(s.current_eps, s.payoff - s.current_payoff);
      round_eps = std::max(round_eps, eps_j);
      next.slice(j) = s.profile.slice(j);
      for (PlayerId k : tree.descendants(j)) {
        next.slice(k) = s.profile.slice(k);
        evaluated.slice(k) = s.current_profile.slice(k);
      }
    }
    best.round_eps.push_back(round_eps);
    if (round_eps < best.eps) {
      best.eps = round_eps;
      best.profile = evaluated;
      best.best_round = t;
    }
    if (on_round) on_round(t, evaluated, round_eps);
    if (config_.stop_at_zero && round_eps <= 0.0) break;
    current = std::move(next);
  }
  return best;
}

RegretReport BestResponseSolver::compute_eps(const ActionProfile& x) {
  const GameTree& tree = game_->shape();
  RegretReport report;
  report.kind = "global";
  report.grid_points = grid_.points_per_dim();
  report.rounds = config_.rounds;
  report.errors.assign(tree.num_players(), "");
  report.epsilon = 0.0;
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    SearchResult s = search(x, i);
    // Staying put (without re-equilibrating) is always available, so ε_i >= 0.
    double eps = std::max(0.0, s.payoff - game_->utility().value(i, x));
    report.per_player.push_back(eps);
    report.epsilon = std::max(report.epsilon, eps);
  }
  return report;
}

SolveResult brd_solve(const Game& game, const BrdConfig& config, std::optional<Vector> init,
                      const BestResponseSolver::RoundCallback& on_round) {
  BestResponseSolver solver(game, config);
  ActionProfile x(game.shape());
  if (init) {
    x = ActionProfile(game.shape(), *init);
  } else {
    // Everyone starts on a random grid point; the root is re-drawn by the solve.
    std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
    for (PlayerId i = 0; i < game.shape().num_players(); ++i) {
      const auto& pts = solver.grid().points(i);
      std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
      x.slice(i) = pts[pick(rng)];
    }
  }
  return solver.solve_group({game.shape().root()}, x, on_round);
}

RegretReport compute_eps(const ActionProfile& x, const Game& game, const BrdConfig& config) {
  BestResponseSolver solver(game, config);
  return solver.compute_eps(x);
}

RegretReport local_regret(const ActionProfile& x, const Game& game, const SolverConfig& config) {
  const GameTree& tree = game.shape();
  RegretReport report;
  report.kind = "local";
  report.errors.assign(tree.num_players(), "");
  report.epsilon = 0.0;
  const UtilityOracle& u = game.utility();
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    std::vector<bool> active(tree.total_dim(), false);
    std::vector<PlayerId> movers = tree.descendants(i);
    movers.push_back(i);
    for (PlayerId k : movers)
      for (int d = 0; d < tree.action_dim(k); ++d) active[tree.offset(k) + d] = true;
    SolverConfig cfg = config;
    cfg.init = x.flat();
    Trace trace = iterate(game, [&game](const ActionProfile& p) { return dbi_field(game, p); }, cfg, &active);
    double eps = 0.0;
    if (trace.reason == StopReason::Error || trace.reason == StopReason::Diverged) {
      report.errors[i] = trace.reason == StopReason::Error ? trace.error : "diverged";
    }
    if (trace.final.allFinite()) {
      ActionProfile end(tree, trace.final);
      eps = std::max(0.0, u.value(i, end) - u.value(i, x));
    }
    report.per_player.push_back(eps);
    report.epsilon = std::max(report.epsilon, eps);
  }
  return report;
}

}  // namespace shg
