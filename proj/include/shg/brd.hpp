// Discretized best-response machinery: subgame re-equilibration, level-wise
// best-response dynamics (BRD) and the global / local SPE-regret evaluators.
#pragma once

#include "shg/core.hpp"
#include "shg/dbi.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace shg {

struct GridSpec {
  /// Points per action dimension, evenly spaced over the bounds.
  int points = 11;
  /// Box used for players without bounds.
  Interval unbounded_box{-5.0, 5.0};
};

struct BrdConfig {
  GridSpec grid;
  /// Best-response rounds T inside every subgame solve.
  int rounds = 2;
  std::uint64_t seed = 0;
  /// End a subgame solve early once a round reaches ε = 0.
  bool stop_at_zero = true;
};

class Grid {
 public:
  Grid(const GameTree& tree, const GridSpec& spec);
  const std::vector<Vector>& points(PlayerId i) const { return points_.at(i); }
  int points_per_dim() const { return per_dim_; }

 private:
  std::vector<std::vector<Vector>> points_;
  int per_dim_;
};

struct SearchResult {
  Vector action;             // best candidate
  double payoff = 0.0;       // u_i after re-equilibrating i's subgame
  ActionProfile profile;     // re-equilibrated profile for the best candidate
  double current_payoff = 0.0;
  double current_eps = 0.0;  // ε of i's re-equilibrated subgame at the current action
  ActionProfile current_profile;
};

struct ReEqResult {
  double payoff = 0.0;
  double eps = 0.0;
  ActionProfile profile;
};

struct SolveResult {
  ActionProfile profile;
  double eps = 0.0;
  std::vector<double> round_eps;  // ε of the profile evaluated in each round
  int best_round = 0;
};

struct RegretReport {
  std::string kind;  // "global" or "local"
  std::vector<double> per_player;
  double epsilon = 0.0;
  int grid_points = 0;
  int rounds = 0;
  std::vector<std::string> errors;  // per player, empty when fine
};

class BestResponseSolver {
 public:
  BestResponseSolver(const Game& game, BrdConfig config);

  /// Best grid (or current) action for i with i's subgame re-equilibrated
  /// for every candidate. The current action wins ties, then the lowest
  /// grid index.
  SearchResult search(const ActionProfile& x, PlayerId i);
  /// Leaves: (u_i(x), 0, x). Otherwise solves the subgame below i.
  ReEqResult re_eq(PlayerId i, const ActionProfile& x);
  /// Level-wise best response among the children of i after re-randomizing
  /// them; returns the round profile with the smallest ε.
  SolveResult shg_solve(PlayerId i, const ActionProfile& x);
  /// Same machinery for an arbitrary sibling group (BRD uses {root}).
  using RoundCallback = std::function<void(int round, const ActionProfile& profile, double eps)>;
  SolveResult solve_group(const std::vector<PlayerId>& players, const ActionProfile& x,
                          const RoundCallback& on_round = {});

  RegretReport compute_eps(const ActionProfile& x);

  const Grid& grid() const { return grid_; }
  const BrdConfig& config() const { return config_; }

 private:
  const Game* game_;
  BrdConfig config_;
  Grid grid_;
  std::mt19937_64 rng_;
};

/// Full BRD run from a random (or given) profile.
SolveResult brd_solve(const Game& game, const BrdConfig& config, std::optional<Vector> init = std::nullopt,
                      const BestResponseSolver::RoundCallback& on_round = {});

/// Global SPE regret of a profile.
RegretReport compute_eps(const ActionProfile& x, const Game& game, const BrdConfig& config);

/// Local SPE regret: for each player, DBI restricted to the player and its
/// descendants, starting from x; ε_i = max(0, u_i(end) - u_i(x)).
RegretReport local_regret(const ActionProfile& x, const Game& game, const SolverConfig& config);

}  // namespace shg
