// Small game builders shared by the unit tests.
#pragma once

#include "shg/brd.hpp"
#include "shg/core.hpp"
#include "shg/games.hpp"
#include "shg/polynomial.hpp"

#include <random>
#include <vector>

namespace shg::testing {

inline Polynomial var(int k) { return Polynomial::variable(k); }
inline Polynomial cst(double c) { return Polynomial::constant(c); }

inline GameTree chain(int levels, int dim = 1) { return build_balanced_tree(std::vector<int>(levels, 1), dim); }

/// Single player on [lo, hi] (or unbounded) with utility p(x_0).
inline Game single_player(Polynomial p, std::optional<Interval> box = std::nullopt) {
  return make_polynomial("single", build_balanced_tree({1}, 1, box), {std::move(p)});
}

/// Random quadratic game on a balanced tree. Every player's own block is
/// strictly concave; cross terms only touch the allowed dependency set.
inline Game random_quadratic_game(const std::vector<int>& shape, int dim, std::uint64_t seed,
                                  std::optional<Interval> box = std::nullopt) {
  GameTree tree = build_balanced_tree(shape, dim, box);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0), pos(0.5, 1.5);
  std::vector<Polynomial> us;
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    std::vector<int> vars;
    for (PlayerId j : hierarchical_dependencies(tree, i))
      for (int k = 0; k < tree.action_dim(j); ++k) vars.push_back(tree.offset(j) + k);
    Polynomial p;
    const int own = tree.offset(i);
    for (std::size_t a = 0; a < vars.size(); ++a) {
      p.add_term(u(rng), {{vars[a], 1}});
      for (std::size_t b = a; b < vars.size(); ++b) {
        bool own_a = vars[a] >= own && vars[a] < own + dim;
        bool own_b = vars[b] >= own && vars[b] < own + dim;
        double c = 0.3 * u(rng);
        if (own_a && own_b) c = a == b ? -pos(rng) * dim : 0.2 * u(rng) / dim;
        if (a == b)
          p.add_term(c, {{vars[a], 2}});
        else
          p.add_term(c, {{vars[a], 1}, {vars[b], 1}});
      }
    }
    us.push_back(std::move(p));
  }
  return make_polynomial("random_quadratic", std::move(tree), std::move(us));
}

inline Vector random_vector(int n, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Vector v(n);
  for (int k = 0; k < n; ++k) v[k] = u(rng);
  return v;
}

/// Puts every strict descendant of i on its local response by solving all
/// their partial first-order conditions at once (exact for quadratics).
inline ActionProfile settle_descendants(const Game& game, PlayerId i, const ActionProfile& x) {
  const GameTree& t = game.shape();
  const UtilityOracle& u = game.utility();
  std::vector<PlayerId> ds = t.descendants(i);
  std::vector<int> off;
  int n = 0;
  for (PlayerId j : ds) {
    off.push_back(n);
    n += t.action_dim(j);
  }
  Matrix jac = Matrix::Zero(n, n);
  Vector g(n);
  for (std::size_t a = 0; a < ds.size(); ++a) {
    g.segment(off[a], t.action_dim(ds[a])) = u.grad(ds[a], ds[a], x);
    for (std::size_t b = 0; b < ds.size(); ++b)
      jac.block(off[a], off[b], t.action_dim(ds[a]), t.action_dim(ds[b])) = u.hess(ds[a], ds[a], ds[b], x);
  }
  Vector step = jac.fullPivLu().solve(g);
  ActionProfile y = x;
  for (std::size_t a = 0; a < ds.size(); ++a) y.slice(ds[a]) -= step.segment(off[a], t.action_dim(ds[a]));
  return y;
}

/// Descendants of i re-solved top-down after x_i moves: each one answers its
/// (already moved) parent with everything off the path held at base.
inline ActionProfile resolve_below(const Game& game, PlayerId i, const ActionProfile& base, const Vector& xi) {
  const GameTree& t = game.shape();
  const UtilityOracle& u = game.utility();
  ActionProfile y = base;
  y.slice(i) = xi;
  for (PlayerId j : t.descendants(i)) {
    ActionProfile z = base;
    for (PlayerId a = *t.parent_of(j);; a = *t.parent_of(a)) {
      z.slice(a) = y.slice(a);
      if (a == i) break;
    }
    Matrix h = u.hess(j, j, j, z);
    y.slice(j) = z.slice(j) - h.fullPivLu().solve(u.grad(j, j, z));
  }
  return y;
}

/// Central differences of u_i along the re-solved response composition.
inline Vector composition_grad(const Game& game, PlayerId i, const ActionProfile& x) {
  const GameTree& t = game.shape();
  const int d = t.action_dim(i);
  Vector out(d);
  for (int k = 0; k < d; ++k) {
    const double h = 1e-5 * std::max(1.0, std::abs(x.slice(i)[k]));
    Vector up = x.slice(i), dn = x.slice(i);
    up[k] += h;
    dn[k] -= h;
    out[k] = (game.utility().value(i, resolve_below(game, i, x, up)) -
              game.utility().value(i, resolve_below(game, i, x, dn))) /
             (2 * h);
  }
  return out;
}

/// Leaf Jacobian of the root of a chain as the plain product of edge Jacobians.
inline Matrix chain_path_product(const Game& game, const ActionProfile& x) {
  const GameTree& t = game.shape();
  const UtilityOracle& u = game.utility();
  Matrix acc = Matrix::Identity(t.action_dim(0), t.action_dim(0));
  for (PlayerId j = 1; j < t.num_players(); ++j) {
    Matrix hjj = u.hess(j, j, j, x), hjp = u.hess(j, j, j - 1, x);
    acc = Matrix(-hjj.inverse() * hjp) * acc;
  }
  return acc;
}

/// Exhaustive backward induction over a grid for tiny games (scalar actions,
/// every sibling group of size <= 2). Returns nullopt when some subgame has
/// no unique pure equilibrium.
class BruteForceSpe {
 public:
  BruteForceSpe(const Game& game, const Grid& grid) : game_(game), grid_(grid) {}

  std::optional<ActionProfile> solve(const ActionProfile& start) {
    ok_ = true;
    ActionProfile x = solve_group({game_.shape().root()}, start);
    if (!ok_) return std::nullopt;
    return x;
  }

  /// Largest unilateral grid gain of leaf players (exact NE regret of a leaf group).
  static double leaf_regret(const Game& game, const Grid& grid, const std::vector<PlayerId>& group,
                            const ActionProfile& x) {
    double worst = 0.0;
    for (PlayerId j : group) {
      ActionProfile y = x;
      for (const Vector& a : grid.points(j)) {
        y.slice(j) = a;
        worst = std::max(worst, game.utility().value(j, y) - game.utility().value(j, x));
      }
    }
    return worst;
  }

 private:
  ActionProfile below(PlayerId j, const ActionProfile& x) {
    const auto& ch = game_.shape().children_of(j);
    return ch.empty() ? x : solve_group(ch, x);
  }

  ActionProfile with(const std::vector<PlayerId>& group, const std::vector<const Vector*>& pick, ActionProfile x) {
    for (std::size_t k = 0; k < group.size(); ++k) x.slice(group[k]) = *pick[k];
    for (PlayerId j : group) x = below(j, x);
    return x;
  }

  ActionProfile solve_group(const std::vector<PlayerId>& group, const ActionProfile& x) {
    const UtilityOracle& u = game_.utility();
    std::vector<ActionProfile> equilibria;
    std::vector<const Vector*> pick(group.size());
    std::function<void(std::size_t)> rec = [&](std::size_t k) {
      if (k < group.size()) {
        for (const Vector& a : grid_.points(group[k])) {
          pick[k] = &a;
          rec(k + 1);
        }
        return;
      }
      ActionProfile y = with(group, pick, x);
      for (std::size_t m = 0; m < group.size(); ++m) {
        std::vector<const Vector*> alt = pick;
        for (const Vector& a : grid_.points(group[m])) {
          alt[m] = &a;
          if (u.value(group[m], with(group, alt, x)) > u.value(group[m], y)) return;
        }
      }
      equilibria.push_back(y);
    };
    rec(0);
    if (equilibria.size() != 1) {
      ok_ = false;
      return x;
    }
    return equilibria.front();
  }

  const Game& game_;
  const Grid& grid_;
  bool ok_ = true;
};

}  // namespace shg::testing
