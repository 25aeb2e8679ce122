#include "shg/dbi.hpp"

#include "shg/diff.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace shg {

void SolverConfig::validate() const {
  if (!(learning_rate > 0)) throw ConfigError("learning rate must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(grad_tol > 0)) throw ConfigError("grad_tol must be positive");
  if (record_every < 0) throw ConfigError("record_every must be non-negative");
}

std::string to_string(StopReason reason) {
  switch (reason) {
    case StopReason::Converged: return "converged";
    case StopReason::Stalled: return "stalled";
    case StopReason::MaxIters: return "max_iters";
    case StopReason::Diverged: return "diverged";
    case StopReason::Error: return "error";
  }
  return "unknown";
}

Vector dbi_field(const Game& game, const ActionProfile& x) { return total_gradient_field(x, game.utility()); }

std::pair<ActionProfile, Vector> dbi_step(const ActionProfile& x, const Game& game, const SolverConfig& config) {
  Vector g = dbi_field(game, x);
  ActionProfile next(x.tree(), x.flat() + config.learning_rate * g);
  project_in_place(next.flat(), x.tree());
  return {std::move(next), std::move(g)};
}

Trace dbi_solve(const Game& game, const SolverConfig& config) {
  return iterate(game, [&game](const ActionProfile& x) { return dbi_field(game, x); }, config);
}

Vector initial_profile(const GameTree& tree, const SolverConfig& config) {
  if (config.init) {
    if (config.init->size() != tree.total_dim()) throw ConfigError("initial profile has the wrong length");
    Vector x = *config.init;
    project_in_place(x, tree);
    return x;
  }
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vector x(tree.total_dim());
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    const Bounds& b = tree.bounds(i);
    for (int k = 0; k < tree.action_dim(i); ++k) {
      Interval box = b.empty() ? config.unbounded_init : b[k];
      x[tree.offset(i) + k] = box.lo + (box.hi - box.lo) * unit(rng);
    }
  }
  return x;
}

Vector player_norms(const GameTree& tree, const Vector& field) {
  Vector out(tree.num_players());
  for (PlayerId i = 0; i < tree.num_players(); ++i)
    out[i] = field.segment(tree.offset(i), tree.action_dim(i)).norm();
  return out;
}

Vector projected_field(const GameTree& tree, const Vector& x, const Vector& field) {
  Vector out = field;
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    const Bounds& b = tree.bounds(i);
    if (b.empty()) continue;
    for (int k = 0; k < tree.action_dim(i); ++k) {
      int idx = tree.offset(i) + k;
      if ((x[idx] <= b[k].lo && out[idx] < 0) || (x[idx] >= b[k].hi && out[idx] > 0)) out[idx] = 0.0;
    }
  }
  return out;
}

Trace iterate(const Game& game, const FieldFn& field, const SolverConfig& config,
              const std::vector<bool>* active, const FieldFn& monitor) {
  config.validate();
  const GameTree& tree = game.shape();
  if (active && static_cast<int>(active->size()) != tree.total_dim())
    throw ConfigError("active mask has the wrong length");

  long every = config.record_every;
  if (every == 0) every = config.max_iters <= 10000 ? 1 : (config.max_iters + 9999) / 10000;

  Trace trace;
  ActionProfile x(tree, initial_profile(tree, config));
  long stall = 0;

  auto record = [&](long t, const Vector& g, const Vector& raw) {
    double watched = raw.norm();
    if (monitor) {
      try {
        watched = monitor(x).norm();
      } catch (const SingularHessian&) {
        watched = std::numeric_limits<double>::quiet_NaN();
      }
    }
    trace.entries.push_back({t, x.flat(), player_norms(tree, g), g.norm(), watched});
    if (config.on_record) config.on_record(t);
  };

  for (long t = 0;; ++t) {
    Vector g;
    try {
      g = field(x);
    } catch (const SingularHessian& e) {
      trace.reason = StopReason::Error;
      trace.error = e.what();
      trace.iterations = t;
      break;
    }
    if (active)
      for (int k = 0; k < g.size(); ++k)
        if (!(*active)[k]) g[k] = 0.0;
    trace.iterations = t;

    bool finite = g.allFinite() && x.flat().allFinite();
    // What actually moves x; at a bound the raw field can stay large.
    Vector moved = finite ? projected_field(tree, x.flat(), g) : g;
    double moving = finite ? moved.norm() : 0.0;
    StopReason stop = StopReason::MaxIters;
    bool done = true;
    if (!finite)
      stop = StopReason::Diverged;
    else if (moving < config.grad_tol)
      stop = StopReason::Converged;
    else if (stall >= config.stall_window)
      stop = StopReason::Stalled;
    else if (t >= config.max_iters)
      stop = StopReason::MaxIters;
    else
      done = false;

    if (done || t % every == 0) record(t, moved, g);
    if (done) {
      trace.reason = stop;
      break;
    }

    Vector next = x.flat() + config.learning_rate * g;
    project_in_place(next, tree);
    double disp = (next - x.flat()).cwiseAbs().maxCoeff();
    stall = disp < config.stall_tol ? stall + 1 : 0;
    x.flat() = std::move(next);
  }
  trace.converged = trace.reason == StopReason::Converged;
  trace.final = x.flat();
  return trace;
}

}  // namespace shg
