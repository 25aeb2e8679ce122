// Differential Backward Induction and the shared projected fixed-step iterator.
#pragma once

#include "shg/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace shg {

struct SolverConfig {
  double learning_rate = 1e-3;
  long max_iters = 1000;
  double grad_tol = 1e-6;
  std::uint64_t seed = 0;
  /// Explicit starting profile; otherwise uniform in the bounds (or in
  /// `unbounded_init` per dimension for unbounded players).
  std::optional<Vector> init;
  Interval unbounded_init{-1.0, 1.0};
  /// Keep every k-th iterate in the trace; 0 picks 1 for runs up to 1e4
  /// steps and thins longer runs to about 1e4 entries.
  long record_every = 0;
  /// Stop when no component moves more than stall_tol for stall_window steps.
  long stall_window = 100;
  double stall_tol = 1e-12;
  /// Called with the iteration number whenever an entry is recorded.
  std::function<void(long)> on_record;

  void validate() const;
};

enum class StopReason { Converged, Stalled, MaxIters, Diverged, Error };
std::string to_string(StopReason reason);

struct TraceEntry {
  long iter = 0;
  Vector profile;
  Vector player_norms;
  double field_norm = 0.0;
  /// Norm of the monitored field (the DBI field for baselines); equals
  /// field_norm when nothing is monitored.
  double total_grad_norm = 0.0;
};

struct Trace {
  std::vector<TraceEntry> entries;
  bool converged = false;
  StopReason reason = StopReason::MaxIters;
  std::string error;
  long iterations = 0;
  Vector final;
};

/// Maps a profile to an update direction of the same length.
using FieldFn = std::function<Vector(const ActionProfile&)>;

/// The DBI field G(x) = (D_{x_1}u_1, ..., D_{x_n}u_n).
Vector dbi_field(const Game& game, const ActionProfile& x);

/// One Jacobi sweep: every total derivative at x, then x + αG projected.
/// Returns the new profile and the field evaluated at x.
std::pair<ActionProfile, Vector> dbi_step(const ActionProfile& x, const Game& game, const SolverConfig& config);

Trace dbi_solve(const Game& game, const SolverConfig& config);

/// x ← project(x + α·field(x)) until the projected field norm drops below
/// grad_tol. Components with active[k] == false are frozen. When given,
/// `monitor` is evaluated at every recorded iterate.
Trace iterate(const Game& game, const FieldFn& field, const SolverConfig& config,
              const std::vector<bool>* active = nullptr, const FieldFn& monitor = {});

Vector initial_profile(const GameTree& tree, const SolverConfig& config);

/// Euclidean norm of each player's block of a flat vector.
Vector player_norms(const GameTree& tree, const Vector& field);

/// Field with components zeroed where a bound blocks the move.
Vector projected_field(const GameTree& tree, const Vector& x, const Vector& field);

}  // namespace shg
