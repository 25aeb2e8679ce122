// Baseline gradient dynamics for differentiable games: simultaneous gradient
// (SIM), symplectic adjustment with and without alignment (SYM, SYM_ALN),
// consensus optimization (CO) and Hamiltonian descent (HAM).
//
// Vectors follow the row convention G·A for the symplectic correction, i.e.
// (G·A)_k = Σ_r G_r A_{rk}.
#pragma once

#include "shg/core.hpp"
#include "shg/dbi.hpp"

#include <string>

namespace shg {

enum class FieldKind { Sim, Sym, SymAln, Co, Ham };

struct FieldSpec {
  FieldKind kind = FieldKind::Sim;
  double gamma = 0.1;  // CO weight on the Hamiltonian term
};

std::string to_string(FieldKind kind);
/// Accepts "sim", "sym", "sym_aln", "co", "ham" (case-insensitive).
FieldKind parse_field_kind(const std::string& name);

/// (∇_{x_1}u_1, ..., ∇_{x_n}u_n).
Vector field_sim(const Game& game, const ActionProfile& x);

/// Central-difference Jacobian of `field`, step rel_step * max(1, |x_k|).
Matrix field_jacobian(const FieldFn& field, const ActionProfile& x, double rel_step = 1e-5);
Matrix sim_jacobian(const Game& game, const ActionProfile& x);

Vector field_sym(const Game& game, const ActionProfile& x, bool aligned);
/// -∇‖G^SIM‖² = -2 (J^SIM)ᵀ G^SIM.
Vector field_ham(const Game& game, const ActionProfile& x);
Vector field_co(const Game& game, const ActionProfile& x, double gamma);

Vector evaluate_field(const Game& game, const FieldSpec& spec, const ActionProfile& x);

Trace iterate_field(const Game& game, const FieldSpec& spec, const SolverConfig& config);

}  // namespace shg
