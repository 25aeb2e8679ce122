// Total derivatives along the composition of local best responses.
//
// A follower j's local response to its parent i is differentiated with the
// implicit function theorem, D_{x_i}φ_j = -(∇²_{jj}u_j)^{-1} ∇²_{ji}u_j, and
// the leaf-response Jacobians D_{x_i}Φ are assembled bottom-up:
//
//   D_{x_i}Φ = Σ_{j ∈ Chd(i)} (D_{x_j}Φ) (D_{x_i}φ_j),   D_{x_leaf}Φ = I.
//
// Everything is evaluated at the given profile; nothing is re-solved.
#pragma once

#include "shg/core.hpp"

#include <map>
#include <vector>

namespace shg {

/// D_{x_owner}Φ: rows index the stacked leaf vector x_L, columns x_owner.
struct LeafJacobian {
  PlayerId owner = 0;
  Matrix matrix;
};

struct TotalGradient {
  PlayerId owner = 0;
  Vector vector;
};

/// Condition-number ceiling above which a follower Hessian counts as singular.
inline constexpr double kMaxHessianCondition = 1e12;

/// D_{x_Pa(j)} φ_j, a d_j × d_Pa(j) matrix. Throws SingularHessian.
Matrix local_response_jacobian(PlayerId j, const ActionProfile& x, const UtilityOracle& oracle);

/// Identity block for a leaf.
LeafJacobian leaf_identity(PlayerId leaf, const GameTree& tree);

/// Combines the children's leaf Jacobians with their local response Jacobians.
LeafJacobian backprop_leaf_jacobian(PlayerId i, const std::map<PlayerId, LeafJacobian>& child_jacobians,
                                    const ActionProfile& x, const UtilityOracle& oracle);

/// Recursively computes D_{x_i}Φ for the subtree rooted at i.
LeafJacobian subtree_leaf_jacobian(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle);

/// D_{x_i}u_i = ∇_{x_i}u_i + (∇_{x_L}u_i) D_{x_i}Φ. Leaves return their partial gradient.
TotalGradient total_grad(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle,
                         const LeafJacobian& leaf_jac);
TotalGradient total_grad(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle);

/// D²_{x_i,x_i}u_i by central differences of the total gradient along x_i,
/// with descendants moved along their linearized responses. Leaves use the
/// analytic partial Hessian.
Matrix total_hessian(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle);

/// D_{x_i} x_j for every strict descendant j of i (chain rule through the
/// local responses on the path).
std::map<PlayerId, Matrix> descendant_responses(PlayerId i, const ActionProfile& x,
                                                const UtilityOracle& oracle);

/// One bottom-up sweep over the whole tree: every player's total gradient,
/// concatenated in flat-profile order (the DBI update field).
Vector total_gradient_field(const ActionProfile& x, const UtilityOracle& oracle);

}  // namespace shg
