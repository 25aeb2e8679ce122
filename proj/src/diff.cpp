#include "shg/diff.hpp"

#include <string>

namespace shg {

Matrix local_response_jacobian(PlayerId j, const ActionProfile& x, const UtilityOracle& oracle) {
  const GameTree& tree = x.tree();
  auto parent = tree.parent_of(j);
  if (!parent) throw UnknownPlayer("the root has no local response");
  Matrix own = oracle.hess(j, j, j, x);
  Matrix cross = oracle.hess(j, j, *parent, x);
  Eigen::PartialPivLU<Matrix> lu(own);
  double rcond = lu.rcond();
  if (!(rcond * kMaxHessianCondition >= 1.0))
    throw SingularHessian("Hessian of player " + std::to_string(j) + " is singular (rcond " +
                          std::to_string(rcond) + ")");
  return -lu.solve(cross);
}

LeafJacobian leaf_identity(PlayerId leaf, const GameTree& tree) {
  LeafJacobian jac{leaf, Matrix::Zero(tree.leaf_dim(), tree.action_dim(leaf))};
  jac.matrix.block(tree.leaf_offset(leaf), 0, tree.action_dim(leaf), tree.action_dim(leaf)).setIdentity();
  return jac;
}

LeafJacobian backprop_leaf_jacobian(PlayerId i, const std::map<PlayerId, LeafJacobian>& child_jacobians,
                                    const ActionProfile& x, const UtilityOracle& oracle) {
  const GameTree& tree = x.tree();
  if (tree.is_leaf(i)) throw Error("backprop_leaf_jacobian called on leaf " + std::to_string(i));
  LeafJacobian out{i, Matrix::Zero(tree.leaf_dim(), tree.action_dim(i))};
  for (PlayerId j : tree.children_of(i)) {
    auto it = child_jacobians.find(j);
    if (it == child_jacobians.end())
      throw Error("missing leaf Jacobian for child " + std::to_string(j));
    out.matrix += it->second.matrix * local_response_jacobian(j, x, oracle);
  }
  return out;
}

LeafJacobian subtree_leaf_jacobian(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle) {
  const GameTree& tree = x.tree();
  if (tree.is_leaf(i)) return leaf_identity(i, tree);
  std::map<PlayerId, LeafJacobian> children;
  for (PlayerId j : tree.children_of(i)) children.emplace(j, subtree_leaf_jacobian(j, x, oracle));
  return backprop_leaf_jacobian(i, children, x, oracle);
}

namespace {

Vector leaf_part(const GameTree& tree, const Vector& flat_grad) {
  Vector out(tree.leaf_dim());
  for (PlayerId leaf : tree.leaves())
    out.segment(tree.leaf_offset(leaf), tree.action_dim(leaf)) =
        flat_grad.segment(tree.offset(leaf), tree.action_dim(leaf));
  return out;
}

}  // namespace

TotalGradient total_grad(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle,
                         const LeafJacobian& leaf_jac) {
  const GameTree& tree = x.tree();
  if (tree.is_leaf(i)) return {i, oracle.grad(i, i, x)};
  Vector fg = oracle.flat_grad(i, x);
  Vector g = fg.segment(tree.offset(i), tree.action_dim(i));
  g.noalias() += leaf_jac.matrix.transpose() * leaf_part(tree, fg);
  return {i, g};
}

TotalGradient total_grad(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle) {
  return total_grad(i, x, oracle, subtree_leaf_jacobian(i, x, oracle));
}

std::map<PlayerId, Matrix> descendant_responses(PlayerId i, const ActionProfile& x,
                                                const UtilityOracle& oracle) {
  const GameTree& tree = x.tree();
  std::map<PlayerId, Matrix> out;
  // descendants() is sorted by id, so parents precede their children.
  for (PlayerId j : tree.descendants(i)) {
    PlayerId p = *tree.parent_of(j);
    Matrix local = local_response_jacobian(j, x, oracle);
    if (p == i)
      out[j] = local;
    else
      out[j] = local * out.at(p);
  }
  return out;
}

Matrix total_hessian(PlayerId i, const ActionProfile& x, const UtilityOracle& oracle) {
  const GameTree& tree = x.tree();
  if (tree.is_leaf(i)) return oracle.hess(i, i, i, x);
  const int d = tree.action_dim(i);
  const int off = tree.offset(i);
  auto responses = descendant_responses(i, x, oracle);
  Matrix h(d, d);
  for (int k = 0; k < d; ++k) {
    double step = fd_step(x.flat()[off + k]);
    ActionProfile up = x;
    ActionProfile down = x;
    up.flat()[off + k] += step;
    down.flat()[off + k] -= step;
    for (const auto& [j, r] : responses) {
      up.slice(j) += step * r.col(k);
      down.slice(j) -= step * r.col(k);
    }
    h.col(k) = (total_grad(i, up, oracle).vector - total_grad(i, down, oracle).vector) / (2 * step);
  }
  return h;
}

Vector total_gradient_field(const ActionProfile& x, const UtilityOracle& oracle) {
  const GameTree& tree = x.tree();
  Vector field(tree.total_dim());
  std::vector<LeafJacobian> jac(tree.num_players());
  for (int level = tree.num_levels(); level >= 1; --level) {
    for (PlayerId i : tree.players_at(level)) {
      if (level == tree.num_levels()) {
        jac[i] = leaf_identity(i, tree);
      } else {
        jac[i] = LeafJacobian{i, Matrix::Zero(tree.leaf_dim(), tree.action_dim(i))};
        for (PlayerId j : tree.children_of(i))
          jac[i].matrix.noalias() += jac[j].matrix * local_response_jacobian(j, x, oracle);
      }
      field.segment(tree.offset(i), tree.action_dim(i)) = total_grad(i, x, oracle, jac[i]).vector;
    }
  }
  return field;
}

}  // namespace shg
