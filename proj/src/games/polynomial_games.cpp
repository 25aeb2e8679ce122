#include "shg/games.hpp"

#include <algorithm>
#include <string>

namespace shg {

PolynomialOracle::PolynomialOracle(std::shared_ptr<const GameTree> tree, std::vector<Polynomial> utilities)
    : tree_(std::move(tree)), utilities_(std::move(utilities)) {
  if (static_cast<int>(utilities_.size()) != tree_->num_players())
    throw InvalidParams("one polynomial per player required");
  std::vector<PlayerId> owner(tree_->total_dim());
  for (PlayerId i = 0; i < tree_->num_players(); ++i)
    for (int k = 0; k < tree_->action_dim(i); ++k) owner[tree_->offset(i) + k] = i;
  for (PlayerId i = 0; i < tree_->num_players(); ++i) {
    auto allowed = hierarchical_dependencies(*tree_, i);
    for (int v : utilities_[i].variables()) {
      if (v < 0 || v >= tree_->total_dim())
        throw DependencyViolation("utility of player " + std::to_string(i) + " uses unknown variable " +
                                  std::to_string(v));
      if (!std::binary_search(allowed.begin(), allowed.end(), owner[v]))
        throw DependencyViolation("utility of player " + std::to_string(i) + " depends on player " +
                                  std::to_string(owner[v]));
    }
  }
}

double PolynomialOracle::value(PlayerId i, const ActionProfile& x) const {
  return utilities_.at(i).evaluate(x.flat());
}

Vector PolynomialOracle::grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const {
  return utilities_.at(i).gradient_block(x.flat(), tree_->offset(wrt), tree_->action_dim(wrt));
}

Matrix PolynomialOracle::hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const {
  return utilities_.at(i).hessian_block(x.flat(), tree_->offset(a), tree_->action_dim(a), tree_->offset(b),
                                        tree_->action_dim(b));
}

std::vector<PlayerId> PolynomialOracle::dependency_set(PlayerId i) const {
  return hierarchical_dependencies(*tree_, i);
}

Vector PolynomialOracle::flat_grad(PlayerId i, const ActionProfile& x) const {
  return utilities_.at(i).gradient(x.flat());
}

Game make_polynomial(std::string name, GameTree tree, std::vector<Polynomial> utilities) {
  auto shared = std::make_shared<const GameTree>(std::move(tree));
  auto oracle = std::make_shared<const PolynomialOracle>(shared, std::move(utilities));
  return Game{std::move(name), shared, oracle};
}

namespace {

Polynomial var(int v) { return Polynomial::variable(v); }

}  // namespace

Game make_polynomial(PolynomialInstance instance) {
  switch (instance) {
    case PolynomialInstance::P111: {
      // players x, y, z in a chain
      auto x = var(0), y = var(1), z = var(2);
      Polynomial u1 = -7.0 * x * x + 9.0 * x * z + x - z;
      Polynomial u2 = -2.0 * y * y - 4.0 * y * z - 10.0 * x * x + 2.0 * x * z - 3.0 * z * z + 4.0 * y + 7.0 * x -
                      8.0 * z - 8.0 * x * y * z;
      Polynomial u3 = -10.0 * z * z - 9.0 * y * z + 9.0 * y * y - 5.0 * z - 2.0 * y;
      return make_polynomial("p111", build_tree({1, 1, 1}, {{1, 0}, {2, 1}}), {u1, u2, u3});
    }
    case PolynomialInstance::P112: {
      // root x, middle w, leaves y and z
      auto x = var(0), w = var(1), y = var(2), z = var(3);
      Polynomial u1 = -2.0 * x * x - 3.0 * x * y + y * y + 5.0 * x + 7.0 * y + 3.0 * x * z - 10.0 * y * z +
                      5.0 * x * y * z - 6.0 * z;
      Polynomial u2 = 2.0 * w * w - w * x - 3.0 * w * y - 5.0 * x * x + 9.0 * x * y + 2.0 * y * y + 3.0 * w +
                      5.0 * x - 4.0 * y + 5.0 * z * z + 8.0 * w * z + 7.0 * x * z - 9.0 * y * z - 10.0 * z;
      Polynomial u3 = -5.0 * y * y - 8.0 * y * z + z * z + 8.0 * y - 9.0 * z - 2.0 * w * y - 4.0 * w * z - w * w -
                      8.0 * w * y * z - 2.0 * w;
      Polynomial u4 = -10.0 * z * z - 2.0 * y * z + 5.0 * y * y - 7.0 * z - 6.0 * y - 3.0 * w * z - 8.0 * w * y -
                      10.0 * w * y * z + 5.0 * w;
      return make_polynomial("p112", build_tree({1, 1, 2}, {{1, 0}, {2, 1}, {3, 1}}), {u1, u2, u3, u4});
    }
    case PolynomialInstance::P111_3D: {
      auto sx = sum_of(0, 3), sy = sum_of(3, 3), sz = sum_of(6, 3);
      auto qx = sum_of_squares(0, 3), qy = sum_of_squares(3, 3), qz = sum_of_squares(6, 3);
      Polynomial u1 = -7.0 * qx + 9.0 * sx * sz + sx - sz;
      Polynomial u2 = -2.0 * qy - 4.0 * sy * sz - 10.0 * sx * sz + 2.0 * qx - 3.0 * qz + 4.0 * sx * sy * sz +
                      7.0 * sx - 8.0 * sy - 8.0 * sz;
      Polynomial u3 = -10.0 * qz - 9.0 * sy * sz + 9.0 * qy - 5.0 * sy - 2.0 * sz;
      return make_polynomial("p111_3d", build_tree({1, 1, 1}, {{1, 0}, {2, 1}}, {{0, 3}, {1, 3}, {2, 3}}),
                             {u1, u2, u3});
    }
  }
  throw InvalidParams("unknown polynomial instance");
}

}  // namespace shg
