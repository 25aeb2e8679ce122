#include "shg/core.hpp"

#include <algorithm>
#include <deque>
#include <string>

namespace shg {

int GameTree::level_of(PlayerId i) const {
  check_player(i);
  return level_[i];
}

std::optional<PlayerId> GameTree::parent_of(PlayerId i) const {
  check_player(i);
  if (parent_[i] < 0) return std::nullopt;
  return parent_[i];
}

const std::vector<PlayerId>& GameTree::children_of(PlayerId i) const {
  check_player(i);
  return children_[i];
}

const std::vector<PlayerId>& GameTree::players_at(int level) const {
  if (level < 1 || level > num_levels())
    throw UnknownPlayer("level " + std::to_string(level) + " out of range");
  return levels_[level - 1];
}

int GameTree::action_dim(PlayerId i) const {
  check_player(i);
  return dim_[i];
}

const Bounds& GameTree::bounds(PlayerId i) const {
  check_player(i);
  return bounds_[i];
}

int GameTree::offset(PlayerId i) const {
  check_player(i);
  return offset_[i];
}

int GameTree::leaf_index(PlayerId leaf) const {
  check_player(leaf);
  if (leaf_index_[leaf] < 0) throw UnknownPlayer("player " + std::to_string(leaf) + " is not a leaf");
  return leaf_index_[leaf];
}

int GameTree::leaf_offset(PlayerId leaf) const {
  check_player(leaf);
  if (leaf_offset_[leaf] < 0) throw UnknownPlayer("player " + std::to_string(leaf) + " is not a leaf");
  return leaf_offset_[leaf];
}

std::vector<PlayerId> GameTree::descendants(PlayerId i) const {
  check_player(i);
  std::vector<PlayerId> out;
  std::deque<PlayerId> queue(children_[i].begin(), children_[i].end());
  while (!queue.empty()) {
    PlayerId j = queue.front();
    queue.pop_front();
    out.push_back(j);
    for (PlayerId c : children_[j]) queue.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<PlayerId> GameTree::leaves_under(PlayerId i) const {
  if (is_leaf(i)) return {i};
  std::vector<PlayerId> out;
  for (PlayerId j : descendants(i))
    if (is_leaf(j)) out.push_back(j);
  return out;
}

bool GameTree::is_ancestor(PlayerId ancestor, PlayerId i) const {
  check_player(ancestor);
  check_player(i);
  for (int p = parent_[i]; p >= 0; p = parent_[p])
    if (p == ancestor) return true;
  return false;
}

void GameTree::check_player(PlayerId i) const {
  if (i < 0 || i >= num_players()) throw UnknownPlayer("unknown player " + std::to_string(i));
}

GameTree build_tree(const std::vector<int>& level_sizes, const std::map<PlayerId, PlayerId>& parents,
                    const std::map<PlayerId, int>& action_dims,
                    const std::map<PlayerId, Bounds>& bounds) {
  if (level_sizes.empty()) throw EmptyLevel("a tree needs at least one level");
  for (std::size_t l = 0; l < level_sizes.size(); ++l)
    if (level_sizes[l] <= 0) throw EmptyLevel("level " + std::to_string(l + 1) + " is empty");
  if (level_sizes[0] != 1) throw MalformedTree("level 1 must hold exactly one root player");

  GameTree t;
  int n = 0;
  for (int l = 0; l < static_cast<int>(level_sizes.size()); ++l) {
    t.levels_.emplace_back();
    for (int k = 0; k < level_sizes[l]; ++k) {
      t.level_.push_back(l + 1);
      t.levels_.back().push_back(n++);
    }
  }
  t.parent_.assign(n, -1);
  t.children_.assign(n, {});

  for (const auto& [child, parent] : parents) {
    if (child < 0 || child >= n || parent < 0 || parent >= n)
      throw MalformedTree("parent assignment references unknown player");
    if (child == 0) throw MalformedTree("the root cannot have a parent");
    if (t.level_[parent] != t.level_[child] - 1)
      throw MalformedTree("player " + std::to_string(child) + " has a parent outside the level above");
    t.parent_[child] = parent;
  }
  for (PlayerId i = 1; i < n; ++i) {
    if (t.parent_[i] < 0) throw MalformedTree("player " + std::to_string(i) + " has no parent");
    t.children_[t.parent_[i]].push_back(i);
  }
  // Players at levels above L without children would be extra leaves.
  for (PlayerId i = 0; i < n; ++i)
    if (t.level_[i] < static_cast<int>(level_sizes.size()) && t.children_[i].empty())
      throw MalformedTree("player " + std::to_string(i) + " above the last level has no children");

  t.dim_.assign(n, 1);
  for (const auto& [i, d] : action_dims) {
    if (i < 0 || i >= n) throw MalformedTree("action_dims references unknown player");
    if (d <= 0) throw MalformedTree("action dimension must be positive");
    t.dim_[i] = d;
  }
  t.bounds_.assign(n, {});
  for (const auto& [i, b] : bounds) {
    if (i < 0 || i >= n) throw MalformedTree("bounds references unknown player");
    if (b.empty()) continue;
    if (static_cast<int>(b.size()) != t.dim_[i])
      throw MalformedTree("bounds for player " + std::to_string(i) + " do not match its dimension");
    for (const auto& iv : b)
      if (!(iv.lo <= iv.hi)) throw MalformedTree("empty bound interval");
    t.bounds_[i] = b;
  }

  t.offset_.resize(n);
  for (PlayerId i = 0; i < n; ++i) {
    t.offset_[i] = t.total_dim_;
    t.total_dim_ += t.dim_[i];
  }
  t.leaf_index_.assign(n, -1);
  t.leaf_offset_.assign(n, -1);
  int k = 0;
  for (PlayerId leaf : t.levels_.back()) {
    t.leaf_index_[leaf] = k++;
    t.leaf_offset_[leaf] = t.leaf_dim_;
    t.leaf_dim_ += t.dim_[leaf];
  }
  return t;
}

GameTree build_balanced_tree(const std::vector<int>& level_sizes, int action_dim,
                             std::optional<Interval> box) {
  std::map<PlayerId, PlayerId> parents;
  std::map<PlayerId, int> dims;
  std::map<PlayerId, Bounds> bounds;
  int first_prev = 0;
  int first = 0;
  for (std::size_t l = 0; l < level_sizes.size(); ++l) {
    int size = level_sizes[l];
    if (l > 0) {
      int above = level_sizes[l - 1];
      for (int k = 0; k < size; ++k) parents[first + k] = first_prev + (k * above) / size;
    }
    first_prev = first;
    first += std::max(size, 0);
  }
  for (PlayerId i = 0; i < first; ++i) {
    dims[i] = action_dim;
    if (box) bounds[i] = Bounds(action_dim, *box);
  }
  return build_tree(level_sizes, parents, dims, bounds);
}

// ---------------------------------------------------------------------------

ActionProfile::ActionProfile(const GameTree& tree) : tree_(&tree), flat_(Vector::Zero(tree.total_dim())) {}

ActionProfile::ActionProfile(const GameTree& tree, Vector flat) : tree_(&tree), flat_(std::move(flat)) {
  if (flat_.size() != tree.total_dim())
    throw Error("profile has " + std::to_string(flat_.size()) + " entries, tree needs " +
                std::to_string(tree.total_dim()));
}

Eigen::VectorBlock<const Vector> ActionProfile::slice(PlayerId i) const {
  return flat_.segment(tree_->offset(i), tree_->action_dim(i));
}

Eigen::VectorBlock<Vector> ActionProfile::slice(PlayerId i) {
  return flat_.segment(tree_->offset(i), tree_->action_dim(i));
}

Vector ActionProfile::leaf_actions() const {
  Vector out(tree_->leaf_dim());
  for (PlayerId leaf : tree_->leaves())
    out.segment(tree_->leaf_offset(leaf), tree_->action_dim(leaf)) = slice(leaf);
  return out;
}

void project_in_place(Vector& flat, const GameTree& tree) {
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    const Bounds& b = tree.bounds(i);
    if (b.empty()) continue;
    int off = tree.offset(i);
    for (std::size_t k = 0; k < b.size(); ++k) flat[off + k] = std::clamp(flat[off + k], b[k].lo, b[k].hi);
  }
}

ActionProfile project(const ActionProfile& profile, const GameTree& tree) {
  ActionProfile out = profile;
  project_in_place(out.flat(), tree);
  return out;
}

// ---------------------------------------------------------------------------

Vector UtilityOracle::flat_grad(PlayerId i, const ActionProfile& x) const {
  const GameTree& tree = x.tree();
  Vector g = Vector::Zero(tree.total_dim());
  for (PlayerId k : dependency_set(i)) g.segment(tree.offset(k), tree.action_dim(k)) = grad(i, k, x);
  return g;
}

std::vector<PlayerId> hierarchical_dependencies(const GameTree& tree, PlayerId i) {
  std::vector<PlayerId> deps{i};
  if (auto p = tree.parent_of(i)) deps.push_back(*p);
  for (PlayerId leaf : tree.leaves()) deps.push_back(leaf);
  std::sort(deps.begin(), deps.end());
  deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
  return deps;
}

FiniteDifferenceOracle::FiniteDifferenceOracle(const GameTree& tree, ValueFn value,
                                               std::vector<std::vector<PlayerId>> dependencies)
    : tree_(&tree), value_(std::move(value)), deps_(std::move(dependencies)) {
  if (static_cast<int>(deps_.size()) != tree.num_players())
    throw InvalidParams("one dependency set per player required");
}

double FiniteDifferenceOracle::value(PlayerId i, const ActionProfile& x) const { return value_(i, x); }

Vector FiniteDifferenceOracle::grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const {
  int off = tree_->offset(wrt);
  int d = tree_->action_dim(wrt);
  Vector g(d);
  ActionProfile probe = x;
  for (int k = 0; k < d; ++k) {
    double x0 = x.flat()[off + k];
    double h = fd_step(x0);
    probe.flat()[off + k] = x0 + h;
    double up = value_(i, probe);
    probe.flat()[off + k] = x0 - h;
    double down = value_(i, probe);
    probe.flat()[off + k] = x0;
    g[k] = (up - down) / (2 * h);
  }
  return g;
}

Matrix FiniteDifferenceOracle::hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const {
  // Central differences of the FD gradient along x_b.
  int off = tree_->offset(b);
  int d = tree_->action_dim(b);
  Matrix h(tree_->action_dim(a), d);
  ActionProfile probe = x;
  for (int k = 0; k < d; ++k) {
    double x0 = x.flat()[off + k];
    double step = 1e-4 * std::max(1.0, std::abs(x0));
    probe.flat()[off + k] = x0 + step;
    Vector up = grad(i, a, probe);
    probe.flat()[off + k] = x0 - step;
    Vector down = grad(i, a, probe);
    probe.flat()[off + k] = x0;
    h.col(k) = (up - down) / (2 * step);
  }
  return h;
}

std::vector<PlayerId> FiniteDifferenceOracle::dependency_set(PlayerId i) const {
  tree_->check_player(i);
  return deps_[i];
}

}  // namespace shg
