// Structured hierarchical games: player tree, action profiles, utility oracles.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace shg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Players are numbered level by level starting at the root (id 0).
using PlayerId = int;

// ---------------------------------------------------------------------------
// Errors

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define SHG_DEFINE_ERROR(Name)              \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

SHG_DEFINE_ERROR(MalformedTree);
SHG_DEFINE_ERROR(EmptyLevel);
SHG_DEFINE_ERROR(UnknownPlayer);
SHG_DEFINE_ERROR(SingularHessian);
SHG_DEFINE_ERROR(NotStationary);
SHG_DEFINE_ERROR(NotLasp);
SHG_DEFINE_ERROR(DependencyViolation);
SHG_DEFINE_ERROR(InvalidWeights);
SHG_DEFINE_ERROR(InvalidParams);
SHG_DEFINE_ERROR(BadNetworkFile);
SHG_DEFINE_ERROR(BadPartition);
SHG_DEFINE_ERROR(ConfigError);

#undef SHG_DEFINE_ERROR

// ---------------------------------------------------------------------------
// GameTree

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Per-dimension box bounds for one player. Empty means unbounded.
using Bounds = std::vector<Interval>;

class GameTree {
 public:
  int num_players() const { return static_cast<int>(level_.size()); }
  /// Number of levels L; the root is level 1, leaves are level L.
  int num_levels() const { return static_cast<int>(levels_.size()); }

  int level_of(PlayerId i) const;
  std::optional<PlayerId> parent_of(PlayerId i) const;
  const std::vector<PlayerId>& children_of(PlayerId i) const;
  /// Players at level l (1-based), in id order.
  const std::vector<PlayerId>& players_at(int level) const;
  const std::vector<PlayerId>& leaves() const { return levels_.back(); }
  bool is_leaf(PlayerId i) const { return level_of(i) == num_levels(); }
  PlayerId root() const { return 0; }

  int action_dim(PlayerId i) const;
  const Bounds& bounds(PlayerId i) const;
  bool bounded(PlayerId i) const { return !bounds(i).empty(); }

  /// Offset of x_i in the flat profile vector.
  int offset(PlayerId i) const;
  int total_dim() const { return total_dim_; }

  /// Position of leaf i among leaves() and its offset inside the stacked leaf vector.
  int leaf_index(PlayerId leaf) const;
  int leaf_offset(PlayerId leaf) const;
  int leaf_dim() const { return leaf_dim_; }

  /// Strict descendants of i in breadth-first order.
  std::vector<PlayerId> descendants(PlayerId i) const;
  /// Leaves in the subtree rooted at i (i itself if i is a leaf).
  std::vector<PlayerId> leaves_under(PlayerId i) const;
  bool is_ancestor(PlayerId ancestor, PlayerId i) const;

  void check_player(PlayerId i) const;

 private:
  friend GameTree build_tree(const std::vector<int>&, const std::map<PlayerId, PlayerId>&,
                             const std::map<PlayerId, int>&, const std::map<PlayerId, Bounds>&);

  std::vector<int> level_;
  std::vector<int> parent_;  // -1 for the root
  std::vector<std::vector<PlayerId>> children_;
  std::vector<std::vector<PlayerId>> levels_;
  std::vector<int> dim_;
  std::vector<Bounds> bounds_;
  std::vector<int> offset_;
  std::vector<int> leaf_index_;
  std::vector<int> leaf_offset_;
  int total_dim_ = 0;
  int leaf_dim_ = 0;
};

/// Builds and validates a tree. Players are numbered level-major: the root is
/// 0, level-2 players follow, and so on. `parents` maps every non-root player
/// to a player one level up; missing dims default to 1 and missing bounds to
/// unbounded.
GameTree build_tree(const std::vector<int>& level_sizes,
                    const std::map<PlayerId, PlayerId>& parents,
                    const std::map<PlayerId, int>& action_dims = {},
                    const std::map<PlayerId, Bounds>& bounds = {});

/// Tree where the children of each level are split as evenly as possible
/// (in id order) among the players of the level above.
GameTree build_balanced_tree(const std::vector<int>& level_sizes, int action_dim = 1,
                             std::optional<Interval> box = std::nullopt);

// ---------------------------------------------------------------------------
// ActionProfile

class ActionProfile {
 public:
  ActionProfile() = default;
  explicit ActionProfile(const GameTree& tree);
  ActionProfile(const GameTree& tree, Vector flat);

  const Vector& flat() const { return flat_; }
  Vector& flat() { return flat_; }
  int size() const { return static_cast<int>(flat_.size()); }
  const GameTree& tree() const { return *tree_; }

  /// x_i. The mutable overload writes through to flat().
  Eigen::VectorBlock<const Vector> slice(PlayerId i) const;
  Eigen::VectorBlock<Vector> slice(PlayerId i);

  /// Stacked leaf actions x_L.
  Vector leaf_actions() const;

 private:
  const GameTree* tree_ = nullptr;
  Vector flat_;
};

/// Clamps every bounded component into its interval.
ActionProfile project(const ActionProfile& profile, const GameTree& tree);
void project_in_place(Vector& flat, const GameTree& tree);

// ---------------------------------------------------------------------------
// UtilityOracle

/// Partial-derivative oracle for the players' utilities. Implementations
/// must be pure; all methods may be called concurrently.
class UtilityOracle {
 public:
  virtual ~UtilityOracle() = default;

  virtual double value(PlayerId i, const ActionProfile& x) const = 0;
  /// ∇_{x_wrt} u_i, length d_wrt.
  virtual Vector grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const = 0;
  /// ∇²_{x_a, x_b} u_i, d_a × d_b.
  virtual Matrix hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const = 0;
  /// Players whose actions may affect u_i, sorted.
  virtual std::vector<PlayerId> dependency_set(PlayerId i) const = 0;

  /// Gradient of u_i with respect to the whole flat profile.
  virtual Vector flat_grad(PlayerId i, const ActionProfile& x) const;
};

/// Oracle that gets every derivative from central finite differences of a
/// value function, step h = 1e-5 * max(1, |x_k|).
class FiniteDifferenceOracle : public UtilityOracle {
 public:
  using ValueFn = std::function<double(PlayerId, const ActionProfile&)>;

  FiniteDifferenceOracle(const GameTree& tree, ValueFn value,
                         std::vector<std::vector<PlayerId>> dependencies);

  double value(PlayerId i, const ActionProfile& x) const override;
  Vector grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const override;
  Matrix hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const override;
  std::vector<PlayerId> dependency_set(PlayerId i) const override;

 private:
  const GameTree* tree_;
  ValueFn value_;
  std::vector<std::vector<PlayerId>> deps_;
};

inline double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

/// A game instance: the tree plus its utility oracle.
struct Game {
  std::string name;
  std::shared_ptr<const GameTree> tree;
  std::shared_ptr<const UtilityOracle> oracle;

  const GameTree& shape() const { return *tree; }
  const UtilityOracle& utility() const { return *oracle; }
};

/// Dependency set {i, Pa(i)} ∪ leaves allowed by the hierarchy.
std::vector<PlayerId> hierarchical_dependencies(const GameTree& tree, PlayerId i);

}  // namespace shg
