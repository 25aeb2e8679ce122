// Built-in game families with analytic partial derivatives.
#pragma once

#include "shg/core.hpp"
#include "shg/polynomial.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace shg {

// ---------------------------------------------------------------------------
// Polynomial games

class PolynomialOracle : public UtilityOracle {
 public:
  /// Throws DependencyViolation if some u_i touches a player outside
  /// {i, Pa(i)} ∪ leaves.
  PolynomialOracle(std::shared_ptr<const GameTree> tree, std::vector<Polynomial> utilities);

  double value(PlayerId i, const ActionProfile& x) const override;
  Vector grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const override;
  Matrix hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const override;
  std::vector<PlayerId> dependency_set(PlayerId i) const override;
  Vector flat_grad(PlayerId i, const ActionProfile& x) const override;

  const Polynomial& utility(PlayerId i) const { return utilities_.at(i); }

 private:
  std::shared_ptr<const GameTree> tree_;
  std::vector<Polynomial> utilities_;
};

enum class PolynomialInstance { P111, P112, P111_3D };

/// The fixed (1,1,1), (1,1,2) and 3-d (1,1,1) benchmark games.
Game make_polynomial(PolynomialInstance instance);
Game make_polynomial(std::string name, GameTree tree, std::vector<Polynomial> utilities);

// ---------------------------------------------------------------------------
// Epidemic policy game (costs are negated into utilities)

struct EpidemicParams {
  /// (1, n) or (1, n2, n3); leaves are split evenly among level-2 players.
  std::vector<int> shape{1, 20};
  double contacts = 20.0;           // M
  double infection_prob = 0.3;      // μ
  /// Per-leaf populations and initially infected counts. Drawn from the seed
  /// when empty: N ~ U[1e4, 1e6], N_init = 1% of N.
  std::vector<double> population;
  std::vector<double> initial_infected;
  /// r_{aa'}; defaults to 1/n_L everywhere.
  std::optional<Matrix> transport;
  /// Per-player weights by id. Empty means the defaults for the shape.
  std::vector<double> kappa;
  std::vector<double> eta;
  std::uint64_t seed = 0;
};

/// Fills weights (and populations from the seed) with the defaults for the shape:
/// 2 levels: government κ=0.2; leaves κ=0.5, η=0.2.
/// 3 levels: government κ=0.8; states κ=0.5, η=0.2; counties κ=0.5 and
/// η=0.3 when there are 4 counties, 0.2 otherwise.
EpidemicParams epidemic_defaults(std::vector<int> shape, std::uint64_t seed = 0);

class EpidemicOracle : public UtilityOracle {
 public:
  EpidemicOracle(std::shared_ptr<const GameTree> tree, EpidemicParams params);

  double value(PlayerId i, const ActionProfile& x) const override;
  Vector grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const override;
  Matrix hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const override;
  std::vector<PlayerId> dependency_set(PlayerId i) const override;
  Vector flat_grad(PlayerId i, const ActionProfile& x) const override;

  /// Cost components of player i.
  double incidence_cost(PlayerId i, const ActionProfile& x) const;
  double decision_cost(PlayerId i, const ActionProfile& x) const;
  double noncompliance_cost(PlayerId i, const ActionProfile& x) const;
  const EpidemicParams& params() const { return params_; }

 private:
  std::shared_ptr<const GameTree> tree_;
  EpidemicParams params_;
  std::vector<Matrix> incidence_form_;   // symmetric Q_i: C^inc_i = x_Lᵀ Q_i x_L
  std::vector<Vector> decision_weight_;  // w_i: C^dec_i = Σ_a w_ia (1 - x_a)
};

Game make_epidemic(const EpidemicParams& params);

// ---------------------------------------------------------------------------
// Three-level welfare hierarchies (public goods, security)

/// Utility model on the stacked leaf vector.
class LeafModel {
 public:
  virtual ~LeafModel() = default;
  virtual int num_leaves() const = 0;
  virtual double value(int leaf, const Vector& xl) const = 0;
  virtual Vector grad(int leaf, const Vector& xl) const = 0;
  virtual Matrix hess(int leaf, const Vector& xl) const = 0;
};

/// Leaves earn (1-κ3) u_j - κ3 (x_j - x_Pa)², level-2 players earn
/// (1-κ2) Σ_{children} u_j - κ2 (x_i - x_root)², the root earns Σ_j u_j.
class WelfareHierarchyOracle : public UtilityOracle {
 public:
  WelfareHierarchyOracle(std::shared_ptr<const GameTree> tree, std::shared_ptr<const LeafModel> model,
                         std::vector<double> kappa);

  double value(PlayerId i, const ActionProfile& x) const override;
  Vector grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const override;
  Matrix hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const override;
  std::vector<PlayerId> dependency_set(PlayerId i) const override;
  Vector flat_grad(PlayerId i, const ActionProfile& x) const override;

  const LeafModel& model() const { return *model_; }

 private:
  // Leaf-space weights of u_j in U_i.
  Vector welfare_weights(PlayerId i) const;
  double noncompliance_weight(PlayerId i) const;

  std::shared_ptr<const GameTree> tree_;
  std::shared_ptr<const LeafModel> model_;
  std::vector<double> kappa_;
};

enum class CostForm { Quadratic, Linear };

struct PublicGoodsParams {
  Matrix network;                 // symmetric adjacency g_{ji}, zero diagonal
  std::vector<int> partition;     // level-2 group (0-based) of each leaf
  double a = 0.0, b = 1.0, c = 6.0;
  double kappa_mid = 0.5, kappa_leaf = 0.5;
  /// c_i(x) = (c/2)x² (quadratic) or c·x (linear).
  CostForm cost = CostForm::Quadratic;
};

class PublicGoodsModel : public LeafModel {
 public:
  explicit PublicGoodsModel(PublicGoodsParams params);
  int num_leaves() const override { return static_cast<int>(params_.network.rows()); }
  double value(int leaf, const Vector& xl) const override;
  Vector grad(int leaf, const Vector& xl) const override;
  Matrix hess(int leaf, const Vector& xl) const override;

 private:
  PublicGoodsParams params_;
};

/// Reads `u v` pairs (1-indexed, `#` comments) into a symmetric 0/1 adjacency.
Matrix load_edge_list(const std::filesystem::path& path);
/// Reads `member group` pairs (1-indexed) into 0-based groups per member.
std::vector<int> load_partition(const std::filesystem::path& path, int members);

Game make_public_goods(const PublicGoodsParams& params);
/// The 34-member karate club split into its two factions.
PublicGoodsParams karate_public_goods(const std::filesystem::path& data_dir);
std::filesystem::path default_data_dir();

struct SecurityParams {
  std::vector<int> shape{1, 3, 6};
  double q = 0.5;        // interdependence probability, uniform over pairs
  double cost = 0.2;     // c_i
  double sharpness = 5;  // λ
  double kappa = 0.5;
};

class SecurityModel : public LeafModel {
 public:
  SecurityModel(int leaves, SecurityParams params);
  int num_leaves() const override { return leaves_; }
  double value(int leaf, const Vector& xl) const override;
  Vector grad(int leaf, const Vector& xl) const override;
  Matrix hess(int leaf, const Vector& xl) const override;
  /// softmax(λ(1 - x_L)).
  Vector attack_distribution(const Vector& xl) const;

 private:
  int leaves_;
  SecurityParams params_;
};

Game make_security(const SecurityParams& params);

// ---------------------------------------------------------------------------

/// Built-in games by name: p111, p112, p111_3d, epidemic_1_20, epidemic_1_50,
/// epidemic_1_2_4, epidemic_1_2_10, public_goods, security_k01, security_k05.
Game make_builtin(const std::string& name, std::uint64_t seed = 0);
std::vector<std::string> builtin_names();

}  // namespace shg
