#include "shg/games.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#ifndef SHG_DATA_DIR
#define SHG_DATA_DIR "data"
#endif

namespace shg {

// ---------------------------------------------------------------------------
// WelfareHierarchyOracle

WelfareHierarchyOracle::WelfareHierarchyOracle(std::shared_ptr<const GameTree> tree,
                                               std::shared_ptr<const LeafModel> model, std::vector<double> kappa)
    : tree_(std::move(tree)), model_(std::move(model)), kappa_(std::move(kappa)) {
  if (tree_->num_levels() != 3) throw InvalidParams("welfare hierarchies have exactly 3 levels");
  if (model_->num_leaves() != static_cast<int>(tree_->leaves().size()) ||
      tree_->leaf_dim() != model_->num_leaves())
    throw InvalidParams("leaf model size does not match the tree");
  if (static_cast<int>(kappa_.size()) != tree_->num_players())
    throw InvalidParams("one non-compliance weight per player required");
  for (double k : kappa_)
    if (!(k >= 0 && k <= 1)) throw InvalidParams("non-compliance weights must lie in [0, 1]");
}

Vector WelfareHierarchyOracle::welfare_weights(PlayerId i) const {
  const GameTree& t = *tree_;
  Vector w = Vector::Zero(model_->num_leaves());
  if (i == t.root()) {
    w.setOnes();
  } else if (t.is_leaf(i)) {
    w[t.leaf_index(i)] = 1 - kappa_[i];
  } else {
    for (PlayerId j : t.children_of(i)) w[t.leaf_index(j)] = 1 - kappa_[i];
  }
  return w;
}

double WelfareHierarchyOracle::noncompliance_weight(PlayerId i) const {
  return i == tree_->root() ? 0.0 : kappa_[i];
}

double WelfareHierarchyOracle::value(PlayerId i, const ActionProfile& x) const {
  const GameTree& t = *tree_;
  Vector xl = x.leaf_actions();
  Vector w = welfare_weights(i);
  double u = 0.0;
  for (int j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) u += w[j] * model_->value(j, xl);
  if (auto p = t.parent_of(i)) {
    double d = x.slice(i)[0] - x.slice(*p)[0];
    u -= noncompliance_weight(i) * d * d;
  }
  return u;
}

Vector WelfareHierarchyOracle::flat_grad(PlayerId i, const ActionProfile& x) const {
  const GameTree& t = *tree_;
  Vector xl = x.leaf_actions();
  Vector w = welfare_weights(i);
  Vector gl = Vector::Zero(xl.size());
  for (int j = 0; j < w.size(); ++j)
    if (w[j] != 0.0) gl += w[j] * model_->grad(j, xl);
  Vector g = Vector::Zero(t.total_dim());
  for (PlayerId leaf : t.leaves()) g[t.offset(leaf)] = gl[t.leaf_index(leaf)];
  if (auto p = t.parent_of(i)) {
    double nc = 2 * noncompliance_weight(i) * (x.slice(i)[0] - x.slice(*p)[0]);
    g[t.offset(i)] -= nc;
    g[t.offset(*p)] += nc;
  }
  return g;
}

Vector WelfareHierarchyOracle::grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const {
  tree_->check_player(wrt);
  return flat_grad(i, x).segment(tree_->offset(wrt), 1);
}

Matrix WelfareHierarchyOracle::hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const {
  const GameTree& t = *tree_;
  t.check_player(a);
  t.check_player(b);
  double h = 0.0;
  if (t.is_leaf(a) && t.is_leaf(b)) {
    Vector xl = x.leaf_actions();
    Vector w = welfare_weights(i);
    int ia = t.leaf_index(a), ib = t.leaf_index(b);
    for (int j = 0; j < w.size(); ++j)
      if (w[j] != 0.0) h += w[j] * model_->hess(j, xl)(ia, ib);
  }
  if (auto p = t.parent_of(i)) {
    double nc = 2 * noncompliance_weight(i);
    bool ai = a == i, bi = b == i, ap = a == *p, bp = b == *p;
    if ((ai && bi) || (ap && bp)) h -= nc;
    if ((ai && bp) || (ap && bi)) h += nc;
  }
  return Matrix::Constant(1, 1, h);
}

std::vector<PlayerId> WelfareHierarchyOracle::dependency_set(PlayerId i) const {
  return hierarchical_dependencies(*tree_, i);
}

// ---------------------------------------------------------------------------
// Public goods

PublicGoodsModel::PublicGoodsModel(PublicGoodsParams params) : params_(std::move(params)) {
  const Matrix& g = params_.network;
  if (g.rows() != g.cols()) throw BadNetworkFile("network must be square");
  if (g.size() > 0 && (g - g.transpose()).cwiseAbs().maxCoeff() > 0)
    throw BadNetworkFile("network must be symmetric");
  if (g.size() > 0 && g.diagonal().cwiseAbs().maxCoeff() > 0) throw BadNetworkFile("network has self-loops");
}

double PublicGoodsModel::value(int leaf, const Vector& xl) const {
  const auto& p = params_;
  double xj = xl[leaf];
  double cost = p.cost == CostForm::Quadratic ? 0.5 * p.c * xj * xj : p.c * xj;
  return p.a + p.b * xj + xj * p.network.col(leaf).dot(xl) - cost;
}

Vector PublicGoodsModel::grad(int leaf, const Vector& xl) const {
  const auto& p = params_;
  double xj = xl[leaf];
  double dcost = p.cost == CostForm::Quadratic ? p.c * xj : p.c;
  Vector g = xj * p.network.col(leaf);
  g[leaf] += p.b + p.network.col(leaf).dot(xl) - dcost;
  return g;
}

Matrix PublicGoodsModel::hess(int leaf, const Vector& xl) const {
  const auto& p = params_;
  const int n = static_cast<int>(xl.size());
  Matrix h = Matrix::Zero(n, n);
  h.col(leaf) += p.network.col(leaf);
  h.row(leaf) += p.network.col(leaf).transpose();
  if (p.cost == CostForm::Quadratic) h(leaf, leaf) -= p.c;
  return h;
}

Matrix load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BadNetworkFile("cannot open network file " + path.string());
  std::vector<std::pair<int, int>> edges;
  int n = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int u, v;
    if (!(ss >> u)) continue;
    std::string rest;
    if (!(ss >> v) || (ss >> rest))
      throw BadNetworkFile(path.string() + ":" + std::to_string(lineno) + ": expected 'u v'");
    if (u < 1 || v < 1) throw BadNetworkFile(path.string() + ":" + std::to_string(lineno) + ": ids are 1-indexed");
    if (u == v) throw BadNetworkFile(path.string() + ":" + std::to_string(lineno) + ": self-loop");
    edges.emplace_back(u - 1, v - 1);
    n = std::max({n, u, v});
  }
  if (n == 0) throw BadNetworkFile("network file " + path.string() + " has no edges");
  Matrix g = Matrix::Zero(n, n);
  for (auto [u, v] : edges) g(u, v) = g(v, u) = 1.0;
  return g;
}

std::vector<int> load_partition(const std::filesystem::path& path, int members) {
  std::ifstream in(path);
  if (!in) throw BadPartition("cannot open partition file " + path.string());
  std::vector<int> group(members, -1);
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    int m, g;
    if (!(ss >> m)) continue;
    if (!(ss >> g) || m < 1 || m > members || g < 1) throw BadPartition("bad partition line '" + line + "'");
    group[m - 1] = g - 1;
  }
  for (int g : group)
    if (g < 0) throw BadPartition("partition does not cover every member");
  return group;
}

namespace {

GameTree grouped_tree(const std::vector<int>& partition, int groups) {
  const int n = static_cast<int>(partition.size());
  std::map<PlayerId, PlayerId> parents;
  std::map<PlayerId, Bounds> bounds;
  for (int g = 0; g < groups; ++g) parents[1 + g] = 0;
  for (int j = 0; j < n; ++j) parents[1 + groups + j] = 1 + partition[j];
  for (PlayerId i = 0; i < 1 + groups + n; ++i) bounds[i] = Bounds{Interval{0.0, 1.0}};
  return build_tree({1, groups, n}, parents, {}, bounds);
}

}  // namespace

Game make_public_goods(const PublicGoodsParams& params) {
  const int n = static_cast<int>(params.network.rows());
  if (static_cast<int>(params.partition.size()) != n) throw BadPartition("partition must cover every leaf");
  int groups = 0;
  for (int g : params.partition) {
    if (g < 0) throw BadPartition("negative group id");
    groups = std::max(groups, g + 1);
  }
  std::vector<bool> used(groups, false);
  for (int g : params.partition) used[g] = true;
  for (bool u : used)
    if (!u) throw BadPartition("empty group in partition");
  auto tree = std::make_shared<const GameTree>(grouped_tree(params.partition, groups));
  std::vector<double> kappa(tree->num_players(), params.kappa_leaf);
  kappa[0] = 0.0;
  for (int g = 0; g < groups; ++g) kappa[1 + g] = params.kappa_mid;
  auto model = std::make_shared<const PublicGoodsModel>(params);
  auto oracle = std::make_shared<const WelfareHierarchyOracle>(tree, model, kappa);
  return Game{"public_goods", tree, oracle};
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("SHG_DATA_DIR")) return env;
  return SHG_DATA_DIR;
}

PublicGoodsParams karate_public_goods(const std::filesystem::path& data_dir) {
  PublicGoodsParams p;
  p.network = load_edge_list(data_dir / "karate.edgelist");
  p.partition = load_partition(data_dir / "karate_factions.txt", static_cast<int>(p.network.rows()));
  return p;
}

// ---------------------------------------------------------------------------
// Security

SecurityModel::SecurityModel(int leaves, SecurityParams params) : leaves_(leaves), params_(std::move(params)) {
  if (!(params_.q >= 0 && params_.q <= 1)) throw InvalidParams("q must lie in [0, 1]");
  if (!(params_.cost >= 0)) throw InvalidParams("investment cost must be non-negative");
  if (!(params_.kappa >= 0 && params_.kappa <= 1)) throw InvalidParams("kappa must lie in [0, 1]");
  if (leaves_ < 1) throw InvalidParams("security game needs defenders");
}

Vector SecurityModel::attack_distribution(const Vector& xl) const {
  Vector z = params_.sharpness * (Vector::Ones(xl.size()) - xl);
  Vector e = (z.array() - z.maxCoeff()).exp();
  return e / e.sum();
}

namespace {

// Payoff of defender i when defender k is attacked, and its derivatives.
struct OutcomeTerms {
  int n;
  int i;
  double q;
  Vector s;  // 1 / (1 + x)

  double f(int k) const { return k == i ? 1 - s[i] : 1 - q * s[k] * s[i]; }
  double df(int k, int m) const {
    if (k == i) return m == i ? s[i] * s[i] : 0.0;
    if (m == k) return q * s[i] * s[k] * s[k];
    if (m == i) return q * s[k] * s[i] * s[i];
    return 0.0;
  }
  double d2f(int k, int m, int p) const {
    if (k == i) return (m == i && p == i) ? -2 * s[i] * s[i] * s[i] : 0.0;
    if (m == k && p == k) return -2 * q * s[i] * s[k] * s[k] * s[k];
    if (m == i && p == i) return -2 * q * s[k] * s[i] * s[i] * s[i];
    if ((m == i && p == k) || (m == k && p == i)) return -q * s[i] * s[i] * s[k] * s[k];
    return 0.0;
  }
};

OutcomeTerms outcome_terms(int i, double q, const Vector& xl) {
  return {static_cast<int>(xl.size()), i, q, (1.0 + xl.array()).inverse().matrix()};
}

}  // namespace

double SecurityModel::value(int leaf, const Vector& xl) const {
  Vector a = attack_distribution(xl);
  auto t = outcome_terms(leaf, params_.q, xl);
  double u = -params_.cost * xl[leaf];
  for (int k = 0; k < t.n; ++k) u += a[k] * t.f(k);
  return u;
}

Vector SecurityModel::grad(int leaf, const Vector& xl) const {
  const int n = static_cast<int>(xl.size());
  const double lam = params_.sharpness;
  Vector a = attack_distribution(xl);
  auto t = outcome_terms(leaf, params_.q, xl);
  Vector g = Vector::Zero(n);
  for (int m = 0; m < n; ++m) {
    double v = 0.0;
    for (int k = 0; k < n; ++k) {
      double da = -lam * a[k] * ((k == m) - a[m]);
      v += da * t.f(k) + a[k] * t.df(k, m);
    }
    g[m] = v;
  }
  g[leaf] -= params_.cost;
  return g;
}

Matrix SecurityModel::hess(int leaf, const Vector& xl) const {
  const int n = static_cast<int>(xl.size());
  const double lam = params_.sharpness;
  Vector a = attack_distribution(xl);
  auto t = outcome_terms(leaf, params_.q, xl);
  auto da = [&](int k, int m) { return -lam * a[k] * ((k == m) - a[m]); };
  auto d2a = [&](int k, int m, int p) {
    return lam * lam * (a[k] * ((k == p) - a[p]) * ((k == m) - a[m]) - a[k] * a[m] * ((m == p) - a[p]));
  };
  Matrix h = Matrix::Zero(n, n);
  for (int m = 0; m < n; ++m)
    for (int p = m; p < n; ++p) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        v += d2a(k, m, p) * t.f(k) + da(k, m) * t.df(k, p) + da(k, p) * t.df(k, m) + a[k] * t.d2f(k, m, p);
      h(m, p) = h(p, m) = v;
    }
  return h;
}

Game make_security(const SecurityParams& params) {
  if (params.shape.size() != 3) throw InvalidParams("security games have 3 levels");
  auto tree = std::make_shared<const GameTree>(build_balanced_tree(params.shape, 1, Interval{0.0, 1.0}));
  auto model = std::make_shared<const SecurityModel>(params.shape.back(), params);
  std::vector<double> kappa(tree->num_players(), params.kappa);
  kappa[0] = 0.0;
  auto oracle = std::make_shared<const WelfareHierarchyOracle>(tree, model, kappa);
  return Game{"security", tree, oracle};
}

}  // namespace shg
