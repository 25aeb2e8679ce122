#include "shg/games.hpp"

#include <random>
#include <string>

namespace shg {

EpidemicParams epidemic_defaults(std::vector<int> shape, std::uint64_t seed) {
  if (shape.size() != 2 && shape.size() != 3) throw InvalidParams("epidemic games have 2 or 3 levels");
  EpidemicParams p;
  p.shape = shape;
  p.seed = seed;
  int players = 0;
  for (int s : shape) players += s;
  int leaves = shape.back();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pop(1e4, 1e6);
  for (int a = 0; a < leaves; ++a) {
    p.population.push_back(pop(rng));
    p.initial_infected.push_back(0.01 * p.population.back());
  }

  p.kappa.assign(players, 0.5);
  p.eta.assign(players, 0.2);
  p.eta[0] = 0.0;
  if (shape.size() == 2) {
    p.kappa[0] = 0.2;
  } else {
    p.kappa[0] = 0.8;
    double county_eta = leaves == 4 ? 0.3 : 0.2;
    for (int i = 1 + shape[1]; i < players; ++i) p.eta[i] = county_eta;
  }
  return p;
}

EpidemicOracle::EpidemicOracle(std::shared_ptr<const GameTree> tree, EpidemicParams params)
    : tree_(std::move(tree)), params_(std::move(params)) {
  const int n = tree_->num_players();
  const int nl = static_cast<int>(tree_->leaves().size());
  if (tree_->leaf_dim() != nl) throw InvalidParams("epidemic actions are scalar");
  if (static_cast<int>(params_.population.size()) != nl || static_cast<int>(params_.initial_infected.size()) != nl)
    throw InvalidParams("one population and infected count per leaf required");
  if (static_cast<int>(params_.kappa.size()) != n || static_cast<int>(params_.eta.size()) != n)
    throw InvalidWeights("one kappa and eta per player required");
  if (!(params_.infection_prob >= 0 && params_.infection_prob <= 1))
    throw InvalidParams("infection probability must lie in [0, 1]");
  if (!(params_.contacts >= 0)) throw InvalidParams("contact rate must be non-negative");
  for (int a = 0; a < nl; ++a) {
    if (!(params_.population[a] > 0)) throw InvalidParams("populations must be positive");
    if (!(params_.initial_infected[a] >= 0 && params_.initial_infected[a] <= params_.population[a]))
      throw InvalidParams("initially infected must lie in [0, N]");
  }
  for (PlayerId i = 0; i < n; ++i) {
    double k = params_.kappa[i], e = params_.eta[i];
    if (i == tree_->root()) {
      if (!(k >= 0 && k <= 1)) throw InvalidWeights("government kappa must lie in [0, 1]");
    } else if (!(k >= 0 && e >= 0 && k + e <= 1)) {
      throw InvalidWeights("player " + std::to_string(i) + " needs kappa, eta >= 0 and kappa + eta <= 1");
    }
  }
  Matrix r = params_.transport ? *params_.transport : Matrix::Constant(nl, nl, 1.0 / nl);
  if (r.rows() != nl || r.cols() != nl) throw InvalidParams("transport matrix must be n_L x n_L");
  if ((r.array() < 0).any()) throw InvalidParams("transport entries must be non-negative");
  params_.transport = r;

  // County a: C^inc_a = K_a x_a Σ_a' r_aa' N^init_a' x_a'.
  Vector scale(nl);
  for (int a = 0; a < nl; ++a) {
    double na = params_.population[a];
    scale[a] = params_.infection_prob * params_.contacts * (na - params_.initial_infected[a]) / (na * na);
  }
  Vector infected = Eigen::Map<const Vector>(params_.initial_infected.data(), nl);

  incidence_form_.resize(n);
  decision_weight_.resize(n);
  for (PlayerId i = 0; i < n; ++i) {
    auto leaves = tree_->leaves_under(i);
    double total = 0.0;
    for (PlayerId leaf : leaves) total += params_.population[tree_->leaf_index(leaf)];
    Matrix q = Matrix::Zero(nl, nl);
    Vector w = Vector::Zero(nl);
    for (PlayerId leaf : leaves) {
      int a = tree_->leaf_index(leaf);
      double weight = params_.population[a] / total;
      w[a] = weight;
      q.row(a) += weight * scale[a] * r.row(a).cwiseProduct(infected.transpose());
    }
    incidence_form_[i] = (q + q.transpose()) / 2;
    decision_weight_[i] = w;
  }
}

double EpidemicOracle::incidence_cost(PlayerId i, const ActionProfile& x) const {
  Vector xl = x.leaf_actions();
  return xl.dot(incidence_form_.at(i) * xl);
}

double EpidemicOracle::decision_cost(PlayerId i, const ActionProfile& x) const {
  Vector xl = x.leaf_actions();
  return decision_weight_.at(i).dot(Vector::Ones(xl.size()) - xl);
}

double EpidemicOracle::noncompliance_cost(PlayerId i, const ActionProfile& x) const {
  auto p = tree_->parent_of(i);
  if (!p) return 0.0;
  double diff = x.slice(i)[0] - x.slice(*p)[0];
  return diff * diff;
}

double EpidemicOracle::value(PlayerId i, const ActionProfile& x) const {
  double k = params_.kappa.at(i);
  if (i == tree_->root()) return -(k * incidence_cost(i, x) + (1 - k) * decision_cost(i, x));
  double e = params_.eta.at(i);
  return -(k * incidence_cost(i, x) + e * decision_cost(i, x) + (1 - k - e) * noncompliance_cost(i, x));
}

Vector EpidemicOracle::flat_grad(PlayerId i, const ActionProfile& x) const {
  const GameTree& t = *tree_;
  double k = params_.kappa.at(i);
  double e = i == t.root() ? 1 - k : params_.eta.at(i);
  Vector xl = x.leaf_actions();
  Vector gl = -(2 * k * (incidence_form_[i] * xl) - e * decision_weight_[i]);
  Vector g = Vector::Zero(t.total_dim());
  for (PlayerId leaf : t.leaves()) g[t.offset(leaf)] = gl[t.leaf_index(leaf)];
  if (auto p = t.parent_of(i)) {
    double nc = 2 * (1 - k - e) * (x.slice(i)[0] - x.slice(*p)[0]);
    g[t.offset(i)] -= nc;
    g[t.offset(*p)] += nc;
  }
  return g;
}

Vector EpidemicOracle::grad(PlayerId i, PlayerId wrt, const ActionProfile& x) const {
  tree_->check_player(wrt);
  return flat_grad(i, x).segment(tree_->offset(wrt), 1);
}

Matrix EpidemicOracle::hess(PlayerId i, PlayerId a, PlayerId b, const ActionProfile& x) const {
  (void)x;
  const GameTree& t = *tree_;
  t.check_player(a);
  t.check_player(b);
  double k = params_.kappa.at(i);
  double h = 0.0;
  if (t.is_leaf(a) && t.is_leaf(b)) h -= 2 * k * incidence_form_[i](t.leaf_index(a), t.leaf_index(b));
  if (auto p = t.parent_of(i)) {
    double nc = 2 * (1 - k - params_.eta.at(i));
    bool ai = a == i, bi = b == i, ap = a == *p, bp = b == *p;
    if ((ai && bi) || (ap && bp)) h -= nc;
    if ((ai && bp) || (ap && bi)) h += nc;
  }
  return Matrix::Constant(1, 1, h);
}

std::vector<PlayerId> EpidemicOracle::dependency_set(PlayerId i) const {
  return hierarchical_dependencies(*tree_, i);
}

Game make_epidemic(const EpidemicParams& params) {
  EpidemicParams p = params;
  if (p.kappa.empty() || p.eta.empty() || p.population.empty()) {
    EpidemicParams d = epidemic_defaults(p.shape, p.seed);
    if (p.kappa.empty()) p.kappa = d.kappa;
    if (p.eta.empty()) p.eta = d.eta;
    if (p.population.empty()) {
      p.population = d.population;
      if (p.initial_infected.empty()) p.initial_infected = d.initial_infected;
    }
  }
  if (p.initial_infected.empty())
    for (double n : p.population) p.initial_infected.push_back(0.01 * n);
  auto tree = std::make_shared<const GameTree>(build_balanced_tree(p.shape, 1, Interval{0.0, 1.0}));
  std::string name = "epidemic";
  for (int s : p.shape) name += "_" + std::to_string(s);
  auto oracle = std::make_shared<const EpidemicOracle>(tree, std::move(p));
  return Game{name, tree, oracle};
}

}  // namespace shg
