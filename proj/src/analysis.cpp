#include "shg/analysis.hpp"

#include "shg/dbi.hpp"
#include "shg/diff.hpp"
#include "shg/fields.hpp"
#include "shg/games.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <limits>
#include <random>
#include <thread>

namespace shg {

std::string to_string(Stability s) {
  switch (s) {
    case Stability::Lasp: return "lasp";
    case Stability::Unstable: return "unstable";
    case Stability::Marginal: return "marginal";
  }
  return "?";
}

std::string to_string(Definiteness d) {
  switch (d) {
    case Definiteness::NegativeDefinite: return "negative_definite";
    case Definiteness::NotNegativeDefinite: return "not_negative_definite";
    case Definiteness::Indeterminate: return "indeterminate";
    case Definiteness::Pinned: return "pinned";
  }
  return "?";
}

Stability classify_eigenvalues(const ComplexVector& eigenvalues, double tol) {
  bool all_negative = true;
  for (const auto& l : eigenvalues) {
    if (l.real() > tol) return Stability::Unstable;
    if (l.real() >= -tol) all_negative = false;
  }
  return all_negative ? Stability::Lasp : Stability::Marginal;
}

double max_stable_lr(const ComplexVector& eigenvalues) {
  if (eigenvalues.size() == 0) throw NotLasp("no eigenvalues");
  // argmax Re/|λ|² is the argmin of the bound -2 Re/|λ|²; equal ratios give equal bounds.
  double bound = std::numeric_limits<double>::infinity();
  for (const auto& l : eigenvalues) {
    if (!(l.real() < 0)) throw NotLasp("eigenvalue with non-negative real part");
    bound = std::min(bound, -2.0 * l.real() / std::norm(l));
  }
  return bound;
}

double contraction_factor(const Matrix& jacobian, double alpha) {
  Matrix m = Matrix::Identity(jacobian.rows(), jacobian.cols()) + alpha * jacobian;
  Eigen::EigenSolver<Matrix> es(m, false);
  return 1.0 - es.eigenvalues().cwiseAbs().maxCoeff();
}

StabilityReport classify_jacobian(const Matrix& jacobian, double tol, std::optional<double> alpha) {
  StabilityReport r;
  Eigen::EigenSolver<Matrix> es(jacobian, false);
  r.eigenvalues = es.eigenvalues();
  r.classification = classify_eigenvalues(r.eigenvalues, tol);
  if (r.classification == Stability::Lasp) r.lr_bound = max_stable_lr(r.eigenvalues);
  if (alpha) {
    r.alpha = alpha;
    r.contraction = contraction_factor(jacobian, *alpha);
  }
  return r;
}

Matrix dbi_jacobian(const Game& game, const ActionProfile& x) {
  return field_jacobian([&game](const ActionProfile& p) { return dbi_field(game, p); }, x, 1e-6);
}

namespace {

double stationarity(const Game& game, const ActionProfile& x, double limit) {
  Vector g = dbi_field(game, x);
  double norm = projected_field(game.shape(), x.flat(), g).norm();
  if (!(norm < limit))
    throw NotStationary("field norm " + std::to_string(norm) + " is not below " + std::to_string(limit));
  return norm;
}

}  // namespace

StabilityReport classify_lasp(const Game& game, const ActionProfile& x, double tol, double stationarity_tol,
                              std::optional<double> alpha) {
  double norm = stationarity(game, x, stationarity_tol);
  StabilityReport r = classify_jacobian(dbi_jacobian(game, x), tol, alpha);
  r.field_norm = norm;
  return r;
}

LspeResult check_lspe(const Game& game, const ActionProfile& x, double tol, double stationarity_tol) {
  stationarity(game, x, stationarity_tol);
  const GameTree& tree = game.shape();
  Vector g = dbi_field(game, x);
  Vector pg = projected_field(tree, x.flat(), g);
  LspeResult out;
  out.is_lspe = true;
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    std::vector<int> free;
    const Bounds& b = tree.bounds(i);
    for (int k = 0; k < tree.action_dim(i); ++k) {
      int idx = tree.offset(i) + k;
      bool pinned = !b.empty() && pg[idx] == 0.0 && g[idx] != 0.0 &&
                    (x.flat()[idx] <= b[k].lo || x.flat()[idx] >= b[k].hi);
      if (!pinned) free.push_back(k);
    }
    if (free.empty()) {
      out.flags.push_back(Definiteness::Pinned);
      out.eigenvalues.emplace_back();
      continue;
    }
    Matrix h = total_hessian(i, x, game.utility());
    Matrix sub(free.size(), free.size());
    for (std::size_t r = 0; r < free.size(); ++r)
      for (std::size_t c = 0; c < free.size(); ++c) sub(r, c) = h(free[r], free[c]);
    Eigen::SelfAdjointEigenSolver<Matrix> es((sub + sub.transpose()) / 2, Eigen::EigenvaluesOnly);
    Vector ev = es.eigenvalues();
    out.eigenvalues.emplace_back(ev.data(), ev.data() + ev.size());
    double top = ev.maxCoeff();
    Definiteness d = top < -tol  ? Definiteness::NegativeDefinite
                     : top > tol ? Definiteness::NotNegativeDefinite
                                 : Definiteness::Indeterminate;
    if (d != Definiteness::NegativeDefinite) out.is_lspe = false;
    out.flags.push_back(d);
  }
  return out;
}

StabilityReport analyze_point(const Game& game, const ActionProfile& x, double tol, double stationarity_tol,
                              std::optional<double> alpha) {
  StabilityReport r = classify_lasp(game, x, tol, stationarity_tol, alpha);
  r.lspe = check_lspe(game, x, tol, stationarity_tol);
  return r;
}

// ---------------------------------------------------------------------------

namespace {

// All exponent vectors over `vars` variables with total degree <= max_degree.
void exponents(int vars, int max_degree, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (static_cast<int>(cur.size()) == vars) {
    out.push_back(cur);
    return;
  }
  int used = 0;
  for (int e : cur) used += e;
  for (int p = 0; p + used <= max_degree; ++p) {
    cur.push_back(p);
    exponents(vars, max_degree, cur, out);
    cur.pop_back();
  }
}

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Game random_polynomial_game(const GameClass& cls, std::uint64_t seed) {
  GameTree tree = build_balanced_tree(cls.shape);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> cont(-1.0, 1.0);
  int c = cls.coefficient_bound.value_or(0);
  std::uniform_int_distribution<int> ints(-c, c);
  std::vector<Polynomial> us;
  for (PlayerId i = 0; i < tree.num_players(); ++i) {
    std::vector<PlayerId> deps = hierarchical_dependencies(tree, i);
    std::vector<std::vector<int>> exps;
    std::vector<int> cur;
    exponents(static_cast<int>(deps.size()), cls.max_degree, cur, exps);
    Polynomial p;
    for (const auto& e : exps) {
      double coef = cls.coefficient_bound ? ints(rng) : cont(rng);
      std::vector<std::pair<int, int>> powers;
      for (std::size_t k = 0; k < deps.size(); ++k)
        if (e[k] > 0) powers.emplace_back(tree.offset(deps[k]), e[k]);
      if (coef != 0.0) p.add_term(coef, powers);
    }
    us.push_back(std::move(p));
  }
  return make_polynomial("random_polynomial", std::move(tree), std::move(us));
}

std::vector<Vector> find_critical_points(const Game& game, std::uint64_t seed, const MeasureOptions& options) {
  const GameTree& tree = game.shape();
  const int d = tree.total_dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> start(-options.box, options.box);
  std::vector<Vector> found;
  auto field = [&game](const ActionProfile& p) { return dbi_field(game, p); };
  for (int s = 0; s < options.starts; ++s) {
    Vector x0(d);
    for (int k = 0; k < d; ++k) x0[k] = start(rng);
    try {
      ActionProfile x(tree, x0);
      Vector g = field(x);
      double norm = g.norm();
      for (int it = 0; it < options.newton_iters && norm > options.root_tol; ++it) {
        Matrix j = field_jacobian(field, x, 1e-6);
        Eigen::FullPivLU<Matrix> lu(j);
        if (!lu.isInvertible()) break;
        Vector step = lu.solve(g);
        if (!step.allFinite()) break;
        // Backtrack on the residual norm.
        double t = 1.0;
        bool moved = false;
        for (int b = 0; b < 30; ++b, t /= 2) {
          ActionProfile trial(tree, x.flat() - t * step);
          Vector gt = field(trial);
          if (gt.allFinite() && gt.norm() < norm) {
            x = trial;
            g = gt;
            norm = gt.norm();
            moved = true;
            break;
          }
        }
        if (!moved || x.flat().cwiseAbs().maxCoeff() > 1e4) break;
      }
      if (!(norm <= options.root_tol * 1e3)) continue;
      bool duplicate = false;
      for (const Vector& f : found)
        if ((f - x.flat()).norm() < options.dedup_radius) duplicate = true;
      if (!duplicate) found.push_back(x.flat());
    } catch (const SingularHessian&) {
      continue;
    }
  }
  return found;
}

MeasureResult measure_properties(const GameGenerator& generator, int instances, std::uint64_t seed,
                                 const MeasureOptions& options) {
  if (instances < 1) throw ConfigError("need at least one instance");
  struct Outcome {
    bool critical = false, lasp = false, lspe = false;
  };
  std::vector<Outcome> outcomes(instances);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (int k; (k = next.fetch_add(1)) < instances;) {
      std::uint64_t s = splitmix(seed ^ splitmix(static_cast<std::uint64_t>(k)));
      Game game = generator(s);
      auto points = find_critical_points(game, splitmix(s), options);
      Outcome& o = outcomes[k];
      o.critical = !points.empty();
      for (const Vector& p : points) {
        try {
          ActionProfile x(game.shape(), p);
          StabilityReport r = classify_lasp(game, x, options.lasp_tol, std::numeric_limits<double>::infinity());
          if (r.classification != Stability::Lasp) continue;
          o.lasp = true;
          if (check_lspe(game, x, options.lasp_tol, std::numeric_limits<double>::infinity()).is_lspe) o.lspe = true;
        } catch (const SingularHessian&) {
        }
        if (o.lspe) break;
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, instances);
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  MeasureResult r;
  r.instances = instances;
  for (const Outcome& o : outcomes) {
    r.with_critical_point += o.critical;
    r.with_lasp += o.lasp;
    r.with_lspe += o.lspe;
  }
  r.pct_lasp = 100.0 * r.with_lasp / instances;
  r.pct_lspe = r.with_lasp ? 100.0 * r.with_lspe / r.with_lasp : 0.0;
  return r;
}

MeasureResult measure_properties(const GameClass& cls, int instances, std::uint64_t seed,
                                 const MeasureOptions& options) {
  return measure_properties([&cls](std::uint64_t s) { return random_polynomial_game(cls, s); }, instances, seed,
                            options);
}

}  // namespace shg
