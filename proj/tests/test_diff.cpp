#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shg/dbi.hpp"
#include "shg/diff.hpp"
#include "support.hpp"

using namespace shg;
using namespace shg::testing;

namespace {

// Two-player chain with leader utility p0 and follower utility p1 (x = var 0, y = var 1).
Game pair_game(Polynomial p0, Polynomial p1) { return make_polynomial("pair", chain(2), {std::move(p0), std::move(p1)}); }

ActionProfile at(const Game& g, std::initializer_list<double> v) {
  Vector f(static_cast<Eigen::Index>(v.size()));
  int k = 0;
  for (double e : v) f[k++] = e;
  return ActionProfile(g.shape(), f);
}

}  // namespace

TEST_CASE("local response Jacobian") {
  Polynomial x = var(0), y = var(1);
  SUBCASE("copying the parent") {
    Game g = pair_game(cst(0), -1.0 * ((y - x) * (y - x)));
    CHECK(local_response_jacobian(1, at(g, {0.3, -0.7}), g.utility())(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("-y^2 + 3xy") {
    Game g = pair_game(cst(0), -1.0 * (y * y) + 3.0 * (x * y));
    CHECK(local_response_jacobian(1, at(g, {0.3, 0.1}), g.utility())(0, 0) == doctest::Approx(1.5));
    // Against the argmax y*(x) = 1.5x, differenced.
    auto argmax = [&](double xv) {
      ActionProfile p = at(g, {xv, 0.0});
      return resolve_below(g, 0, p, Vector::Constant(1, xv)).flat()[1];
    };
    double h = 1e-5;
    CHECK((argmax(0.3 + h) - argmax(0.3 - h)) / (2 * h) == doctest::Approx(1.5).epsilon(1e-8));
  }
  SUBCASE("no parent dependence") {
    Game g = pair_game(cst(0), -1.0 * (y * y));
    CHECK(local_response_jacobian(1, at(g, {0.3, 0.1}), g.utility())(0, 0) == 0.0);
  }
  SUBCASE("flat follower") {
    Game g = pair_game(cst(0), x * y);
    CHECK_THROWS_AS(local_response_jacobian(1, at(g, {0.3, 0.1}), g.utility()), SingularHessian);
  }
}

TEST_CASE("leaf Jacobians") {
  Polynomial x = var(0), y = var(1), z = var(2);
  SUBCASE("two levels") {
    Game g = pair_game(cst(0), -1.0 * ((y - x) * (y - x)));
    LeafJacobian j = subtree_leaf_jacobian(0, at(g, {1, 2}), g.utility());
    CHECK(j.matrix.rows() == 1);
    CHECK(j.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(leaf_identity(1, g.shape()).matrix == Matrix::Identity(1, 1));
  }
  SUBCASE("three-level identity chain") {
    Game g = make_polynomial("chain", chain(3), {cst(0), -1.0 * ((y - x) * (y - x)), -1.0 * ((z - y) * (z - y))});
    CHECK(subtree_leaf_jacobian(0, at(g, {1, 2, 3}), g.utility()).matrix(0, 0) == doctest::Approx(1.0));
  }
  SUBCASE("leaf child without cross term") {
    // Root with two leaves; leaf 2 ignores the root.
    GameTree t = build_balanced_tree({1, 2});
    Game g = make_polynomial("fan", std::move(t),
                             {cst(0), -1.0 * ((y - x) * (y - x)), -1.0 * (z * z)});
    LeafJacobian j = subtree_leaf_jacobian(0, at(g, {1, 2, 3}), g.utility());
    CHECK(j.matrix(0, 0) == doctest::Approx(1.0));
    CHECK(j.matrix(1, 0) == 0.0);
  }
}

TEST_CASE("total gradient examples") {
  Polynomial x = var(0), y = var(1);
  SUBCASE("leaf equals partial gradient") {
    Game g = random_quadratic_game({1, 2, 2}, 2, 5);
    std::mt19937_64 rng(1);
    ActionProfile p(g.shape(), random_vector(g.shape().total_dim(), rng));
    for (PlayerId l : g.shape().leaves())
      CHECK((total_grad(l, p, g.utility()).vector - g.utility().grad(l, l, p)).norm() == 0.0);
  }
  SUBCASE("Stackelberg pair") {
    Game g = pair_game(-1.0 * ((x - y) * (x - y)), -1.0 * ((y - 2.0 * x) * (y - 2.0 * x)));
    ActionProfile p = at(g, {1.0, 2.0});  // follower on its response
    CHECK(total_grad(0, p, g.utility()).vector[0] == doctest::Approx(-2.0));
    CHECK(composition_grad(g, 0, p)[0] == doctest::Approx(-2.0).epsilon(1e-8));
    CHECK(total_hessian(0, p, g.utility())(0, 0) == doctest::Approx(-2.0).epsilon(1e-4));
  }
  SUBCASE("leaf Hessian") {
    Game g = single_player(-1.0 * (x * x));
    CHECK(total_hessian(0, at(g, {0.7}), g.utility())(0, 0) == doctest::Approx(-2.0).epsilon(1e-4));
  }
}

TEST_CASE("P111 near the reported point") {
  Game g = make_polynomial(PolynomialInstance::P111);
  ActionProfile rounded = at(g, {-0.34, 1.85, -1.08});
  // The reported point has two decimals; every total gradient is small there
  // and vanishes at the nearby solver fixed point.
  Vector field = total_gradient_field(rounded, g.utility());
  CHECK(field.norm() < 0.1);
  SolverConfig c;
  c.learning_rate = 1e-3;
  c.max_iters = 200000;
  c.grad_tol = 1e-8;
  c.init = rounded.flat();
  Trace t = dbi_solve(g, c);
  REQUIRE(t.converged);
  ActionProfile root(g.shape(), t.final);
  for (PlayerId i = 0; i < 3; ++i) {
    CHECK(total_grad(i, root, g.utility()).vector.norm() < 1e-2);
    CHECK(total_hessian(i, root, g.utility())(0, 0) < 0);
  }
  CHECK((t.final - rounded.flat()).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("descendant responses compose along paths") {
  Game g = random_quadratic_game({1, 2, 4}, 1, 9);
  std::mt19937_64 rng(2);
  ActionProfile p(g.shape(), random_vector(g.shape().total_dim(), rng));
  auto r = descendant_responses(0, p, g.utility());
  for (PlayerId leaf : g.shape().leaves()) {
    PlayerId mid = *g.shape().parent_of(leaf);
    Matrix expect = local_response_jacobian(leaf, p, g.utility()) * local_response_jacobian(mid, p, g.utility());
    CHECK((r.at(leaf) - expect).norm() < 1e-12);
  }
  Matrix leaf_jac = subtree_leaf_jacobian(0, p, g.utility()).matrix;
  for (PlayerId leaf : g.shape().leaves())
    CHECK((leaf_jac.row(g.shape().leaf_offset(leaf)) - r.at(leaf).row(0)).norm() < 1e-12);
}

TEST_CASE("chain path product") {
  for (int levels = 2; levels <= 5; ++levels)
    for (int dim = 1; dim <= 3; ++dim)
      for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Game g = random_quadratic_game(std::vector<int>(levels, 1), dim, 100 * levels + 10 * dim + seed);
        std::mt19937_64 rng(seed);
        ActionProfile p(g.shape(), random_vector(g.shape().total_dim(), rng));
        Matrix expect = chain_path_product(g, p);
        Matrix got = subtree_leaf_jacobian(0, p, g.utility()).matrix;
        CHECK((got - expect).norm() <= 1e-10 * std::max(1.0, expect.norm()));
      }
}

TEST_CASE("total gradient against the re-solved composition") {
  const std::vector<std::vector<int>> shapes{{1, 1}, {1, 3}, {1, 1, 1}, {1, 2, 4}, {1, 3, 3}};
  int games = 0;
  for (const auto& shape : shapes)
    for (int dim = 1; dim <= 2; ++dim)
      for (std::uint64_t seed = 0; seed < 12; ++seed) {
        Game g = random_quadratic_game(shape, dim, 1000 * shape.size() + 100 * shape.back() + 10 * dim + seed);
        std::mt19937_64 rng(seed + 77);
        ActionProfile p(g.shape(), random_vector(g.shape().total_dim(), rng));
        for (PlayerId i = 0; i < g.shape().num_players(); ++i) {
          if (g.shape().is_leaf(i)) continue;
          ActionProfile settled = settle_descendants(g, i, p);
          Vector expect = composition_grad(g, i, settled);
          Vector got = total_grad(i, settled, g.utility()).vector;
          CHECK((got - expect).norm() <= 1e-5 * expect.norm() + 1e-9);
        }
        ++games;
      }
  CHECK(games >= 100);
}

TEST_CASE("field is one bottom-up sweep") {
  Game g = random_quadratic_game({1, 2, 4}, 2, 4);
  std::mt19937_64 rng(8);
  ActionProfile p(g.shape(), random_vector(g.shape().total_dim(), rng));
  Vector f = total_gradient_field(p, g.utility());
  for (PlayerId i = 0; i < g.shape().num_players(); ++i)
    CHECK((f.segment(g.shape().offset(i), 2) - total_grad(i, p, g.utility()).vector).norm() < 1e-12);
}
