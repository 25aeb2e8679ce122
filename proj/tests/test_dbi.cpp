#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "shg/analysis.hpp"
#include "shg/dbi.hpp"
#include "support.hpp"

using namespace shg;
using namespace shg::testing;

TEST_CASE("one step on -x^2") {
  Game g = single_player(-1.0 * (var(0) * var(0)));
  SolverConfig c;
  c.learning_rate = 0.1;
  auto [next, field] = dbi_step(ActionProfile(g.shape(), Vector::Constant(1, 1.0)), g, c);
  CHECK(next.flat()[0] == doctest::Approx(0.8));
  CHECK(field[0] == doctest::Approx(-2.0));
}

TEST_CASE("steps are projected") {
  Game g = single_player(3.0 * var(0), Interval{0.0, 1.0});
  SolverConfig c;
  c.learning_rate = 0.5;
  auto [next, field] = dbi_step(ActionProfile(g.shape(), Vector::Constant(1, 0.9)), g, c);
  CHECK(next.flat()[0] == 1.0);
  c.init = Vector::Constant(1, 0.2);
  c.max_iters = 50;
  Trace t = dbi_solve(g, c);
  // Pinned at the bound: the projected field is zero.
  CHECK(t.converged);
  CHECK(t.final[0] == 1.0);
  CHECK(t.entries.back().field_norm == 0.0);
  CHECK(t.entries.back().total_grad_norm == doctest::Approx(3.0));
}

TEST_CASE("fixed points stay put") {
  Game g = random_quadratic_game({1, 2}, 1, 3);
  // Solve the DBI first-order system by Newton with the exact (constant) Jacobian.
  ActionProfile x(g.shape());
  for (int it = 0; it < 5; ++it) {
    Matrix j = dbi_jacobian(g, x);
    x.flat() -= j.fullPivLu().solve(dbi_field(g, x));
  }
  REQUIRE(dbi_field(g, x).norm() < 1e-9);
  SolverConfig c;
  c.learning_rate = 0.05;
  auto [next, field] = dbi_step(x, g, c);
  CHECK((next.flat() - x.flat()).norm() < 1e-10);
}

TEST_CASE("P111 converges with alpha 1e-5") {
  Game g = make_polynomial(PolynomialInstance::P111);
  SolverConfig c;
  c.learning_rate = 1e-5;
  c.max_iters = 1000000;
  c.grad_tol = 1e-3;
  c.seed = 0;
  Trace t = dbi_solve(g, c);
  CHECK(t.converged);
  CHECK(t.reason == StopReason::Converged);
  CHECK(t.entries.back().field_norm < 1e-3);
  CHECK(std::isfinite(t.entries.front().field_norm));
  Vector golden(3);
  golden << -0.34, 1.85, -1.08;
  CHECK((t.final - golden).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("P112 converges from a wide init") {
  Game g = make_polynomial(PolynomialInstance::P112);
  SolverConfig c;
  c.learning_rate = 4e-6;
  c.max_iters = 1000000;
  c.grad_tol = 1e-3;
  c.seed = 3;
  c.unbounded_init = {-5.0, 5.0};
  c.record_every = 10000;
  Trace t = dbi_solve(g, c);
  REQUIRE(t.converged);
  Vector golden(4);
  golden << 4.70, -2.13, 10.27, 9.93;
  CHECK((t.final - golden).cwiseAbs().maxCoeff() < 0.05);
}

TEST_CASE("P111-3d keeps symmetric profiles symmetric") {
  Game g = make_polynomial(PolynomialInstance::P111_3D);
  SolverConfig c;
  c.learning_rate = 1e-5;
  c.max_iters = 2000;
  Vector init(9);
  init << 0.1, 0.1, 0.1, -0.2, -0.2, -0.2, 0.3, 0.3, 0.3;
  c.init = init;
  Trace t = dbi_solve(g, c);
  for (PlayerId i = 0; i < 3; ++i) {
    Vector s = t.final.segment(3 * i, 3);
    CHECK(s.maxCoeff() - s.minCoeff() < 1e-9);
  }
}

TEST_CASE("divergence, singular Hessians and stalls") {
  SUBCASE("maximizing a convex function") {
    Game g = single_player(var(0) * var(0));
    SolverConfig c;
    c.learning_rate = 0.5;
    c.max_iters = 100000;
    c.init = Vector::Constant(1, 1.0);
    Trace t = dbi_solve(g, c);
    CHECK(t.reason == StopReason::Diverged);
    CHECK(!t.converged);
  }
  SUBCASE("flat follower") {
    Game g = make_polynomial("flat", chain(2), {-1.0 * (var(0) * var(0)), var(0) * var(1)});
    SolverConfig c;
    c.init = Vector::Constant(2, 0.5);
    Trace t = dbi_solve(g, c);
    CHECK(t.reason == StopReason::Error);
    CHECK(t.error.find("singular") != std::string::npos);
  }
  SUBCASE("tiny steps stall") {
    Game g = single_player(-1.0 * (var(0) * var(0)));
    SolverConfig c;
    c.learning_rate = 1e-15;
    c.max_iters = 100000;
    c.init = Vector::Constant(1, 1.0);
    Trace t = dbi_solve(g, c);
    CHECK(t.reason == StopReason::Stalled);
  }
}

TEST_CASE("config validation") {
  Game g = single_player(-1.0 * (var(0) * var(0)));
  SolverConfig c;
  c.learning_rate = 0;
  CHECK_THROWS_AS(dbi_solve(g, c), ConfigError);
  c.learning_rate = 0.1;
  c.max_iters = 0;
  CHECK_THROWS_AS(dbi_solve(g, c), ConfigError);
}

TEST_CASE("traces") {
  Game g = random_quadratic_game({1, 2, 2}, 1, 12);
  SolverConfig c;
  c.learning_rate = 0.01;
  c.max_iters = 500;
  c.record_every = 100;
  long calls = 0;
  c.on_record = [&](long) { ++calls; };
  Trace t = dbi_solve(g, c);
  CHECK(calls == static_cast<long>(t.entries.size()));
  CHECK(t.entries.front().iter == 0);
  for (const TraceEntry& e : t.entries) {
    CHECK(e.player_norms.size() == g.shape().num_players());
    CHECK(e.field_norm == doctest::Approx(e.player_norms.norm()));
    CHECK(e.total_grad_norm == e.field_norm);
  }
  CHECK(t.final == t.entries.back().profile);

  SUBCASE("same seed, same trace") {
    c.on_record = {};
    Trace a = dbi_solve(g, c), b = dbi_solve(g, c);
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t k = 0; k < a.entries.size(); ++k) CHECK(a.entries[k].profile == b.entries[k].profile);
  }
}

TEST_CASE("masked iteration freezes inactive coordinates") {
  Game g = random_quadratic_game({1, 2}, 1, 21);
  SolverConfig c;
  c.learning_rate = 0.05;
  c.max_iters = 200;
  c.init = Vector::Constant(3, 0.3);
  std::vector<bool> active{false, true, false};
  Trace t = iterate(g, [&g](const ActionProfile& p) { return dbi_field(g, p); }, c, &active);
  CHECK(t.final[0] == 0.3);
  CHECK(t.final[2] == 0.3);
  CHECK(t.final[1] != 0.3);
}
