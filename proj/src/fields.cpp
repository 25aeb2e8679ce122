#include "shg/fields.hpp"

#include <algorithm>
#include <cctype>

namespace shg {

std::string to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Sim: return "sim";
    case FieldKind::Sym: return "sym";
    case FieldKind::SymAln: return "sym_aln";
    case FieldKind::Co: return "co";
    case FieldKind::Ham: return "ham";
  }
  return "unknown";
}

FieldKind parse_field_kind(const std::string& name) {
  std::string s = name;
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "sim") return FieldKind::Sim;
  if (s == "sym") return FieldKind::Sym;
  if (s == "sym_aln") return FieldKind::SymAln;
  if (s == "co") return FieldKind::Co;
  if (s == "ham") return FieldKind::Ham;
  throw ConfigError("unknown field kind '" + name + "'");
}

Vector field_sim(const Game& game, const ActionProfile& x) {
  const GameTree& tree = game.shape();
  Vector g(tree.total_dim());
  for (PlayerId i = 0; i < tree.num_players(); ++i)
    g.segment(tree.offset(i), tree.action_dim(i)) = game.utility().grad(i, i, x);
  return g;
}

Matrix field_jacobian(const FieldFn& field, const ActionProfile& x, double rel_step) {
  const int n = x.size();
  Matrix jac(n, n);
  ActionProfile probe = x;
  for (int k = 0; k < n; ++k) {
    double x0 = x.flat()[k];
    double h = rel_step * std::max(1.0, std::abs(x0));
    probe.flat()[k] = x0 + h;
    Vector up = field(probe);
    probe.flat()[k] = x0 - h;
    Vector down = field(probe);
    probe.flat()[k] = x0;
    jac.col(k) = (up - down) / (2 * h);
  }
  return jac;
}

Matrix sim_jacobian(const Game& game, const ActionProfile& x) {
  return field_jacobian([&game](const ActionProfile& p) { return field_sim(game, p); }, x);
}

namespace {

Vector symplectic(const Vector& g, const Matrix& jac, bool aligned) {
  Matrix a = (jac - jac.transpose()) / 2;
  Vector correction = a.transpose() * g;  // row vector g·A
  if (!aligned) return g + correction;
  Vector ham = -2.0 * jac.transpose() * g;
  double d = static_cast<double>(g.size());
  double s = (ham.dot(g)) * (ham.dot(correction)) / (2 * d) + 0.1;
  double zeta = s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
  return g + zeta * correction;
}

}  // namespace

Vector field_sym(const Game& game, const ActionProfile& x, bool aligned) {
  return symplectic(field_sim(game, x), sim_jacobian(game, x), aligned);
}

Vector field_ham(const Game& game, const ActionProfile& x) {
  return -2.0 * sim_jacobian(game, x).transpose() * field_sim(game, x);
}

Vector field_co(const Game& game, const ActionProfile& x, double gamma) {
  if (!(gamma > 0)) throw InvalidParams("consensus weight gamma must be positive");
  Vector g = field_sim(game, x);
  return g - 2.0 * gamma * sim_jacobian(game, x).transpose() * g;
}

Vector evaluate_field(const Game& game, const FieldSpec& spec, const ActionProfile& x) {
  switch (spec.kind) {
    case FieldKind::Sim: return field_sim(game, x);
    case FieldKind::Sym: return field_sym(game, x, false);
    case FieldKind::SymAln: return field_sym(game, x, true);
    case FieldKind::Co: return field_co(game, x, spec.gamma);
    case FieldKind::Ham: return field_ham(game, x);
  }
  throw ConfigError("unknown field kind");
}

Trace iterate_field(const Game& game, const FieldSpec& spec, const SolverConfig& config) {
  if (spec.kind == FieldKind::Co && !(spec.gamma > 0)) throw InvalidParams("consensus weight gamma must be positive");
  return iterate(
      game, [&](const ActionProfile& x) { return evaluate_field(game, spec, x); }, config, nullptr,
      [&game](const ActionProfile& x) { return dbi_field(game, x); });
}

}  // namespace shg
