#include "shg/polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace shg {

namespace {

Polynomial::Monomial normalize(std::vector<std::pair<int, int>> powers) {
  std::sort(powers.begin(), powers.end());
  Polynomial::Monomial out;
  for (const auto& [v, p] : powers) {
    if (p == 0) continue;
    if (!out.empty() && out.back().first == v)
      out.back().second += p;
    else
      out.emplace_back(v, p);
  }
  return out;
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int k = 0; k < p; ++k) r *= x;
  return r;
}

double monomial_value(const Polynomial::Monomial& m, const Vector& x) {
  double r = 1.0;
  for (const auto& [v, p] : m) r *= ipow(x[v], p);
  return r;
}

// ∂m/∂x_var evaluated at x, without the coefficient.
double monomial_partial(const Polynomial::Monomial& m, const Vector& x, int var) {
  double r = 1.0;
  bool found = false;
  for (const auto& [v, p] : m) {
    if (v == var) {
      found = true;
      r *= p * ipow(x[v], p - 1);
    } else {
      r *= ipow(x[v], p);
    }
  }
  return found ? r : 0.0;
}

double monomial_second(const Polynomial::Monomial& m, const Vector& x, int a, int b) {
  double r = 1.0;
  int hits = 0;
  for (const auto& [v, p] : m) {
    int order = (v == a) + (v == b);
    if (order > p) return 0.0;
    hits += order;
    if (order == 0)
      r *= ipow(x[v], p);
    else if (order == 1)
      r *= p * ipow(x[v], p - 1);
    else
      r *= p * (p - 1) * ipow(x[v], p - 2);
  }
  return hits == 2 ? r : 0.0;
}

}  // namespace

Polynomial Polynomial::constant(double c) {
  Polynomial p;
  if (c != 0.0) p.terms_[{}] = c;
  return p;
}

Polynomial Polynomial::variable(int index) {
  Polynomial p;
  p.terms_[{{index, 1}}] = 1.0;
  return p;
}

void Polynomial::add_term(double c, std::vector<std::pair<int, int>> powers) {
  if (c == 0.0) return;
  Monomial m = normalize(std::move(powers));
  double& slot = terms_[m];
  slot += c;
  if (slot == 0.0) terms_.erase(m);
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(c, m);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(-c, m);
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  for (const auto& [ma, ca] : a.terms_)
    for (const auto& [mb, cb] : b.terms_) {
      std::vector<std::pair<int, int>> powers(ma.begin(), ma.end());
      powers.insert(powers.end(), mb.begin(), mb.end());
      out.add_term(ca * cb, std::move(powers));
    }
  return out;
}

Polynomial operator*(double c, Polynomial p) {
  if (c == 0.0) return {};
  for (auto& [m, coef] : p.terms_) coef *= c;
  return p;
}

double Polynomial::evaluate(const Vector& x) const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += c * monomial_value(m, x);
  return s;
}

Vector Polynomial::gradient(const Vector& x) const { return gradient_block(x, 0, static_cast<int>(x.size())); }

Vector Polynomial::gradient_block(const Vector& x, int off, int len) const {
  Vector g = Vector::Zero(len);
  for (const auto& [m, c] : terms_)
    for (const auto& [v, p] : m)
      if (v >= off && v < off + len) g[v - off] += c * monomial_partial(m, x, v);
  return g;
}

Matrix Polynomial::hessian_block(const Vector& x, int row_off, int rows, int col_off, int cols) const {
  Matrix h = Matrix::Zero(rows, cols);
  for (const auto& [m, c] : terms_) {
    for (const auto& [va, pa] : m) {
      if (va < row_off || va >= row_off + rows) continue;
      for (const auto& [vb, pb] : m) {
        if (vb < col_off || vb >= col_off + cols) continue;
        h(va - row_off, vb - col_off) += c * monomial_second(m, x, va, vb);
      }
    }
  }
  return h;
}

std::vector<int> Polynomial::variables() const {
  std::vector<int> vars;
  for (const auto& [m, c] : terms_)
    for (const auto& [v, p] : m) vars.push_back(v);
  std::sort(vars.begin(), vars.end());
  vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
  return vars;
}

int Polynomial::degree() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int deg = 0;
    for (const auto& [v, p] : m) deg += p;
    d = std::max(d, deg);
  }
  return d;
}

Polynomial sum_of(int off, int len) {
  Polynomial p;
  for (int k = 0; k < len; ++k) p.add_term(1.0, {{off + k, 1}});
  return p;
}

Polynomial sum_of_squares(int off, int len) {
  Polynomial p;
  for (int k = 0; k < len; ++k) p.add_term(1.0, {{off + k, 2}});
  return p;
}

}  // namespace shg
