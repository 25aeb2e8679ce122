// Sparse multivariate polynomials over the flat action vector.
#pragma once

#include "shg/core.hpp"

#include <map>
#include <utility>
#include <vector>

namespace shg {

/// Sum of monomials c * Π x_v^p. Variables are flat profile indices.
class Polynomial {
 public:
  /// Sorted (variable, power) pairs with power >= 1.
  using Monomial = std::vector<std::pair<int, int>>;

  Polynomial() = default;
  static Polynomial constant(double c);
  static Polynomial variable(int index);

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend Polynomial operator*(double c, Polynomial p);
  friend Polynomial operator-(Polynomial p) { return -1.0 * std::move(p); }

  /// Adds c * Π x_v^p (powers need not be sorted or merged).
  void add_term(double c, std::vector<std::pair<int, int>> powers);

  double evaluate(const Vector& x) const;
  /// Gradient with respect to every flat variable (size = x.size()).
  Vector gradient(const Vector& x) const;
  /// ∂²p/∂x_r∂x_c for rows in [row_off, row_off + rows) and cols in [col_off, col_off + cols).
  Matrix hessian_block(const Vector& x, int row_off, int rows, int col_off, int cols) const;
  /// ∂p/∂x_k for k in [off, off + len).
  Vector gradient_block(const Vector& x, int off, int len) const;

  /// Variables that appear with nonzero coefficient.
  std::vector<int> variables() const;
  int degree() const;
  const std::map<Monomial, double>& terms() const { return terms_; }

 private:
  std::map<Monomial, double> terms_;
};

/// Σ_k x_{off + k} for k < len.
Polynomial sum_of(int off, int len);
/// Σ_k x_{off + k}^2 for k < len.
Polynomial sum_of_squares(int off, int len);

}  // namespace shg
