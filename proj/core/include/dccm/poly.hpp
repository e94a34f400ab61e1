#pragma once

// Sparse multivariate polynomials with real coefficients.
//
// Monomials are ordered graded-lexicographically: total degree ascending,
// and within one degree the exponent vectors are compared lexicographically
// with larger leading exponents first (1, x1, x2, x1^2, x1 x2, x2^2, ...).
// Every container keyed by Monomial iterates in that order.

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace dccm::poly {

class Monomial {
 public:
  Monomial() = default;
  explicit Monomial(std::vector<int> exponents);

  static Monomial one(int n_vars);
  static Monomial variable(int n_vars, int index);

  int n_vars() const { return static_cast<int>(exponents_.size()); }
  int degree() const { return degree_; }
  int operator[](int i) const { return exponents_[static_cast<std::size_t>(i)]; }
  std::span<const int> exponents() const { return exponents_; }

  // Product of two monomials over the same variables.
  Monomial operator*(const Monomial& other) const;

  // Embeds into n_vars >= n_vars() variables by appending zero exponents.
  Monomial lifted(int n_vars) const;

  std::string to_string() const;

  friend bool operator==(const Monomial& a, const Monomial& b) {
    return a.exponents_ == b.exponents_;
  }
  friend std::strong_ordering operator<=>(const Monomial& a, const Monomial& b);

 private:
  std::vector<int> exponents_;
  int degree_ = 0;
};

class Polynomial {
 public:
  using TermMap = std::map<Monomial, double>;

  explicit Polynomial(int n_vars = 0) : n_vars_(n_vars) {}
  Polynomial(int n_vars, std::initializer_list<std::pair<Monomial, double>> terms);

  static Polynomial constant(int n_vars, double value);
  static Polynomial variable(int n_vars, int index);
  static Polynomial monomial(const Monomial& m, double coeff = 1.0);

  int n_vars() const { return n_vars_; }
  // Total degree; 0 for constants and for the zero polynomial.
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  const TermMap& terms() const { return terms_; }
  double coeff(const Monomial& m) const;

  // Adds c to the coefficient of m; terms that cancel to exactly 0 are erased.
  void add_term(const Monomial& m, double c);

  Polynomial lifted(int n_vars) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double s);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.n_vars_ == b.n_vars_ && a.terms_ == b.terms_;
  }

  std::string to_string() const;

 private:
  int n_vars_ = 0;
  TermMap terms_;
};

class PolyMatrix {
 public:
  PolyMatrix() = default;
  PolyMatrix(int rows, int cols, int n_vars);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int n_vars() const { return n_vars_; }

  Polynomial& operator()(int i, int j) { return entries_[index(i, j)]; }
  const Polynomial& operator()(int i, int j) const { return entries_[index(i, j)]; }

  bool is_symmetric() const;
  int degree() const;
  PolyMatrix lifted(int n_vars) const;

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(cols_) +
           static_cast<std::size_t>(j);
  }

  int rows_ = 0;
  int cols_ = 0;
  int n_vars_ = 0;
  std::vector<Polynomial> entries_;
};

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);

class MonomialBasis {
 public:
  MonomialBasis() = default;
  MonomialBasis(int n_vars, int max_degree, std::vector<Monomial> ordering);

  int n_vars() const { return n_vars_; }
  int max_degree() const { return max_degree_; }
  std::size_t size() const { return ordering_.size(); }
  const Monomial& operator[](std::size_t i) const { return ordering_[i]; }
  const std::vector<Monomial>& ordering() const { return ordering_; }
  std::optional<std::size_t> index_of(const Monomial& m) const;

  auto begin() const { return ordering_.begin(); }
  auto end() const { return ordering_.end(); }

 private:
  int n_vars_ = 0;
  int max_degree_ = 0;
  std::vector<Monomial> ordering_;
};

// All monomials of total degree <= max_degree in grlex order.
MonomialBasis monomial_basis(int n_vars, int max_degree);

double evaluate(const Polynomial& p, std::span<const double> x);
double evaluate(const Polynomial& p, const Eigen::VectorXd& x);
Eigen::MatrixXd evaluate(const PolyMatrix& m, const Eigen::VectorXd& x);

Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial derivative(const Polynomial& p, int var);

// Entry (i, j) is d v_i / d x_j.
PolyMatrix jacobian(std::span<const Polynomial> v, int n_vars);

// p with variable i replaced by subst[i], fully expanded.
Polynomial compose(const Polynomial& p, std::span<const Polynomial> subst);

// Coefficients of p aligned to `basis`; throws if p has a term outside it.
Eigen::VectorXd coefficients(const Polynomial& p, const MonomialBasis& basis);
Polynomial from_coefficients(const MonomialBasis& basis, const Eigen::VectorXd& coeffs);

// Evaluates a fixed list of monomials at a point by caching variable powers.
class MonomialEvaluator {
 public:
  explicit MonomialEvaluator(const MonomialBasis& basis);
  // Values of every basis monomial at x.
  Eigen::VectorXd values(const Eigen::VectorXd& x) const;
  // d/dx_var of every basis monomial at x.
  Eigen::VectorXd derivative_values(const Eigen::VectorXd& x, int var) const;

 private:
  int n_vars_ = 0;
  int max_degree_ = 0;
  std::vector<std::vector<int>> exponents_;
};

}  // namespace dccm::poly
