#include "dccm/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dccm/errors.hpp"

namespace dccm::poly {

namespace {

void require_same_vars(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": variable count " + std::to_string(a) +
                            " vs " + std::to_string(b));
  }
}

// Exponent vectors of total degree `degree` over n variables, leading
// exponent descending.
void enumerate_degree(int n, int degree, std::vector<int>& current, int pos,
                      std::vector<Monomial>& out) {
  if (pos == n - 1) {
    current[static_cast<std::size_t>(pos)] = degree;
    out.emplace_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(pos)] = e;
    enumerate_degree(n, degree - e, current, pos + 1, out);
  }
}

}  // namespace

Monomial::Monomial(std::vector<int> exponents) : exponents_(std::move(exponents)) {
  for (int e : exponents_) {
    if (e < 0) throw InvalidArgument("monomial exponents must be non-negative");
    degree_ += e;
  }
}

Monomial Monomial::one(int n_vars) { return Monomial(std::vector<int>(static_cast<std::size_t>(n_vars), 0)); }

Monomial Monomial::variable(int n_vars, int index) {
  if (index < 0 || index >= n_vars) throw DimensionMismatch("variable index out of range");
  std::vector<int> e(static_cast<std::size_t>(n_vars), 0);
  e[static_cast<std::size_t>(index)] = 1;
  return Monomial(std::move(e));
}

Monomial Monomial::operator*(const Monomial& other) const {
  require_same_vars(n_vars(), other.n_vars(), "monomial product");
  Monomial r = *this;
  for (std::size_t i = 0; i < exponents_.size(); ++i) r.exponents_[i] += other.exponents_[i];
  r.degree_ += other.degree_;
  return r;
}

Monomial Monomial::lifted(int n_vars) const {
  if (n_vars < this->n_vars()) throw DimensionMismatch("cannot lift monomial to fewer variables");
  Monomial r = *this;
  r.exponents_.resize(static_cast<std::size_t>(n_vars), 0);
  return r;
}

std::string Monomial::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (std::size_t i = 0; i < exponents_.size(); ++i) {
    if (exponents_[i] == 0) continue;
    if (!first) os << '*';
    os << 'x' << (i + 1);
    if (exponents_[i] > 1) os << '^' << exponents_[i];
    first = false;
  }
  if (first) os << '1';
  return os.str();
}

std::strong_ordering operator<=>(const Monomial& a, const Monomial& b) {
  if (auto c = a.degree_ <=> b.degree_; c != 0) return c;
  const std::size_t n = std::min(a.exponents_.size(), b.exponents_.size());
  for (std::size_t i = 0; i < n; ++i) {
    // Larger leading exponent sorts first.
    if (auto c = b.exponents_[i] <=> a.exponents_[i]; c != 0) return c;
  }
  return a.exponents_.size() <=> b.exponents_.size();
}

Polynomial::Polynomial(int n_vars, std::initializer_list<std::pair<Monomial, double>> terms)
    : n_vars_(n_vars) {
  for (const auto& [m, c] : terms) {
    require_same_vars(n_vars, m.n_vars(), "polynomial term");
    add_term(m, c);
  }
}

Polynomial Polynomial::constant(int n_vars, double value) {
  Polynomial p(n_vars);
  p.add_term(Monomial::one(n_vars), value);
  return p;
}

Polynomial Polynomial::variable(int n_vars, int index) {
  Polynomial p(n_vars);
  p.add_term(Monomial::variable(n_vars, index), 1.0);
  return p;
}

Polynomial Polynomial::monomial(const Monomial& m, double coeff) {
  Polynomial p(m.n_vars());
  p.add_term(m, coeff);
  return p;
}

int Polynomial::degree() const {
  // The map is grlex ordered, so the last term has maximal degree.
  return terms_.empty() ? 0 : terms_.rbegin()->first.degree();
}

double Polynomial::coeff(const Monomial& m) const {
  auto it = terms_.find(m);
  return it == terms_.end() ? 0.0 : it->second;
}

void Polynomial::add_term(const Monomial& m, double c) {
  require_same_vars(n_vars_, m.n_vars(), "add_term");
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

Polynomial Polynomial::lifted(int n_vars) const {
  Polynomial r(n_vars);
  for (const auto& [m, c] : terms_) r.terms_.emplace(m.lifted(n_vars), c);
  return r;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  require_same_vars(n_vars_, other.n_vars_, "polynomial sum");
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  require_same_vars(n_vars_, other.n_vars_, "polynomial difference");
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    if (it->second == 0.0) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) { return poly_mul(a, b); }

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [m, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << '-';
    os << std::abs(c);
    if (m.degree() > 0) os << '*' << m.to_string();
    first = false;
  }
  return os.str();
}

PolyMatrix::PolyMatrix(int rows, int cols, int n_vars)
    : rows_(rows), cols_(cols), n_vars_(n_vars),
      entries_(static_cast<std::size_t>(rows * cols), Polynomial(n_vars)) {
  if (rows < 0 || cols < 0) throw InvalidArgument("negative matrix dimension");
}

bool PolyMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j)
      if (!((*this)(i, j) == (*this)(j, i))) return false;
  return true;
}

int PolyMatrix::degree() const {
  int d = 0;
  for (const auto& p : entries_) d = std::max(d, p.degree());
  return d;
}

PolyMatrix PolyMatrix::lifted(int n_vars) const {
  PolyMatrix r(rows_, cols_, n_vars);
  for (std::size_t k = 0; k < entries_.size(); ++k) r.entries_[k] = entries_[k].lifted(n_vars);
  return r;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.cols() != b.rows()) throw DimensionMismatch("poly matrix product shape");
  require_same_vars(a.n_vars(), b.n_vars(), "poly matrix product");
  PolyMatrix r(a.rows(), b.cols(), a.n_vars());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j)
      for (int k = 0; k < a.cols(); ++k) r(i, j) += poly_mul(a(i, k), b(k, j));
  return r;
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DimensionMismatch("poly matrix sum shape");
  PolyMatrix r = a;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) += b(i, j);
  return r;
}

MonomialBasis::MonomialBasis(int n_vars, int max_degree, std::vector<Monomial> ordering)
    : n_vars_(n_vars), max_degree_(max_degree), ordering_(std::move(ordering)) {}

std::optional<std::size_t> MonomialBasis::index_of(const Monomial& m) const {
  auto it = std::lower_bound(ordering_.begin(), ordering_.end(), m);
  if (it == ordering_.end() || !(*it == m)) return std::nullopt;
  return static_cast<std::size_t>(it - ordering_.begin());
}

MonomialBasis monomial_basis(int n_vars, int max_degree) {
  if (n_vars < 1) throw InvalidArgument("monomial basis needs at least one variable");
  if (max_degree < 0) throw InvalidArgument("monomial basis degree must be non-negative");
  std::vector<Monomial> out;
  std::vector<int> current(static_cast<std::size_t>(n_vars), 0);
  for (int d = 0; d <= max_degree; ++d) enumerate_degree(n_vars, d, current, 0, out);
  return MonomialBasis(n_vars, max_degree, std::move(out));
}

double evaluate(const Polynomial& p, std::span<const double> x) {
  if (static_cast<int>(x.size()) != p.n_vars()) {
    throw DimensionMismatch("evaluate: point has " + std::to_string(x.size()) +
                            " components, polynomial has " + std::to_string(p.n_vars()) + " variables");
  }
  double sum = 0.0;
  for (const auto& [m, c] : p.terms()) {
    double term = c;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const int e = m[static_cast<int>(i)];
      for (int k = 0; k < e; ++k) term *= x[i];
    }
    sum += term;
  }
  return sum;
}

double evaluate(const Polynomial& p, const Eigen::VectorXd& x) {
  return evaluate(p, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

Eigen::MatrixXd evaluate(const PolyMatrix& m, const Eigen::VectorXd& x) {
  Eigen::MatrixXd r(m.rows(), m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) r(i, j) = evaluate(m(i, j), x);
  return r;
}

Polynomial poly_mul(const Polynomial& a, const Polynomial& b) {
  require_same_vars(a.n_vars(), b.n_vars(), "poly_mul");
  Polynomial r(a.n_vars());
  for (const auto& [ma, ca] : a.terms())
    for (const auto& [mb, cb] : b.terms()) r.add_term(ma * mb, ca * cb);
  return r;
}

Polynomial derivative(const Polynomial& p, int var) {
  if (var < 0 || var >= p.n_vars()) throw DimensionMismatch("derivative: variable index out of range");
  Polynomial r(p.n_vars());
  for (const auto& [m, c] : p.terms()) {
    const int e = m[var];
    if (e == 0) continue;
    std::vector<int> exps(m.exponents().begin(), m.exponents().end());
    exps[static_cast<std::size_t>(var)] -= 1;
    r.add_term(Monomial(std::move(exps)), c * e);
  }
  return r;
}

PolyMatrix jacobian(std::span<const Polynomial> v, int n_vars) {
  PolyMatrix J(static_cast<int>(v.size()), n_vars, n_vars);
  for (std::size_t i = 0; i < v.size(); ++i) {
    require_same_vars(v[i].n_vars(), n_vars, "jacobian");
    for (int j = 0; j < n_vars; ++j) J(static_cast<int>(i), j) = derivative(v[i], j);
  }
  return J;
}

Polynomial compose(const Polynomial& p, std::span<const Polynomial> subst) {
  if (static_cast<int>(subst.size()) != p.n_vars()) {
    throw DimensionMismatch("compose: expected " + std::to_string(p.n_vars()) +
                            " substitutions, got " + std::to_string(subst.size()));
  }
  if (subst.empty()) return p;
  const int target_vars = subst.front().n_vars();
  for (const auto& s : subst) require_same_vars(s.n_vars(), target_vars, "compose");

  // powers[i][k] = subst[i]^k, filled lazily up to the largest exponent used.
  std::vector<std::vector<Polynomial>> powers(subst.size());
  for (std::size_t i = 0; i < subst.size(); ++i) powers[i].push_back(Polynomial::constant(target_vars, 1.0));
  auto power = [&](std::size_t i, int k) -> const Polynomial& {
    auto& cache = powers[i];
    while (static_cast<int>(cache.size()) <= k) cache.push_back(poly_mul(cache.back(), subst[i]));
    return cache[static_cast<std::size_t>(k)];
  };

  Polynomial r(target_vars);
  for (const auto& [m, c] : p.terms()) {
    Polynomial term = Polynomial::constant(target_vars, c);
    for (std::size_t i = 0; i < subst.size(); ++i) {
      const int e = m[static_cast<int>(i)];
      if (e > 0) term = poly_mul(term, power(i, e));
    }
    r += term;
  }
  return r;
}

Eigen::VectorXd coefficients(const Polynomial& p, const MonomialBasis& basis) {
  require_same_vars(p.n_vars(), basis.n_vars(), "coefficients");
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [m, v] : p.terms()) {
    auto idx = basis.index_of(m);
    if (!idx) throw InvalidArgument("term " + m.to_string() + " is outside the monomial basis");
    c(static_cast<Eigen::Index>(*idx)) = v;
  }
  return c;
}

Polynomial from_coefficients(const MonomialBasis& basis, const Eigen::VectorXd& coeffs) {
  if (static_cast<std::size_t>(coeffs.size()) != basis.size()) {
    throw DimensionMismatch("coefficient vector length " + std::to_string(coeffs.size()) +
                            " does not match basis size " + std::to_string(basis.size()));
  }
  Polynomial p(basis.n_vars());
  for (std::size_t i = 0; i < basis.size(); ++i) p.add_term(basis[i], coeffs(static_cast<Eigen::Index>(i)));
  return p;
}

MonomialEvaluator::MonomialEvaluator(const MonomialBasis& basis)
    : n_vars_(basis.n_vars()), max_degree_(basis.max_degree()) {
  exponents_.reserve(basis.size());
  for (const auto& m : basis) exponents_.emplace_back(m.exponents().begin(), m.exponents().end());
}

namespace {

Eigen::MatrixXd power_table(const Eigen::VectorXd& x, int n_vars, int max_degree) {
  Eigen::MatrixXd pw(n_vars, max_degree + 1);
  for (int i = 0; i < n_vars; ++i) {
    pw(i, 0) = 1.0;
    for (int k = 1; k <= max_degree; ++k) pw(i, k) = pw(i, k - 1) * x(i);
  }
  return pw;
}

}  // namespace

Eigen::VectorXd MonomialEvaluator::values(const Eigen::VectorXd& x) const {
  if (x.size() != n_vars_) throw DimensionMismatch("monomial evaluation: wrong point dimension");
  const Eigen::MatrixXd pw = power_table(x, n_vars_, max_degree_);
  Eigen::VectorXd v(static_cast<Eigen::Index>(exponents_.size()));
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    double t = 1.0;
    for (int i = 0; i < n_vars_; ++i) t *= pw(i, exponents_[k][static_cast<std::size_t>(i)]);
    v(static_cast<Eigen::Index>(k)) = t;
  }
  return v;
}

Eigen::VectorXd MonomialEvaluator::derivative_values(const Eigen::VectorXd& x, int var) const {
  if (x.size() != n_vars_) throw DimensionMismatch("monomial evaluation: wrong point dimension");
  const Eigen::MatrixXd pw = power_table(x, n_vars_, max_degree_);
  Eigen::VectorXd v(static_cast<Eigen::Index>(exponents_.size()));
  for (std::size_t k = 0; k < exponents_.size(); ++k) {
    const int e = exponents_[k][static_cast<std::size_t>(var)];
    if (e == 0) {
      v(static_cast<Eigen::Index>(k)) = 0.0;
      continue;
    }
    double t = e;
    for (int i = 0; i < n_vars_; ++i) {
      const int ei = exponents_[k][static_cast<std::size_t>(i)];
      t *= pw(i, i == var ? ei - 1 : ei);
    }
    v(static_cast<Eigen::Index>(k)) = t;
  }
  return v;
}

}  // namespace dccm::poly
