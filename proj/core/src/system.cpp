#include "dccm/system.hpp"

#include <string>

#include "dccm/errors.hpp"

namespace dccm::sys {

using poly::Monomial;
using poly::PolyMatrix;
using poly::Polynomial;

bool Box::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) return false;
  for (int i = 0; i < dim(); ++i) {
    const auto& a = axes[static_cast<std::size_t>(i)];
    if (x(i) < a.lo || x(i) > a.hi) return false;
  }
  return true;
}

ControlAffineSystem::ControlAffineSystem(std::vector<Polynomial> f, PolyMatrix g, std::optional<Box> domain)
    : n_(static_cast<int>(f.size())), m_(g.cols()), f_(std::move(f)), g_(std::move(g)), domain_(std::move(domain)) {
  if (n_ < 1) throw InvalidArgument("system needs at least one state");
  if (g_.rows() != n_) {
    throw DimensionMismatch("g has " + std::to_string(g_.rows()) + " rows, expected " + std::to_string(n_));
  }
  if (m_ < 1) throw InvalidArgument("system needs at least one input");
  for (const auto& p : f_) {
    if (p.n_vars() != n_) throw DimensionMismatch("f entries must be polynomials in the state");
  }
  if (g_.n_vars() != n_) throw DimensionMismatch("g entries must be polynomials in the state");
  if (domain_ && domain_->dim() != n_) throw DimensionMismatch("domain box dimension differs from state");

  const int nv = n_ + m_;
  successor_.reserve(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    Polynomial s = f_[static_cast<std::size_t>(i)].lifted(nv);
    for (int j = 0; j < m_; ++j) s += g_(i, j).lifted(nv) * Polynomial::variable(nv, n_ + j);
    successor_.push_back(std::move(s));
  }
  PolyMatrix full = poly::jacobian(successor_, nv);
  A_ = PolyMatrix(n_, n_, nv);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) A_(i, j) = full(i, j);
}

Eigen::VectorXd ControlAffineSystem::step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != n_) throw DimensionMismatch("step: state has wrong dimension");
  if (u.size() != m_) throw DimensionMismatch("step: input has wrong dimension");
  Eigen::VectorXd next(n_);
  for (int i = 0; i < n_; ++i) {
    double v = poly::evaluate(f_[static_cast<std::size_t>(i)], x);
    for (int j = 0; j < m_; ++j) v += poly::evaluate(g_(i, j), x) * u(j);
    next(i) = v;
  }
  return next;
}

Linearization ControlAffineSystem::linearize() const { return {A_, g_}; }

Eigen::MatrixXd ControlAffineSystem::A_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const {
  if (x.size() != n_ || u.size() != m_) throw DimensionMismatch("A_at: wrong dimensions");
  Eigen::VectorXd xu(n_ + m_);
  xu << x, u;
  return poly::evaluate(A_, xu);
}

Eigen::MatrixXd ControlAffineSystem::B_at(const Eigen::VectorXd& x) const {
  if (x.size() != n_) throw DimensionMismatch("B_at: wrong dimensions");
  return poly::evaluate(g_, x);
}

ControlAffineSystem cstr_preset() {
  const Monomial x1({1, 0});
  const Monomial x2({0, 1});
  const Monomial x1x2({1, 1});
  std::vector<Polynomial> f{
      Polynomial(2, {{x1, 1.1}, {x1x2, -0.1}}),
      Polynomial(2, {{x2, 0.9}, {x1, 0.1}}),
  };
  PolyMatrix g(2, 1, 2);
  g(0, 0) = Polynomial::constant(2, 1.0);
  return ControlAffineSystem(std::move(f), std::move(g));
}

}  // namespace dccm::sys
