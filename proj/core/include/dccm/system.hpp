#pragma once

// Discrete-time control-affine plants x+ = f(x) + g(x) u with polynomial f, g.

#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dccm/poly.hpp"

namespace dccm::sys {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Axis-aligned box; used by grid verification only, never enforced in simulation.
struct Box {
  std::vector<Interval> axes;

  int dim() const { return static_cast<int>(axes.size()); }
  bool contains(const Eigen::VectorXd& x) const;
};

struct Linearization {
  // d(f + g u)/dx as polynomials in (x, u).
  poly::PolyMatrix A;
  // g, as polynomials in x.
  poly::PolyMatrix B;
};

class ControlAffineSystem {
 public:
  ControlAffineSystem(std::vector<poly::Polynomial> f, poly::PolyMatrix g,
                      std::optional<Box> domain = std::nullopt);

  int state_dim() const { return n_; }
  int input_dim() const { return m_; }
  const std::vector<poly::Polynomial>& drift() const { return f_; }
  const poly::PolyMatrix& input_matrix() const { return g_; }
  const std::optional<Box>& domain() const { return domain_; }

  Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;

  // f(x) + g(x) u as n polynomials in the n + m variables (x, u).
  const std::vector<poly::Polynomial>& successor_map() const { return successor_; }

  Linearization linearize() const;

  Eigen::MatrixXd A_at(const Eigen::VectorXd& x, const Eigen::VectorXd& u) const;
  Eigen::MatrixXd B_at(const Eigen::VectorXd& x) const;

 private:
  int n_ = 0;
  int m_ = 0;
  std::vector<poly::Polynomial> f_;
  poly::PolyMatrix g_;
  std::optional<Box> domain_;
  std::vector<poly::Polynomial> successor_;
  poly::PolyMatrix A_;
};

// x1+ = 1.1 x1 - 0.1 x1 x2 + u,  x2+ = 0.9 x2 + 0.1 x1.
ControlAffineSystem cstr_preset();

}  // namespace dccm::sys
