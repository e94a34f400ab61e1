#pragma once

// Certificate (W, L) of a discrete-time control contraction metric.
//
// W(x) is symmetric n x n and stored by its upper triangle (row-major:
// 11, 12, ..., 1n, 22, ...); L(x) is m x n and stored row-major. Every entry
// is a coefficient vector aligned to a grlex monomial basis in x. The metric
// is M = W^-1 and the differential gain is K = L W^-1.

#include <vector>

#include <Eigen/Dense>

#include "dccm/poly.hpp"
#include "dccm/system.hpp"

namespace dccm::cert {

class CertificateTemplate {
 public:
  CertificateTemplate() = default;
  // Throws InvalidArgument unless n, m >= 1, degrees >= 0 and 0 < beta <= 1.
  CertificateTemplate(int n, int m, int metric_degree, int gain_degree, double beta);

  int n() const { return n_; }
  int m() const { return m_; }
  int metric_degree() const { return metric_degree_; }
  int gain_degree() const { return gain_degree_; }
  double beta() const { return beta_; }
  const poly::MonomialBasis& basis() const { return basis_; }
  const poly::MonomialBasis& gain_basis() const { return gain_basis_; }

  int num_w_entries() const { return n_ * (n_ + 1) / 2; }
  int num_l_entries() const { return m_ * n_; }
  // Index of W(i, j) among the stored upper-triangle entries.
  int w_entry(int i, int j) const;

  // Flat parameter vector: W entries first, then L entries.
  int num_params() const;
  int w_param(int entry, int k) const;
  int l_param(int i, int j, int k) const;

 private:
  int n_ = 0;
  int m_ = 0;
  int metric_degree_ = 0;
  int gain_degree_ = 0;
  double beta_ = 0.0;
  poly::MonomialBasis basis_;
  poly::MonomialBasis gain_basis_;
};

class DccmCertificate {
 public:
  DccmCertificate(CertificateTemplate tmpl, std::vector<Eigen::VectorXd> w_coeffs,
                  std::vector<Eigen::VectorXd> l_coeffs, double margin);
  // Unpacks a flat parameter vector laid out as in CertificateTemplate.
  static DccmCertificate from_params(const CertificateTemplate& tmpl, const Eigen::VectorXd& params,
                                     double margin);

  const CertificateTemplate& templ() const { return tmpl_; }
  const std::vector<Eigen::VectorXd>& w_coeffs() const { return w_coeffs_; }
  const std::vector<Eigen::VectorXd>& l_coeffs() const { return l_coeffs_; }
  double margin() const { return margin_; }
  double beta() const { return tmpl_.beta(); }
  int n() const { return tmpl_.n(); }
  int m() const { return tmpl_.m(); }
  Eigen::VectorXd params() const;

  poly::PolyMatrix W() const;
  poly::PolyMatrix L() const;

  Eigen::MatrixXd W_at(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd L_at(const Eigen::VectorXd& x) const;
  // dW/dx_k at x for k = 0..n-1.
  std::vector<Eigen::MatrixXd> W_gradient_at(const Eigen::VectorXd& x) const;

  // Same W, margin and template with L identically zero.
  DccmCertificate with_zero_gain() const;

 private:
  void check_point(const Eigen::VectorXd& x) const;

  CertificateTemplate tmpl_;
  std::vector<Eigen::VectorXd> w_coeffs_;
  std::vector<Eigen::VectorXd> l_coeffs_;
  double margin_ = 0.0;
  poly::MonomialEvaluator w_eval_;
  poly::MonomialEvaluator l_eval_;
};

// Condition number above which W(x) is treated as singular.
inline constexpr double kMaxMetricCondition = 1e12;

// W^-1 for symmetric W, symmetrized. Throws SingularMetric when
// max|lambda| / min|lambda| exceeds kMaxMetricCondition.
Eigen::MatrixXd invert_metric_dual(const Eigen::MatrixXd& W);

// K(x) = L(x) W(x)^-1.
Eigen::MatrixXd gain_at(const DccmCertificate& cert, const Eigen::VectorXd& x);

// The block matrix [[W(x+), A W + B L], [(A W + B L)^T, (1 - beta) W]] at (x, u).
Eigen::MatrixXd contraction_matrix_at(const sys::ControlAffineSystem& sys, const DccmCertificate& cert,
                                      const Eigen::VectorXd& x, const Eigen::VectorXd& u);

// lambda_max((A + B K)^T M(x+) (A + B K) - (1 - beta) M(x)) with M = W^-1 and
// K = L W^-1 at x. Negative values certify the pointwise contraction condition.
double check_lemma_condition(const sys::ControlAffineSystem& sys, const DccmCertificate& cert,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& u);

}  // namespace dccm::cert
