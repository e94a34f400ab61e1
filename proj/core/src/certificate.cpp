#include "dccm/certificate.hpp"

#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "dccm/errors.hpp"

namespace dccm::cert {

CertificateTemplate::CertificateTemplate(int n, int m, int metric_degree, int gain_degree, double beta)
    : n_(n), m_(m), metric_degree_(metric_degree), gain_degree_(gain_degree), beta_(beta) {
  if (n < 1 || m < 1) throw InvalidArgument("certificate template: n and m must be positive");
  if (metric_degree < 0 || gain_degree < 0) throw InvalidArgument("certificate template: negative degree");
  if (!(beta > 0.0 && beta <= 1.0)) throw InvalidArgument("certificate template: beta must lie in (0, 1]");
  basis_ = poly::monomial_basis(n, metric_degree);
  gain_basis_ = poly::monomial_basis(n, gain_degree);
}

int CertificateTemplate::w_entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= n_) throw DimensionMismatch("W entry index out of range");
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

int CertificateTemplate::num_params() const {
  return num_w_entries() * static_cast<int>(basis_.size()) + num_l_entries() * static_cast<int>(gain_basis_.size());
}

int CertificateTemplate::w_param(int entry, int k) const { return entry * static_cast<int>(basis_.size()) + k; }

int CertificateTemplate::l_param(int i, int j, int k) const {
  return num_w_entries() * static_cast<int>(basis_.size()) + (i * n_ + j) * static_cast<int>(gain_basis_.size()) + k;
}

DccmCertificate::DccmCertificate(CertificateTemplate tmpl, std::vector<Eigen::VectorXd> w_coeffs,
                                 std::vector<Eigen::VectorXd> l_coeffs, double margin)
    : tmpl_(std::move(tmpl)),
      w_coeffs_(std::move(w_coeffs)),
      l_coeffs_(std::move(l_coeffs)),
      margin_(margin),
      w_eval_(tmpl_.basis()),
      l_eval_(tmpl_.gain_basis()) {
  if (static_cast<int>(w_coeffs_.size()) != tmpl_.num_w_entries())
    throw DimensionMismatch("certificate: expected " + std::to_string(tmpl_.num_w_entries()) + " W entries");
  if (static_cast<int>(l_coeffs_.size()) != tmpl_.num_l_entries())
    throw DimensionMismatch("certificate: expected " + std::to_string(tmpl_.num_l_entries()) + " L entries");
  for (const auto& c : w_coeffs_)
    if (c.size() != static_cast<Eigen::Index>(tmpl_.basis().size()))
      throw DimensionMismatch("certificate: W coefficient vector does not match the basis");
  for (const auto& c : l_coeffs_)
    if (c.size() != static_cast<Eigen::Index>(tmpl_.gain_basis().size()))
      throw DimensionMismatch("certificate: L coefficient vector does not match the gain basis");
}

DccmCertificate DccmCertificate::from_params(const CertificateTemplate& tmpl, const Eigen::VectorXd& params,
                                             double margin) {
  if (params.size() != tmpl.num_params()) throw DimensionMismatch("certificate: parameter vector length");
  const auto nb = static_cast<Eigen::Index>(tmpl.basis().size());
  const auto ng = static_cast<Eigen::Index>(tmpl.gain_basis().size());
  std::vector<Eigen::VectorXd> w, l;
  for (int e = 0; e < tmpl.num_w_entries(); ++e) w.push_back(params.segment(tmpl.w_param(e, 0), nb));
  for (int i = 0; i < tmpl.m(); ++i)
    for (int j = 0; j < tmpl.n(); ++j) l.push_back(params.segment(tmpl.l_param(i, j, 0), ng));
  return DccmCertificate(tmpl, std::move(w), std::move(l), margin);
}

Eigen::VectorXd DccmCertificate::params() const {
  Eigen::VectorXd p(tmpl_.num_params());
  const auto nb = static_cast<Eigen::Index>(tmpl_.basis().size());
  const auto ng = static_cast<Eigen::Index>(tmpl_.gain_basis().size());
  for (int e = 0; e < tmpl_.num_w_entries(); ++e) p.segment(tmpl_.w_param(e, 0), nb) = w_coeffs_[static_cast<std::size_t>(e)];
  for (int i = 0; i < m(); ++i)
    for (int j = 0; j < n(); ++j)
      p.segment(tmpl_.l_param(i, j, 0), ng) = l_coeffs_[static_cast<std::size_t>(i * n() + j)];
  return p;
}

poly::PolyMatrix DccmCertificate::W() const {
  poly::PolyMatrix out(n(), n(), n());
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j)
      out(i, j) = poly::from_coefficients(tmpl_.basis(), w_coeffs_[static_cast<std::size_t>(tmpl_.w_entry(i, j))]);
  return out;
}

poly::PolyMatrix DccmCertificate::L() const {
  poly::PolyMatrix out(m(), n(), n());
  for (int i = 0; i < m(); ++i)
    for (int j = 0; j < n(); ++j)
      out(i, j) = poly::from_coefficients(tmpl_.gain_basis(), l_coeffs_[static_cast<std::size_t>(i * n() + j)]);
  return out;
}

void DccmCertificate::check_point(const Eigen::VectorXd& x) const {
  if (x.size() != n()) throw DimensionMismatch("certificate evaluated at a point of wrong dimension");
}

Eigen::MatrixXd DccmCertificate::W_at(const Eigen::VectorXd& x) const {
  check_point(x);
  const Eigen::VectorXd v = w_eval_.values(x);
  Eigen::MatrixXd out(n(), n());
  for (int i = 0; i < n(); ++i)
    for (int j = i; j < n(); ++j) out(i, j) = out(j, i) = w_coeffs_[static_cast<std::size_t>(tmpl_.w_entry(i, j))].dot(v);
  return out;
}

Eigen::MatrixXd DccmCertificate::L_at(const Eigen::VectorXd& x) const {
  check_point(x);
  const Eigen::VectorXd v = l_eval_.values(x);
  Eigen::MatrixXd out(m(), n());
  for (int i = 0; i < m(); ++i)
    for (int j = 0; j < n(); ++j) out(i, j) = l_coeffs_[static_cast<std::size_t>(i * n() + j)].dot(v);
  return out;
}

std::vector<Eigen::MatrixXd> DccmCertificate::W_gradient_at(const Eigen::VectorXd& x) const {
  check_point(x);
  std::vector<Eigen::MatrixXd> out;
  for (int k = 0; k < n(); ++k) {
    const Eigen::VectorXd v = w_eval_.derivative_values(x, k);
    Eigen::MatrixXd d(n(), n());
    for (int i = 0; i < n(); ++i)
      for (int j = i; j < n(); ++j) d(i, j) = d(j, i) = w_coeffs_[static_cast<std::size_t>(tmpl_.w_entry(i, j))].dot(v);
    out.push_back(std::move(d));
  }
  return out;
}

DccmCertificate DccmCertificate::with_zero_gain() const {
  std::vector<Eigen::VectorXd> zero(l_coeffs_.size(), Eigen::VectorXd::Zero(static_cast<Eigen::Index>(tmpl_.gain_basis().size())));
  return DccmCertificate(tmpl_, w_coeffs_, std::move(zero), margin_);
}

Eigen::MatrixXd invert_metric_dual(const Eigen::MatrixXd& W) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (W + W.transpose()));
  const Eigen::VectorXd& ev = es.eigenvalues();
  const double amax = ev.cwiseAbs().maxCoeff();
  const double amin = ev.cwiseAbs().minCoeff();
  if (!(amin > 0.0) || amax / amin > kMaxMetricCondition || !std::isfinite(amax)) {
    throw SingularMetric("W is numerically singular (|lambda| in [" + std::to_string(amin) + ", " +
                         std::to_string(amax) + "])");
  }
  const Eigen::MatrixXd& V = es.eigenvectors();
  Eigen::MatrixXd inv = V * ev.cwiseInverse().asDiagonal() * V.transpose();
  return 0.5 * (inv + inv.transpose());
}

Eigen::MatrixXd gain_at(const DccmCertificate& cert, const Eigen::VectorXd& x) {
  return cert.L_at(x) * invert_metric_dual(cert.W_at(x));
}

Eigen::MatrixXd contraction_matrix_at(const sys::ControlAffineSystem& sys, const DccmCertificate& cert,
                                      const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (sys.state_dim() != cert.n() || sys.input_dim() != cert.m())
    throw DimensionMismatch("certificate dimensions do not match the system");
  const int n = cert.n();
  const Eigen::MatrixXd W = cert.W_at(x);
  const Eigen::MatrixXd Wn = cert.W_at(sys.step(x, u));
  const Eigen::MatrixXd off = sys.A_at(x, u) * W + sys.B_at(x) * cert.L_at(x);
  Eigen::MatrixXd omega(2 * n, 2 * n);
  omega << Wn, off, off.transpose(), (1.0 - cert.beta()) * W;
  return omega;
}

double check_lemma_condition(const sys::ControlAffineSystem& sys, const DccmCertificate& cert,
                             const Eigen::VectorXd& x, const Eigen::VectorXd& u) {
  if (sys.state_dim() != cert.n() || sys.input_dim() != cert.m())
    throw DimensionMismatch("certificate dimensions do not match the system");
  const Eigen::MatrixXd M = invert_metric_dual(cert.W_at(x));
  const Eigen::MatrixXd Mn = invert_metric_dual(cert.W_at(sys.step(x, u)));
  const Eigen::MatrixXd K = cert.L_at(x) * M;
  const Eigen::MatrixXd Acl = sys.A_at(x, u) + sys.B_at(x) * K;
  const Eigen::MatrixXd T = Acl.transpose() * Mn * Acl - (1.0 - cert.beta()) * M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (T + T.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(es.eigenvalues().size() - 1);
}

}  // namespace dccm::cert
