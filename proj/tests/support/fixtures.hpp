#pragma once

// Systems and certificates shared by the geodesic, controller, simulation
// and I/O tests.

#include <vector>

#include <Eigen/Dense>

#include "dccm/certificate.hpp"
#include "dccm/poly.hpp"
#include "dccm/synth.hpp"
#include "dccm/system.hpp"

namespace dccm::testing {

using poly::Monomial;
using poly::Polynomial;

// x+ = F x + G u
inline sys::ControlAffineSystem linear_system(const Eigen::MatrixXd& F, const Eigen::MatrixXd& G) {
  const int n = static_cast<int>(F.rows());
  std::vector<Polynomial> f;
  for (int i = 0; i < n; ++i) {
    Polynomial p(n);
    for (int j = 0; j < n; ++j) p.add_term(Monomial::variable(n, j), F(i, j));
    f.push_back(p);
  }
  poly::PolyMatrix g(n, static_cast<int>(G.cols()), n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < G.cols(); ++j) g(i, j) = Polynomial::constant(n, G(i, j));
  return sys::ControlAffineSystem(f, g);
}

// Certificate from explicit polynomial entries: W by upper triangle
// (row-major), L row-major.
inline cert::DccmCertificate make_certificate(int n, int m, int degree, const std::vector<Polynomial>& w,
                                              const std::vector<Polynomial>& l, double beta = 0.1) {
  cert::CertificateTemplate t(n, m, degree, degree, beta);
  std::vector<Eigen::VectorXd> wc, lc;
  for (const auto& p : w) wc.push_back(poly::coefficients(p, t.basis()));
  for (const auto& p : l) lc.push_back(poly::coefficients(p, t.gain_basis()));
  return cert::DccmCertificate(t, wc, lc, 0.0);
}

// Constant W and L given as matrices.
inline cert::DccmCertificate constant_certificate(const Eigen::MatrixXd& W, const Eigen::MatrixXd& L,
                                                  double beta = 0.1) {
  const int n = static_cast<int>(W.rows()), m = static_cast<int>(L.rows());
  std::vector<Polynomial> w, l;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) w.push_back(Polynomial::constant(n, W(i, j)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) l.push_back(Polynomial::constant(n, L(i, j)));
  return make_certificate(n, m, 0, w, l, beta);
}

// W = [[1 + x1^2, 0.3 x1 x2], [0.3 x1 x2, 2 + x2^2]], L = 0: positive definite
// everywhere and curved enough that geodesics bend.
inline cert::DccmCertificate curved_certificate() {
  const Polynomial x1 = Polynomial::variable(2, 0), x2 = Polynomial::variable(2, 1);
  const Polynomial one = Polynomial::constant(2, 1.0);
  return make_certificate(2, 1, 2, {one + x1 * x1, 0.3 * (x1 * x2), 2.0 * one + x2 * x2},
                          {Polynomial(2), Polynomial(2)});
}

// Degree-2 CSTR certificate at beta = 0.1, synthesized once per process.
inline const cert::DccmCertificate& cstr_certificate() {
  static const cert::DccmCertificate c =
      synth::synthesize(sys::cstr_preset(), cert::CertificateTemplate(2, 1, 2, 2, 0.1));
  return c;
}

}  // namespace dccm::testing
