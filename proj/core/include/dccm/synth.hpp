#pragma once

// DCCM synthesis by sum-of-squares programming.
//
// The unknown certificate parameters theta (see CertificateTemplate) enter
// the contraction matrix
//
//   Omega(x, u) = [[W(f + g u), A W + B L], [(A W + B L)^T, (1 - beta) W]]
//
// affinely. compile_sos turns  w^T (Omega - r I) w  in SOS(x, u, w)  and
// w^T W w - r_W |w|^2  in SOS(x, w)  into one SdpProblem with Gram matrices
// over (monomials) x (w-coordinates).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dccm/certificate.hpp"
#include "dccm/errors.hpp"
#include "dccm/poly.hpp"
#include "dccm/sdp.hpp"
#include "dccm/system.hpp"

namespace dccm::synth {

// p_0(y) + sum_k theta_k p_k(y).
struct AffinePolynomial {
  poly::Polynomial constant;
  std::map<int, poly::Polynomial> linear;

  explicit AffinePolynomial(int n_vars = 0) : constant(n_vars) {}
  int n_vars() const { return constant.n_vars(); }
  int degree() const;
  // Monomials appearing in any component.
  std::vector<poly::Monomial> support() const;
  void add(int param, const poly::Polynomial& p);
  AffinePolynomial& operator+=(const AffinePolynomial& other);
  AffinePolynomial& operator*=(double s);
  poly::Polynomial evaluate(const Eigen::VectorXd& theta) const;
};

struct AffineMatrix {
  int rows = 0;
  int cols = 0;
  int n_vars = 0;
  int num_params = 0;
  std::vector<AffinePolynomial> entries;

  AffineMatrix() = default;
  AffineMatrix(int rows, int cols, int n_vars, int num_params);
  static AffineMatrix constant(const poly::PolyMatrix& m, int num_params = 0);
  AffinePolynomial& operator()(int i, int j) { return entries[static_cast<std::size_t>(i * cols + j)]; }
  const AffinePolynomial& operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * cols + j)]; }
  int degree() const;
  poly::PolyMatrix evaluate(const Eigen::VectorXd& theta) const;
};

struct ContractionMatrix {
  // 2n x 2n in the variables (x, u).
  AffineMatrix omega;
  // W(x), n x n in x; absent when only omega is to be certified.
  std::optional<AffineMatrix> metric;
};

// W(x) and L(x) as affine matrices in the template parameters.
AffineMatrix metric_matrix(const cert::CertificateTemplate& tmpl);
AffineMatrix gain_matrix(const cert::CertificateTemplate& tmpl);

ContractionMatrix build_contraction_matrix(const sys::ControlAffineSystem& sys, const cert::CertificateTemplate& tmpl);

enum class ObjectiveMode { MaximizeMargin, FeasibilityOnly };

struct SosOptions {
  // Half-degree of the Gram monomial vector; ceil(max entry degree / 2) when unset.
  std::optional<int> gram_degree;
  double epsilon = 1e-4;
  ObjectiveMode mode = ObjectiveMode::MaximizeMargin;
  // Upper bound on r in MaximizeMargin mode.
  std::optional<double> r_cap = 10.0;
  // |theta_k| <= coefficient_bound; bounds the otherwise scale-invariant cone of certificates.
  std::optional<double> coefficient_bound = 100.0;
  // Drops Gram monomials that cannot appear in any SOS decomposition.
  bool prune_gram_basis = true;
};

// One Gram matrix G with z = concat_i (basis[i] * w_i).
struct GramBlock {
  std::vector<std::vector<poly::Monomial>> bases;
  int first_var = 0;
  int dim() const;
  // Offset of coordinate i's monomials inside z.
  int offset(int i) const;
  Eigen::MatrixXd matrix(const Eigen::VectorXd& y) const;
};

struct SosProgram {
  sdp::SdpProblem problem;
  int num_params = 0;
  int r_var = -1;
  int r_w_var = -1;
  GramBlock omega_gram;
  std::optional<GramBlock> metric_gram;
  int gram_degree = 0;
};

// Throws InvalidArgument naming the first monomial of degree > 2 gram_degree.
SosProgram compile_sos(const ContractionMatrix& cm, const SosOptions& opts = {});

struct SynthesisOptions {
  SosOptions sos;
  sdp::SolverOptions solver;
};

class SynthesisInfeasible : public Error {
 public:
  SynthesisInfeasible(sdp::SolveStatus status, const std::string& what) : Error(what), status_(status) {}
  sdp::SolveStatus status() const { return status_; }

 private:
  sdp::SolveStatus status_;
};

class SolverFailure : public Error {
 public:
  SolverFailure(sdp::SolveStatus status, const std::string& what) : Error(what), status_(status) {}
  sdp::SolveStatus status() const { return status_; }

 private:
  sdp::SolveStatus status_;
};

struct SynthesisResult {
  cert::DccmCertificate certificate;
  sdp::SdpSolution solution;
  SosProgram program;
};

SynthesisResult synthesize_detailed(const sys::ControlAffineSystem& sys, const cert::CertificateTemplate& tmpl,
                                    const SynthesisOptions& opts = {});
cert::DccmCertificate synthesize(const sys::ControlAffineSystem& sys, const cert::CertificateTemplate& tmpl,
                                 const SynthesisOptions& opts = {});

}  // namespace dccm::synth
