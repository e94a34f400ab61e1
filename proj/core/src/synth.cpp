#include "dccm/synth.hpp"

#include <algorithm>
#include <set>

#include <Eigen/SVD>

#include "dccm/errors.hpp"

namespace dccm::synth {

using poly::Monomial;
using poly::Polynomial;

int AffinePolynomial::degree() const {
  int d = constant.degree();
  for (const auto& [k, p] : linear) d = std::max(d, p.degree());
  return d;
}

std::vector<Monomial> AffinePolynomial::support() const {
  std::set<Monomial> s;
  for (const auto& [m, c] : constant.terms()) s.insert(m);
  for (const auto& [k, p] : linear)
    for (const auto& [m, c] : p.terms()) s.insert(m);
  return {s.begin(), s.end()};
}

void AffinePolynomial::add(int param, const Polynomial& p) {
  if (p.is_zero()) return;
  auto [it, inserted] = linear.try_emplace(param, p);
  if (!inserted) {
    it->second += p;
    if (it->second.is_zero()) linear.erase(it);
  }
}

AffinePolynomial& AffinePolynomial::operator+=(const AffinePolynomial& other) {
  constant += other.constant;
  for (const auto& [k, p] : other.linear) add(k, p);
  return *this;
}

AffinePolynomial& AffinePolynomial::operator*=(double s) {
  constant *= s;
  if (s == 0.0) {
    linear.clear();
    return *this;
  }
  for (auto& [k, p] : linear) p *= s;
  return *this;
}

Polynomial AffinePolynomial::evaluate(const Eigen::VectorXd& theta) const {
  Polynomial out = constant;
  for (const auto& [k, p] : linear) {
    if (k >= theta.size()) throw DimensionMismatch("affine polynomial: parameter index out of range");
    out += theta(k) * p;
  }
  return out;
}

AffineMatrix::AffineMatrix(int r, int c, int nv, int np)
    : rows(r), cols(c), n_vars(nv), num_params(np), entries(static_cast<std::size_t>(r * c), AffinePolynomial(nv)) {}

AffineMatrix AffineMatrix::constant(const poly::PolyMatrix& m, int num_params) {
  AffineMatrix out(m.rows(), m.cols(), m.n_vars(), num_params);
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) out(i, j).constant = m(i, j);
  return out;
}

int AffineMatrix::degree() const {
  int d = 0;
  for (const auto& e : entries) d = std::max(d, e.degree());
  return d;
}

poly::PolyMatrix AffineMatrix::evaluate(const Eigen::VectorXd& theta) const {
  poly::PolyMatrix out(rows, cols, n_vars);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) out(i, j) = (*this)(i, j).evaluate(theta);
  return out;
}

namespace {

AffinePolynomial multiply(const Polynomial& p, const AffinePolynomial& a) {
  AffinePolynomial out(a.n_vars());
  if (p.is_zero()) return out;
  out.constant = p * a.constant;
  for (const auto& [k, q] : a.linear) out.add(k, p * q);
  return out;
}

AffinePolynomial lifted(const AffinePolynomial& a, int n_vars) {
  AffinePolynomial out(n_vars);
  out.constant = a.constant.lifted(n_vars);
  for (const auto& [k, p] : a.linear) out.linear.emplace(k, p.lifted(n_vars));
  return out;
}

}  // namespace

AffineMatrix metric_matrix(const cert::CertificateTemplate& tmpl) {
  const int n = tmpl.n();
  AffineMatrix W(n, n, n, tmpl.num_params());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int e = tmpl.w_entry(i, j);
      for (std::size_t k = 0; k < tmpl.basis().size(); ++k)
        W(i, j).add(tmpl.w_param(e, static_cast<int>(k)), Polynomial::monomial(tmpl.basis()[k]));
    }
  return W;
}

AffineMatrix gain_matrix(const cert::CertificateTemplate& tmpl) {
  AffineMatrix L(tmpl.m(), tmpl.n(), tmpl.n(), tmpl.num_params());
  for (int i = 0; i < tmpl.m(); ++i)
    for (int j = 0; j < tmpl.n(); ++j)
      for (std::size_t k = 0; k < tmpl.gain_basis().size(); ++k)
        L(i, j).add(tmpl.l_param(i, j, static_cast<int>(k)), Polynomial::monomial(tmpl.gain_basis()[k]));
  return L;
}

ContractionMatrix build_contraction_matrix(const sys::ControlAffineSystem& sys, const cert::CertificateTemplate& tmpl) {
  const int n = sys.state_dim(), m = sys.input_dim();
  if (tmpl.n() != n || tmpl.m() != m) throw DimensionMismatch("certificate template does not match the system");
  const int nv = n + m;
  const int np = tmpl.num_params();

  const AffineMatrix W = metric_matrix(tmpl);
  const AffineMatrix L = gain_matrix(tmpl);
  const sys::Linearization lin = sys.linearize();

  // W(f(x) + g(x) u): substitute into each basis monomial once.
  std::vector<Polynomial> shifted;
  for (const auto& mono : tmpl.basis()) shifted.push_back(poly::compose(Polynomial::monomial(mono), sys.successor_map()));

  AffineMatrix omega(2 * n, 2 * n, nv, np);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int e = tmpl.w_entry(i, j);
      AffinePolynomial next(nv);
      for (std::size_t k = 0; k < shifted.size(); ++k) next.add(tmpl.w_param(e, static_cast<int>(k)), shifted[k]);
      omega(i, j) = next;

      AffinePolynomial lower = lifted(W(i, j), nv);
      lower *= 1.0 - tmpl.beta();
      omega(n + i, n + j) = lower;
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      AffinePolynomial off(nv);
      for (int k = 0; k < n; ++k) off += multiply(lin.A(i, k), lifted(W(k, j), nv));
      for (int l = 0; l < m; ++l) off += multiply(lin.B(i, l).lifted(nv), lifted(L(l, j), nv));
      omega(i, n + j) = off;
      omega(n + j, i) = off;
    }
  return {std::move(omega), W};
}

int GramBlock::dim() const {
  int d = 0;
  for (const auto& b : bases) d += static_cast<int>(b.size());
  return d;
}

int GramBlock::offset(int i) const {
  int d = 0;
  for (int k = 0; k < i; ++k) d += static_cast<int>(bases[static_cast<std::size_t>(k)].size());
  return d;
}

namespace {

int gram_var(int first, int Z, int p, int q) {
  if (p > q) std::swap(p, q);
  return first + p * Z - p * (p - 1) / 2 + (q - p);
}

// Per-coordinate exponent and total-degree bounds of the half support,
// followed by the diagonal-consistency pass: a monomial whose square is
// neither in the support nor a product of two other basis monomials has a
// zero Gram diagonal, hence a zero Gram row.
std::vector<Monomial> pruned_basis(const std::set<Monomial>& support, int n_vars, int gram_degree) {
  const poly::MonomialBasis full = poly::monomial_basis(n_vars, gram_degree);
  if (support.empty()) return {};
  std::vector<int> emax(static_cast<std::size_t>(n_vars), 0), emin(static_cast<std::size_t>(n_vars), 1 << 20);
  int dmax = 0, dmin = 1 << 20;
  for (const auto& mono : support) {
    for (int k = 0; k < n_vars; ++k) {
      emax[static_cast<std::size_t>(k)] = std::max(emax[static_cast<std::size_t>(k)], mono[k]);
      emin[static_cast<std::size_t>(k)] = std::min(emin[static_cast<std::size_t>(k)], mono[k]);
    }
    dmax = std::max(dmax, mono.degree());
    dmin = std::min(dmin, mono.degree());
  }
  std::vector<Monomial> out;
  for (const auto& a : full) {
    bool keep = 2 * a.degree() <= dmax && 2 * a.degree() >= dmin;
    for (int k = 0; k < n_vars && keep; ++k)
      keep = 2 * a[k] <= emax[static_cast<std::size_t>(k)] && 2 * a[k] >= emin[static_cast<std::size_t>(k)];
    if (keep) out.push_back(a);
  }
  for (bool changed = true; changed;) {
    changed = false;
    std::set<Monomial> cross;
    for (std::size_t i = 0; i < out.size(); ++i)
      for (std::size_t j = i + 1; j < out.size(); ++j) cross.insert(out[i] * out[j]);
    std::vector<Monomial> kept;
    for (const auto& a : out) {
      const Monomial sq = a * a;
      if (support.contains(sq) || cross.contains(sq)) {
        kept.push_back(a);
      } else {
        changed = true;
      }
    }
    out = std::move(kept);
  }
  return out;
}

struct SosTarget {
  const AffineMatrix* P = nullptr;
  int shift_var = -1;
  int gram_degree = 0;
};

using Bases = std::vector<std::vector<Monomial>>;

// Coefficient of `mono` in P(i, j) - [i == j] shift, as  c0 + c^T v  over
// v = (theta, shift variables).
std::pair<double, Eigen::VectorXd> coefficient_form(const SosTarget& t, int i, int j, const Monomial& mono, int nv) {
  const AffinePolynomial& a = (*t.P)(i, j);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(nv);
  for (const auto& [k, p] : a.linear) c(k) = p.coeff(mono);
  if (i == j && t.shift_var >= 0 && mono.degree() == 0) c(t.shift_var) -= 1.0;
  return {a.constant.coeff(mono), c};
}

std::set<Monomial> raw_support(const SosTarget& t, int i, int j) {
  const auto s = (*t.P)(i, j).support();
  std::set<Monomial> out(s.begin(), s.end());
  if (i == j && t.shift_var >= 0) out.insert(Monomial::one(t.P->n_vars));
  return out;
}

// Chooses Gram bases for every target. Coefficients that no Gram product can
// produce must vanish; those parameter-only equations can make further
// support monomials identically zero, which in turn shrinks the bases. The
// loop runs to a fixed point and never removes a monomial that some feasible
// point could use.
std::vector<Bases> choose_bases(const std::vector<SosTarget>& targets, int nv, bool prune) {
  std::vector<Bases> bases(targets.size());
  std::vector<std::vector<std::set<Monomial>>> eff(targets.size());
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const int d = targets[t].P->rows;
    for (int i = 0; i < d; ++i) {
      if (prune) {
        eff[t].push_back(raw_support(targets[t], i, i));
      } else {
        const auto full = poly::monomial_basis(targets[t].P->n_vars, targets[t].gram_degree);
        bases[t].push_back(full.ordering());
      }
    }
  }
  if (!prune) return bases;

  for (int round = 0; round < 50; ++round) {
    std::vector<Bases> next(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t)
      for (const auto& s : eff[t]) next[t].push_back(pruned_basis(s, targets[t].P->n_vars, targets[t].gram_degree));
    if (round > 0 && next == bases) break;
    bases = std::move(next);

    std::vector<std::pair<double, Eigen::VectorXd>> rows;
    for (std::size_t t = 0; t < targets.size(); ++t) {
      const int d = targets[t].P->rows;
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          std::set<Monomial> reach;
          for (const auto& a : bases[t][static_cast<std::size_t>(i)])
            for (const auto& b : bases[t][static_cast<std::size_t>(j)]) reach.insert(a * b);
          for (const auto& mono : raw_support(targets[t], i, j))
            if (!reach.contains(mono)) rows.push_back(coefficient_form(targets[t], i, j, mono, nv));
        }
    }
    if (rows.empty()) break;

    Eigen::MatrixXd E(static_cast<Eigen::Index>(rows.size()), nv);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      E.row(static_cast<Eigen::Index>(k)) = rows[k].second.transpose();
      b(static_cast<Eigen::Index>(k)) = -rows[k].first;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > tol) ++rank;
    Eigen::VectorXd t0 = svd.matrixU().leftCols(rank).transpose() * b;
    for (int k = 0; k < rank; ++k) t0(k) /= sv(k);
    const Eigen::VectorXd v0 = svd.matrixV().leftCols(rank) * t0;
    // Inconsistent equations: the SDP itself will report infeasibility.
    if ((E * v0 - b).cwiseAbs().maxCoeff() > 1e-9 * (1.0 + b.cwiseAbs().maxCoeff())) break;
    const Eigen::MatrixXd N = svd.matrixV().rightCols(nv - rank);

    for (std::size_t t = 0; t < targets.size(); ++t)
      for (int i = 0; i < targets[t].P->rows; ++i) {
        std::set<Monomial> kept;
        for (const auto& mono : eff[t][static_cast<std::size_t>(i)]) {
          const auto [c0, c] = coefficient_form(targets[t], i, i, mono, nv);
          const double scale = 1.0 + std::abs(c0) + c.norm();
          const bool vanishes = std::abs(c0 + c.dot(v0)) <= 1e-9 * scale && (N.transpose() * c).norm() <= 1e-9 * scale;
          if (!vanishes) kept.insert(mono);
        }
        eff[t][static_cast<std::size_t>(i)] = std::move(kept);
      }
  }
  return bases;
}

struct Equation {
  std::map<int, double> coeffs;
  double rhs = 0.0;
};

// Adds  w^T (P - shift I) w = z^T G z,  G >= 0; returns the Gram layout.
GramBlock add_matrix_sos(const SosTarget& target, Bases bases, int& next_var, std::vector<sdp::LmiBlock>& blocks,
                         std::vector<sdp::LinearEquality>& equalities) {
  const AffineMatrix& P = *target.P;
  const int d = P.rows;
  GramBlock g;
  g.bases = std::move(bases);
  g.first_var = next_var;
  const int Z = g.dim();
  next_var += Z * (Z + 1) / 2;

  if (Z > 0) {
    std::vector<Eigen::Triplet<double>> trip;
    sdp::LmiBlock lmi(Eigen::MatrixXd::Zero(Z, Z));
    for (int p = 0; p < Z; ++p)
      for (int q = p; q < Z; ++q) {
        Eigen::SparseMatrix<double> E(Z, Z);
        trip.clear();
        trip.emplace_back(p, q, 1.0);
        if (p != q) trip.emplace_back(q, p, 1.0);
        E.setFromTriplets(trip.begin(), trip.end());
        lmi.add(gram_var(g.first_var, Z, p, q), std::move(E));
      }
    blocks.push_back(std::move(lmi));
  }

  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      std::map<Monomial, Equation> eqs;
      const auto& Bi = g.bases[static_cast<std::size_t>(i)];
      const auto& Bj = g.bases[static_cast<std::size_t>(j)];
      const int oi = g.offset(i), oj = g.offset(j);
      for (std::size_t a = 0; a < Bi.size(); ++a)
        for (std::size_t b = (i == j ? a : 0); b < Bj.size(); ++b) {
          const double c = (i == j && a != b) ? 2.0 : 1.0;
          eqs[Bi[a] * Bj[b]].coeffs[gram_var(g.first_var, Z, oi + static_cast<int>(a), oj + static_cast<int>(b))] += c;
        }
      const AffinePolynomial& Pij = P(i, j);
      for (const auto& [mono, c] : Pij.constant.terms()) eqs[mono].rhs += c;
      for (const auto& [k, poly] : Pij.linear)
        for (const auto& [mono, c] : poly.terms()) eqs[mono].coeffs[k] -= c;
      if (i == j && target.shift_var >= 0) eqs[Monomial::one(P.n_vars)].coeffs[target.shift_var] += 1.0;

      for (auto& [mono, eq] : eqs) {
        sdp::LinearEquality le;
        for (const auto& [v, c] : eq.coeffs)
          if (c != 0.0) le.coeffs.emplace_back(v, c);
        le.rhs = eq.rhs;
        if (le.coeffs.empty() && le.rhs == 0.0) continue;
        equalities.push_back(std::move(le));
      }
    }
  return g;
}

void check_degree(const AffineMatrix& P, int gram_degree) {
  for (int i = 0; i < P.rows; ++i)
    for (int j = 0; j < P.cols; ++j)
      for (const auto& mono : P(i, j).support())
        if (mono.degree() > 2 * gram_degree)
          throw InvalidArgument("Gram degree " + std::to_string(gram_degree) + " too low: monomial " +
                                mono.to_string() + " of entry (" + std::to_string(i + 1) + "," +
                                std::to_string(j + 1) + ") has degree " + std::to_string(mono.degree()));
}

}  // namespace

Eigen::MatrixXd GramBlock::matrix(const Eigen::VectorXd& y) const {
  const int Z = dim();
  Eigen::MatrixXd G(Z, Z);
  for (int p = 0; p < Z; ++p)
    for (int q = p; q < Z; ++q) G(p, q) = G(q, p) = y(gram_var(first_var, Z, p, q));
  return G;
}

SosProgram compile_sos(const ContractionMatrix& cm, const SosOptions& opts) {
  const AffineMatrix& omega = cm.omega;
  if (omega.rows != omega.cols) throw DimensionMismatch("contraction matrix is not square");
  if (opts.epsilon < 0.0) throw InvalidArgument("epsilon must be nonnegative");
  const int np = omega.num_params;
  if (cm.metric && cm.metric->num_params != np) throw DimensionMismatch("metric and contraction matrix parameter counts differ");

  SosProgram prog;
  prog.num_params = np;
  int next = np;
  prog.r_var = next++;
  if (cm.metric) prog.r_w_var = next++;

  const int default_degree = (omega.degree() + 1) / 2;
  prog.gram_degree = opts.gram_degree.value_or(default_degree);
  if (prog.gram_degree < 0) throw InvalidArgument("negative Gram degree");

  check_degree(omega, prog.gram_degree);
  std::vector<SosTarget> targets{{&omega, prog.r_var, prog.gram_degree}};
  if (cm.metric) targets.push_back({&*cm.metric, prog.r_w_var, (cm.metric->degree() + 1) / 2});
  std::vector<Bases> bases = choose_bases(targets, next, opts.prune_gram_basis);

  std::vector<sdp::LmiBlock> blocks;
  std::vector<sdp::LinearEquality> eqs;
  prog.omega_gram = add_matrix_sos(targets[0], std::move(bases[0]), next, blocks, eqs);
  if (cm.metric) prog.metric_gram = add_matrix_sos(targets[1], std::move(bases[1]), next, blocks, eqs);

  // Scalar side constraints, all diagonal.
  std::vector<std::pair<double, std::pair<int, double>>> scalars;  // c + a * y_v >= 0
  scalars.push_back({-opts.epsilon, {prog.r_var, 1.0}});
  if (cm.metric) scalars.push_back({-opts.epsilon, {prog.r_w_var, 1.0}});
  if (opts.mode == ObjectiveMode::MaximizeMargin && opts.r_cap) scalars.push_back({*opts.r_cap, {prog.r_var, -1.0}});
  if (opts.coefficient_bound) {
    for (int k = 0; k < np; ++k) {
      scalars.push_back({*opts.coefficient_bound, {k, 1.0}});
      scalars.push_back({*opts.coefficient_bound, {k, -1.0}});
    }
  }
  const int ns = static_cast<int>(scalars.size());
  Eigen::MatrixXd c0 = Eigen::MatrixXd::Zero(ns, ns);
  std::map<int, std::vector<Eigen::Triplet<double>>> per_var;
  for (int s = 0; s < ns; ++s) {
    c0(s, s) = scalars[static_cast<std::size_t>(s)].first;
    const auto [v, a] = scalars[static_cast<std::size_t>(s)].second;
    per_var[v].emplace_back(s, s, a);
  }
  sdp::LmiBlock side(c0);
  for (auto& [v, trip] : per_var) {
    Eigen::SparseMatrix<double> E(ns, ns);
    E.setFromTriplets(trip.begin(), trip.end());
    side.add(v, std::move(E));
  }
  blocks.push_back(std::move(side));

  if (opts.mode == ObjectiveMode::FeasibilityOnly) eqs.push_back({{{prog.r_var, 1.0}}, opts.epsilon});

  prog.problem = sdp::SdpProblem(next);
  if (opts.mode == ObjectiveMode::MaximizeMargin) prog.problem.objective(prog.r_var) = -1.0;
  prog.problem.blocks = std::move(blocks);
  prog.problem.equalities = std::move(eqs);
  return prog;
}

SynthesisResult synthesize_detailed(const sys::ControlAffineSystem& sys, const cert::CertificateTemplate& tmpl,
                                    const SynthesisOptions& opts) {
  const ContractionMatrix cm = build_contraction_matrix(sys, tmpl);
  SosProgram prog = compile_sos(cm, opts.sos);
  sdp::SdpSolution sol = sdp::solve_sdp(prog.problem, opts.solver);
  const std::string detail = std::string(sdp::to_string(sol.status)) + (sol.message.empty() ? "" : ": " + sol.message);
  if (sol.status == sdp::SolveStatus::Infeasible) {
    throw SynthesisInfeasible(sol.status, "no certificate exists for this template (" + detail + ")");
  }
  if (sol.status != sdp::SolveStatus::Optimal) throw SolverFailure(sol.status, "SDP solver failed (" + detail + ")");
  const double r = sol.y(prog.r_var);
  cert::DccmCertificate c = cert::DccmCertificate::from_params(tmpl, sol.y.head(prog.num_params), r);
  return {std::move(c), std::move(sol), std::move(prog)};
}

cert::DccmCertificate synthesize(const sys::ControlAffineSystem& sys, const cert::CertificateTemplate& tmpl,
                                 const SynthesisOptions& opts) {
  return synthesize_detailed(sys, tmpl, opts).certificate;
}

}  // namespace dccm::synth
