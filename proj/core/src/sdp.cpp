#include "dccm/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "dccm/errors.hpp"

namespace dccm::sdp {

namespace {

using BlockMat = std::vector<Eigen::MatrixXd>;

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_symmetric(const Eigen::MatrixXd& m, double tol) {
  return m.rows() == m.cols() && (m - m.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool is_diagonal(const Eigen::SparseMatrix<double>& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
      if (it.row() != it.col() && it.value() != 0.0) return false;
  return true;
}

double lambda_min(const Eigen::MatrixXd& m) {
  if (m.rows() == 0) return kInf;
  if (m.rows() == 1) return m(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

// Problem restricted to y = y0 + N w with independent, effective directions w.
struct ReducedProblem {
  Eigen::VectorXd y0;
  Eigen::MatrixXd N;
  std::vector<int> dims;
  BlockMat F0;
  // Per block, column j is vec(F_j) (column-major).
  std::vector<Eigen::MatrixXd> Fvec;
  Eigen::VectorXd c;
  double offset = 0.0;

  int num_dirs() const { return static_cast<int>(c.size()); }
  int total_dim() const {
    int n = 0;
    for (int d : dims) n += d;
    return n;
  }
};

struct Preprocessed {
  ReducedProblem reduced;
  SolveStatus early_status = SolveStatus::Optimal;
  bool early_exit = false;
  std::string message;
};

Preprocessed preprocess(const SdpProblem& prob, const SolverOptions& opts) {
  Preprocessed out;
  ReducedProblem& r = out.reduced;
  const int nv = prob.num_vars;

  // Equality elimination.
  std::vector<const LinearEquality*> rows;
  for (const auto& eq : prob.equalities) {
    bool any = false;
    for (const auto& [i, a] : eq.coeffs) any = any || a != 0.0;
    if (any) {
      rows.push_back(&eq);
    } else if (std::abs(eq.rhs) > opts.feas_tol) {
      out.early_exit = true;
      out.early_status = SolveStatus::Infeasible;
      out.message = "equality 0 = " + std::to_string(eq.rhs) + " cannot hold";
      return out;
    }
  }
  if (rows.empty()) {
    r.y0 = Eigen::VectorXd::Zero(nv);
    r.N = Eigen::MatrixXd::Identity(nv, nv);
  } else {
    Eigen::MatrixXd E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), nv);
    Eigen::VectorXd b(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t k = 0; k < rows.size(); ++k) {
      for (const auto& [i, a] : rows[k]->coeffs) E(static_cast<Eigen::Index>(k), i) += a;
      b(static_cast<Eigen::Index>(k)) = rows[k]->rhs;
    }
    Eigen::VectorXd sv;
    Eigen::MatrixXd U, V;
    {
      Eigen::BDCSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeFullV);
      sv = svd.singularValues();
      U = svd.matrixU();
      V = svd.matrixV();
    }
    // BDCSVD occasionally returns NaN on rank-deficient input.
    if (!sv.allFinite() || !U.allFinite() || !V.allFinite()) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeThinU | Eigen::ComputeFullV);
      sv = svd.singularValues();
      U = svd.matrixU();
      V = svd.matrixV();
    }
    const double thresh = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
    int rank = 0;
    while (rank < sv.size() && sv(rank) > thresh) ++rank;
    Eigen::VectorXd t = U.leftCols(rank).transpose() * b;
    for (int k = 0; k < rank; ++k) t(k) /= sv(k);
    r.y0 = V.leftCols(rank) * t;
    const double res = (E * r.y0 - b).cwiseAbs().maxCoeff();
    if (res > opts.feas_tol * (1.0 + b.cwiseAbs().maxCoeff())) {
      out.early_exit = true;
      out.early_status = SolveStatus::Infeasible;
      out.message = "equality constraints are inconsistent (residual " + std::to_string(res) + ")";
      return out;
    }
    r.N = V.rightCols(nv - rank);
  }
  const int p = static_cast<int>(r.N.cols());

  // Blocks whose data are all diagonal are split into scalar blocks.
  for (const auto& blk : prob.blocks) {
    const int d = blk.dim();
    bool diagonal = d > 1 && Eigen::MatrixXd(blk.constant.diagonal().asDiagonal()) == blk.constant;
    for (const auto& t : blk.terms) diagonal = diagonal && is_diagonal(t.matrix);

    Eigen::MatrixXd f0 = blk.constant;
    Eigen::MatrixXd fvec = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d) * d, p);
    for (const auto& t : blk.terms) {
      for (int k = 0; k < t.matrix.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(t.matrix, k); it; ++it) {
          f0(it.row(), it.col()) += r.y0(t.var) * it.value();
          if (p > 0) fvec.row(it.row() + it.col() * d) += it.value() * r.N.row(t.var);
        }
      }
    }
    if (diagonal) {
      for (int i = 0; i < d; ++i) {
        r.dims.push_back(1);
        r.F0.push_back(Eigen::MatrixXd::Constant(1, 1, f0(i, i)));
        r.Fvec.push_back(fvec.row(i + i * d));
      }
    } else {
      r.dims.push_back(d);
      r.F0.push_back(std::move(f0));
      r.Fvec.push_back(std::move(fvec));
    }
  }

  Eigen::VectorXd c = r.N.transpose() * prob.objective;
  r.offset = prob.objective.dot(r.y0);

  // Drop directions that do not move any block.
  if (p > 0) {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(p, p);
    for (const auto& fv : r.Fvec) G.noalias() += fv.transpose() * fv;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd& ev = es.eigenvalues();
    const double top = ev.size() > 0 ? std::max(ev(ev.size() - 1), 0.0) : 0.0;
    const double thresh = top > 0.0 ? 1e-12 * top : 1.0;
    int first_kept = 0;
    while (first_kept < p && ev(first_kept) <= thresh) ++first_kept;
    const Eigen::MatrixXd Q = es.eigenvectors().rightCols(p - first_kept);
    if (first_kept > 0) {
      const Eigen::VectorXd c_null = es.eigenvectors().leftCols(first_kept).transpose() * c;
      if (c_null.cwiseAbs().maxCoeff() > 1e-9 * (1.0 + c.norm())) {
        out.early_exit = true;
        out.early_status = SolveStatus::NumericalFailure;
        out.message = "objective is unbounded below along a direction that leaves every block unchanged";
        return out;
      }
    }
    for (auto& fv : r.Fvec) fv = fv * Q;
    r.c = Q.transpose() * c;
    r.N = r.N * Q;
  } else {
    r.c = Eigen::VectorXd::Zero(0);
  }

  // Blocks no direction moves are constant: feasible or not, they carry no interior.
  for (std::size_t k = r.dims.size(); k-- > 0;) {
    if (r.Fvec[k].size() > 0 && r.Fvec[k].cwiseAbs().maxCoeff() > 0.0) continue;
    if (lambda_min(0.5 * (r.F0[k] + r.F0[k].transpose())) < -opts.feas_tol) {
      out.early_exit = true;
      out.early_status = SolveStatus::Infeasible;
      out.message = "a constant LMI block is not positive semidefinite";
      return out;
    }
    r.dims.erase(r.dims.begin() + static_cast<std::ptrdiff_t>(k));
    r.F0.erase(r.F0.begin() + static_cast<std::ptrdiff_t>(k));
    r.Fvec.erase(r.Fvec.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return out;
}

double inner(const BlockMat& a, const BlockMat& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k].cwiseProduct(b[k]).sum();
  return s;
}

double frob(const BlockMat& a) { return std::sqrt(inner(a, a)); }

BlockMat identity_blocks(const std::vector<int>& dims, double scale) {
  BlockMat out;
  for (int d : dims) out.push_back(scale * Eigen::MatrixXd::Identity(d, d));
  return out;
}

// <F_j, M> for every direction j.
Eigen::VectorXd apply_adjoint(const ReducedProblem& r, const BlockMat& M) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(r.num_dirs());
  for (std::size_t k = 0; k < M.size(); ++k) {
    Eigen::Map<const Eigen::VectorXd> m(M[k].data(), M[k].size());
    v.noalias() += r.Fvec[k].transpose() * m;
  }
  return v;
}

// sum_j w_j F_j.
BlockMat apply_forward(const ReducedProblem& r, const Eigen::VectorXd& w) {
  BlockMat out;
  for (std::size_t k = 0; k < r.dims.size(); ++k) {
    const int d = r.dims[k];
    Eigen::VectorXd v = r.Fvec[k] * w;
    out.emplace_back(Eigen::Map<Eigen::MatrixXd>(v.data(), d, d));
  }
  return out;
}

Eigen::MatrixXd sym(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Largest alpha with X + alpha dX >= 0 (inf when dX keeps X in the cone).
double max_step(const BlockMat& X, const BlockMat& dX) {
  double alpha = kInf;
  for (std::size_t k = 0; k < X.size(); ++k) {
    if (X[k].rows() == 1) {
      if (dX[k](0, 0) < 0.0) alpha = std::min(alpha, -X[k](0, 0) / dX[k](0, 0));
      continue;
    }
    Eigen::LLT<Eigen::MatrixXd> llt(X[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd M = L.triangularView<Eigen::Lower>().solve(dX[k]);
    M = L.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd(M.transpose()));
    const double lm = lambda_min(M);
    if (lm < 0.0) alpha = std::min(alpha, -1.0 / lm);
  }
  return alpha;
}

// H_jk = <F_j, X F_k R> for symmetric X, R.
Eigen::MatrixXd schur_matrix(const ReducedProblem& r, const BlockMat& X, const BlockMat& R) {
  const int p = r.num_dirs();
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(p, p);
  for (std::size_t k = 0; k < r.dims.size(); ++k) {
    const int d = r.dims[k];
    const Eigen::MatrixXd& fv = r.Fvec[k];
    if (d == 1) {
      H.noalias() += (X[k](0, 0) * R[k](0, 0)) * fv.transpose() * fv;
      continue;
    }
    Eigen::MatrixXd P(static_cast<Eigen::Index>(d) * d, p);
    for (int j = 0; j < p; ++j) {
      Eigen::Map<const Eigen::MatrixXd> Fj(fv.col(j).data(), d, d);
      Eigen::Map<Eigen::MatrixXd> Pj(P.col(j).data(), d, d);
      Pj.noalias() = X[k] * Fj * R[k];
    }
    H.noalias() += fv.transpose() * P;
  }
  return H;
}

struct Direction {
  Eigen::VectorXd dw;
  BlockMat dX;
  BlockMat dS;
};

struct IpmResult {
  Eigen::VectorXd w;
  SolveStatus status = SolveStatus::MaxIterations;
  int iterations = 0;
  double relgap = kInf;
  std::string message;
};

IpmResult interior_point(const ReducedProblem& r, const SolverOptions& opts) {
  IpmResult res;
  const int p = r.num_dirs();
  const int n_tot = r.total_dim();
  const double sqrt_n = std::sqrt(static_cast<double>(n_tot));

  const double norm_c = r.c.norm();
  const double norm_f0 = frob(r.F0);
  double max_fj = 0.0;
  double xi = std::max(10.0, sqrt_n);
  for (int j = 0; j < p; ++j) {
    double nj = 0.0;
    for (const auto& fv : r.Fvec) nj += fv.col(j).squaredNorm();
    nj = std::sqrt(nj);
    max_fj = std::max(max_fj, nj);
    xi = std::max(xi, n_tot * (1.0 + std::abs(r.c(j))) / (1.0 + nj));
  }
  const double eta = std::max({10.0, sqrt_n, max_fj, norm_f0});

  BlockMat X = identity_blocks(r.dims, xi);
  BlockMat S = identity_blocks(r.dims, eta);
  Eigen::VectorXd w = Eigen::VectorXd::Zero(p);

  double best_dinf = kInf;
  int stall = 0;
  int tiny_steps = 0;

  // Best iterate by max(pinf, dinf, relgap); X-residuals should shrink
  // monotonically, so sustained growth means the directions lost accuracy.
  Eigen::VectorXd best_w = w;
  double best_merit = kInf;
  double min_pinf = kInf;
  int diverging = 0;

  for (int it = 0; it < opts.max_iters; ++it) {
    res.iterations = it;
    BlockMat Sw = apply_forward(r, w);
    BlockMat Rd(r.dims.size());
    for (std::size_t k = 0; k < Sw.size(); ++k) {
      Sw[k] += r.F0[k];
      Rd[k] = Sw[k] - S[k];
    }
    const Eigen::VectorXd rp = r.c - apply_adjoint(r, X);
    const double xs = inner(X, S);
    const double mu = xs / n_tot;
    const double pobj = r.c.dot(w) + r.offset;
    const double dobj = -inner(r.F0, X) + r.offset;
    const double pinf = rp.norm() / (1.0 + norm_c);
    const double dinf = frob(Rd) / (1.0 + norm_f0);
    const double relgap = std::max(xs, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opts.verbose) {
      std::cerr << "ipm " << it << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf << " dinf " << dinf
                << " gap " << relgap << " mu " << mu << '\n';
    }
    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol && relgap <= opts.gap_tol) {
      res.w = w;
      res.relgap = relgap;
      res.status = SolveStatus::Optimal;
      return res;
    }
    // Pure feasibility: any point with F(w) >= 0 solves it.
    if (norm_c == 0.0 && dinf <= opts.feas_tol) {
      double lm = kInf;
      for (const auto& b : Sw) lm = std::min(lm, lambda_min(b));
      if (lm >= -opts.feas_tol) {
        res.w = w;
        res.relgap = 0.0;
        res.status = SolveStatus::Optimal;
        return res;
      }
    }
    const double merit = std::max({pinf, dinf, relgap});
    if (merit < best_merit) {
      best_merit = merit;
      best_w = w;
      res.relgap = relgap;
    }
    if (pinf > 10.0 * min_pinf && pinf > opts.feas_tol) {
      if (++diverging >= 5) {
        res.w = best_w;
        res.status = SolveStatus::NumericalFailure;
        res.message = "dual residual diverged; best iterate has residual " + std::to_string(best_merit);
        return res;
      }
    } else {
      diverging = 0;
    }
    min_pinf = std::min(min_pinf, pinf);

    // Farkas certificate: X >= 0, <F_j, X> ~ 0, <F0, X> < 0.
    if (dinf > opts.feas_tol) {
      double trX = 0.0;
      for (const auto& x : X) trX += x.trace();
      const double g = -inner(r.F0, X) / trX;
      const double cert = (r.c - rp).norm() / trX;
      if (g > 0.0 && cert <= opts.feas_tol * g) {
        res.w = w;
        res.status = SolveStatus::Infeasible;
        res.message = "infeasibility certificate found";
        return res;
      }
      if (dinf < 0.99 * best_dinf) {
        best_dinf = dinf;
        stall = 0;
      } else if (++stall >= opts.stall_iters) {
        res.w = w;
        res.status = SolveStatus::Infeasible;
        res.message = "LMI residual stalled above tolerance";
        return res;
      }
    } else {
      stall = 0;
    }

    BlockMat Sinv;
    for (const auto& s : S) {
      Eigen::LLT<Eigen::MatrixXd> llt(s);
      if (llt.info() != Eigen::Success) {
        res.w = w;
        res.status = SolveStatus::NumericalFailure;
        res.message = "dual slack lost positive definiteness";
        return res;
      }
      Sinv.push_back(sym(llt.solve(Eigen::MatrixXd::Identity(s.rows(), s.cols()))));
    }

    // Schur complement H_jk = <F_j, X F_k S^-1>.
    Eigen::MatrixXd H = schur_matrix(r, X, Sinv);
    H = sym(H);
    Eigen::LLT<Eigen::MatrixXd> hchol(H);
    if (hchol.info() != Eigen::Success) {
      const double reg = 1e-13 * std::max(1.0, H.diagonal().cwiseAbs().maxCoeff());
      H.diagonal().array() += reg;
      hchol.compute(H);
      if (hchol.info() != Eigen::Success) {
        res.w = w;
        res.status = SolveStatus::NumericalFailure;
        res.message = "Schur complement is not positive definite";
        return res;
      }
    }

    auto direction = [&](double sigma_mu, const BlockMat* corr) {
      Direction dir;
      BlockMat T(r.dims.size());
      for (std::size_t k = 0; k < T.size(); ++k) {
        Eigen::MatrixXd M = X[k] * Rd[k];
        if (corr) M += (*corr)[k];
        T[k] = sigma_mu * Sinv[k] - M * Sinv[k];
      }
      const Eigen::VectorXd rhs = apply_adjoint(r, T) - r.c;
      auto complete = [&](Direction& d) {
        d.dS = apply_forward(r, d.dw);
        d.dX.resize(r.dims.size());
        for (std::size_t k = 0; k < T.size(); ++k) {
          d.dS[k] += Rd[k];
          Eigen::MatrixXd M = X[k] * d.dS[k];
          if (corr) M += (*corr)[k];
          d.dX[k] = sym(sigma_mu * Sinv[k] - X[k] - M * Sinv[k]);
        }
      };
      dir.dw = hchol.solve(rhs);
      complete(dir);
      // Iterative refinement against the operator form of A*(X + dX) = c.
      for (int pass = 0; pass < 3; ++pass) {
        const Eigen::VectorXd e = apply_adjoint(r, dir.dX) - rp;
        if (e.norm() <= 1e-3 * opts.feas_tol * (1.0 + norm_c)) break;
        dir.dw += hchol.solve(e);
        complete(dir);
      }
      return dir;
    };

    // Predictor.
    const Direction aff = direction(0.0, nullptr);
    const double ap_aff = std::min(1.0, max_step(X, aff.dX));
    const double ad_aff = std::min(1.0, max_step(S, aff.dS));
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < X.size(); ++k)
      mu_aff += (X[k] + ap_aff * aff.dX[k]).cwiseProduct(S[k] + ad_aff * aff.dS[k]).sum();
    mu_aff /= n_tot;
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    // Corrector.
    BlockMat corr(X.size());
    for (std::size_t k = 0; k < X.size(); ++k) corr[k] = aff.dX[k] * aff.dS[k];
    const Direction dir = direction(sigma * mu, &corr);

    const double tau = 0.95;
    const double ap = std::min(1.0, tau * max_step(X, dir.dX));
    const double ad = std::min(1.0, tau * max_step(S, dir.dS));
    for (std::size_t k = 0; k < X.size(); ++k) {
      X[k] = sym(X[k] + ap * dir.dX[k]);
      S[k] = sym(S[k] + ad * dir.dS[k]);
    }
    w += ad * dir.dw;


    if (std::max(ap, ad) < 1e-10) {
      if (++tiny_steps >= 5) {
        res.w = w;
        res.status = SolveStatus::NumericalFailure;
        res.message = "step lengths collapsed";
        return res;
      }
    } else {
      tiny_steps = 0;
    }
  }
  res.iterations = opts.max_iters;
  res.w = best_w;
  res.status = SolveStatus::MaxIterations;
  return res;
}

}  // namespace

void LmiBlock::add(int var, const Eigen::MatrixXd& coeff) {
  add(var, Eigen::SparseMatrix<double>(coeff.sparseView()));
}

void LmiBlock::add(int var, Eigen::SparseMatrix<double> coeff) {
  terms.push_back({var, std::move(coeff)});
}

Eigen::MatrixXd LmiBlock::evaluate(const Eigen::VectorXd& y) const {
  Eigen::MatrixXd m = constant;
  for (const auto& t : terms) m += y(t.var) * Eigen::MatrixXd(t.matrix);
  return m;
}

void SdpProblem::validate() const {
  if (num_vars < 0) throw InvalidArgument("negative variable count");
  if (objective.size() != num_vars) throw DimensionMismatch("objective length differs from num_vars");
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& blk = blocks[b];
    const std::string where = "block " + std::to_string(b);
    if (blk.constant.rows() != blk.constant.cols()) throw DimensionMismatch(where + ": F0 is not square");
    if (!is_symmetric(blk.constant, 1e-12)) throw InvalidArgument(where + ": F0 is not symmetric");
    for (const auto& t : blk.terms) {
      if (t.var < 0 || t.var >= num_vars) throw DimensionMismatch(where + ": variable index out of range");
      if (t.matrix.rows() != blk.dim() || t.matrix.cols() != blk.dim()) {
        throw DimensionMismatch(where + ": coefficient of y" + std::to_string(t.var) + " has wrong size");
      }
      if (!is_symmetric(Eigen::MatrixXd(t.matrix), 1e-12)) {
        throw InvalidArgument(where + ": coefficient of y" + std::to_string(t.var) + " is not symmetric");
      }
    }
  }
  for (const auto& eq : equalities)
    for (const auto& [i, a] : eq.coeffs)
      if (i < 0 || i >= num_vars) throw DimensionMismatch("equality references a variable out of range");
}

double SdpProblem::equality_residual(const Eigen::VectorXd& y) const {
  double worst = 0.0;
  for (const auto& eq : equalities) {
    double s = -eq.rhs;
    for (const auto& [i, a] : eq.coeffs) s += a * y(i);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

double SdpProblem::min_block_eigenvalue(const Eigen::VectorXd& y) const {
  double lm = kInf;
  for (const auto& blk : blocks) lm = std::min(lm, lambda_min(blk.evaluate(y)));
  return lm;
}

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

SdpSolution InteriorPointSolver::solve(const SdpProblem& problem, const SolverOptions& opts) const {
  problem.validate();
  SdpSolution sol;
  Preprocessed pre = preprocess(problem, opts);
  const ReducedProblem& r = pre.reduced;

  auto finish = [&](const Eigen::VectorXd& y, SolveStatus status, int iters, std::string msg) {
    sol.y = y;
    sol.iterations = iters;
    sol.objective_value = problem.objective.dot(y);
    sol.min_block_eigenvalue = problem.min_block_eigenvalue(y);
    sol.equality_residual = problem.equality_residual(y);
    sol.status = status;
    sol.message = std::move(msg);
    if (!y.allFinite()) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "non-finite iterate";
    } else if (status == SolveStatus::Optimal &&
        (sol.min_block_eigenvalue < -opts.feas_tol || sol.equality_residual > opts.feas_tol)) {
      sol.status = SolveStatus::NumericalFailure;
      sol.message = "converged iterate violates the original constraints beyond feas_tol";
    }
    return sol;
  };

  if (pre.early_exit) {
    return finish(r.y0.size() == problem.num_vars ? r.y0 : Eigen::VectorXd::Zero(problem.num_vars),
                  pre.early_status, 0, pre.message);
  }
  if (r.num_dirs() == 0) {
    double lm = kInf;
    for (const auto& f0 : r.F0) lm = std::min(lm, lambda_min(f0));
    return finish(r.y0, lm >= -opts.feas_tol ? SolveStatus::Optimal : SolveStatus::Infeasible, 0,
                  "no free directions");
  }
  if (r.dims.empty()) {
    if (r.c.cwiseAbs().maxCoeff() > 0.0) return finish(r.y0, SolveStatus::NumericalFailure, 0, "objective is unbounded below");
    return finish(r.y0, SolveStatus::Optimal, 0, "no constraint depends on the free directions");
  }
  IpmResult ipm = interior_point(r, opts);
  sol.relative_gap = ipm.relgap;
  return finish(r.y0 + r.N * ipm.w, ipm.status, ipm.iterations, ipm.message);
}

SdpSolution solve_sdp(const SdpProblem& problem, const SolverOptions& opts) {
  return InteriorPointSolver{}.solve(problem, opts);
}

PsdCheck psd_check(const Eigen::MatrixXd& S, double tol) {
  if (S.rows() != S.cols()) throw DimensionMismatch("psd_check: matrix is not square");
  const double lm = S.rows() == 0 ? 0.0 : lambda_min(S);
  return {lm >= -tol, lm};
}

}  // namespace dccm::sdp
