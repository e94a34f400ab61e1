#include "dccm/geodesic.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "dccm/errors.hpp"

namespace dccm::geo {

namespace {

struct Evaluation {
  double energy = 0.0;
  Eigen::MatrixXd grad;
  // W at each end node, used as the preconditioner.
  std::vector<Eigen::MatrixXd> W;
};

Eigen::MatrixXd nodes_of(const Eigen::VectorXd& x_from, const Eigen::MatrixXd& D, double h) {
  Eigen::MatrixXd X(D.rows(), D.cols() + 1);
  X.col(0) = x_from;
  for (Eigen::Index i = 0; i < D.cols(); ++i) X.col(i + 1) = X.col(i) + h * D.col(i);
  return X;
}

Evaluation evaluate(const cert::DccmCertificate& cert, const Eigen::VectorXd& x_from, const Eigen::MatrixXd& D,
                    bool want_grad) {
  const Eigen::Index n = D.rows(), N = D.cols();
  const double h = 1.0 / static_cast<double>(N);
  const Eigen::MatrixXd X = nodes_of(x_from, D, h);
  Evaluation ev;
  if (want_grad) ev.grad = Eigen::MatrixXd::Zero(n, N);
  // local[i] = d/dx of d_i^T M(x) d_i at x_i
  Eigen::MatrixXd local(n, N);
  for (Eigen::Index i = 0; i < N; ++i) {
    const Eigen::VectorXd xi = X.col(i + 1);
    const Eigen::MatrixXd W = cert.W_at(xi);
    const Eigen::MatrixXd M = metric_at(cert, xi);
    const Eigen::VectorXd v = M * D.col(i);
    ev.energy += h * D.col(i).dot(v);
    if (!want_grad) continue;
    ev.W.push_back(W);
    ev.grad.col(i) = 2.0 * h * v;
    const auto dW = cert.W_gradient_at(xi);
    for (Eigen::Index k = 0; k < n; ++k) local(k, i) = -v.dot(dW[static_cast<std::size_t>(k)] * v);
  }
  if (want_grad) {
    // x_i depends on d_j for j <= i with Jacobian h I.
    Eigen::VectorXd tail = Eigen::VectorXd::Zero(n);
    for (Eigen::Index j = N - 1; j >= 0; --j) {
      tail += local.col(j);
      ev.grad.col(j) += h * h * tail;
    }
  }
  return ev;
}

GeodesicPath assemble(const cert::DccmCertificate& cert, const Eigen::VectorXd& x_from, const Eigen::VectorXd& x_to,
                      const Eigen::MatrixXd& D) {
  GeodesicPath p;
  p.x_from = x_from;
  p.x_to = x_to;
  p.N = static_cast<int>(D.cols());
  p.delta_s = 1.0 / static_cast<double>(p.N);
  const Eigen::MatrixXd X = nodes_of(x_from, D, p.delta_s);
  for (Eigen::Index i = 0; i < D.cols(); ++i) p.deltas.push_back(D.col(i));
  for (Eigen::Index i = 0; i < X.cols(); ++i) p.nodes.push_back(X.col(i));
  const PathEnergy pe = path_energy(p, cert);
  p.energy = pe.energy;
  p.length = pe.length;
  return p;
}

// Euclidean projection onto {sum_i d_i = 0}.
Eigen::MatrixXd project(const Eigen::MatrixXd& G) {
  return G.colwise() - G.rowwise().mean();
}

}  // namespace

Eigen::MatrixXd metric_at(const cert::DccmCertificate& cert, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd W = cert.W_at(x);
  Eigen::MatrixXd M = cert::invert_metric_dual(W);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
  if (!(es.eigenvalues()(0) > 0.0))
    throw NonPositiveMetric("W(x) is not positive definite (lambda_min(M) = " + std::to_string(es.eigenvalues()(0)) + ")");
  return M;
}

PathEnergy path_energy(const GeodesicPath& path, const cert::DccmCertificate& cert) {
  if (path.N < 1 || static_cast<int>(path.deltas.size()) != path.N) throw InvalidArgument("path has no segments");
  const double h = 1.0 / static_cast<double>(path.N);
  PathEnergy out;
  Eigen::VectorXd x = path.x_from;
  for (const auto& d : path.deltas) {
    x += h * d;
    const double q = d.dot(metric_at(cert, x) * d);
    out.energy += h * q;
    out.length += h * std::sqrt(std::max(q, 0.0));
  }
  return out;
}

double discrete_energy(const cert::DccmCertificate& cert, const Eigen::VectorXd& x_from, const Eigen::MatrixXd& deltas,
                       Eigen::MatrixXd* grad) {
  if (deltas.cols() < 1 || deltas.rows() != cert.n() || x_from.size() != cert.n())
    throw DimensionMismatch("discrete_energy: deltas must be n x N");
  Evaluation ev = evaluate(cert, x_from, deltas, grad != nullptr);
  if (grad) *grad = std::move(ev.grad);
  return ev.energy;
}

GeodesicPath compute_geodesic(const cert::DccmCertificate& cert, const Eigen::VectorXd& x_from,
                              const Eigen::VectorXd& x_to, int N, const GeodesicOptions& opts) {
  if (N < 1) throw InvalidArgument("geodesic needs N >= 1 segments");
  if (x_from.size() != cert.n() || x_to.size() != cert.n()) throw DimensionMismatch("geodesic endpoints");
  const Eigen::Index n = cert.n();
  const double h = 1.0 / static_cast<double>(N);
  const Eigen::VectorXd delta = x_to - x_from;
  Eigen::MatrixXd D = delta.replicate(1, N);

  Evaluation ev = evaluate(cert, x_from, D, true);
  double pg = project(ev.grad).norm();
  int it = 0;
  bool stalled = false;
  while (pg > opts.tol && it < opts.max_iters) {
    // Preconditioned step: minimize g.d + h d^T M d over sum d_i = 0.
    Eigen::MatrixXd Wsum = Eigen::MatrixXd::Zero(n, n);
    Eigen::VectorXd Wg = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < N; ++i) {
      Wsum += ev.W[static_cast<std::size_t>(i)];
      Wg += ev.W[static_cast<std::size_t>(i)] * ev.grad.col(i);
    }
    const Eigen::VectorXd lambda = Wsum.ldlt().solve(Wg);
    Eigen::MatrixXd step(n, N);
    for (Eigen::Index i = 0; i < N; ++i)
      step.col(i) = -(0.5 / h) * ev.W[static_cast<std::size_t>(i)] * (ev.grad.col(i) - lambda);
    // keep the endpoint sum exact despite rounding in lambda
    step = project(step);
    double slope = (ev.grad.array() * step.array()).sum();
    if (!(slope < 0.0)) {
      step = -project(ev.grad);
      slope = (ev.grad.array() * step.array()).sum();
    }

    double t = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls, t *= 0.5) {
      const Eigen::MatrixXd trial = D + t * step;
      double e = 0.0;
      try {
        e = evaluate(cert, x_from, trial, false).energy;
      } catch (const MetricError&) {
        continue;
      }
      if (e <= ev.energy + 1e-4 * t * slope) {
        D = trial;
        accepted = true;
        break;
      }
    }
    ++it;
    if (!accepted) {
      stalled = true;
      break;
    }
    ev = evaluate(cert, x_from, D, true);
    pg = project(ev.grad).norm();
  }

  // Re-impose the endpoint constraint exactly on the stored deltas.
  const Eigen::VectorXd drift = D.rowwise().mean() - delta;
  D.colwise() -= drift;

  GeodesicPath p = assemble(cert, x_from, x_to, D);
  p.iterations = it;
  p.projected_gradient_norm = pg;
  p.converged = pg <= opts.tol || (stalled && pg <= std::sqrt(opts.tol));
  return p;
}

void write_path_csv(std::ostream& os, const GeodesicPath& path, const cert::DccmCertificate& cert) {
  const auto n = path.x_from.size();
  os << "s";
  for (Eigen::Index k = 0; k < n; ++k) os << ",x" << k + 1;
  for (Eigen::Index k = 0; k < n; ++k) os << ",dx" << k + 1;
  os << ",segment_energy\n";
  char buf[64];
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (int i = 0; i <= path.N; ++i) {
    put(static_cast<double>(i) * path.delta_s);
    const Eigen::VectorXd& x = path.nodes[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      os << ',';
      put(x(k));
    }
    const Eigen::VectorXd d = i == 0 ? Eigen::VectorXd::Zero(n) : path.deltas[static_cast<std::size_t>(i - 1)];
    for (Eigen::Index k = 0; k < n; ++k) {
      os << ',';
      put(d(k));
    }
    os << ',';
    put(i == 0 ? 0.0 : path.delta_s * d.dot(metric_at(cert, x) * d));
    os << '\n';
  }
}

}  // namespace dccm::geo
