#pragma once

// Discretized minimum-energy paths under M(x) = W(x)^-1.
//
// A path from x_from to x_to is N displacement rates d_1..d_N with uniform
// step h = 1/N, nodes x_i = x_from + h (d_1 + ... + d_i), and
//
//   E = h sum_i d_i^T M(x_i) d_i,    length = h sum_i sqrt(d_i^T M(x_i) d_i),
//
// subject to h sum_i d_i = x_to - x_from. Segment i uses the metric at its
// end node x_i.

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "dccm/certificate.hpp"

namespace dccm::geo {

struct GeodesicOptions {
  int max_iters = 500;
  // Stop when the projected gradient norm drops to this value.
  double tol = 1e-8;
};

struct GeodesicPath {
  Eigen::VectorXd x_from;
  Eigen::VectorXd x_to;
  int N = 0;
  double delta_s = 0.0;
  std::vector<Eigen::VectorXd> deltas;
  // N + 1 nodes, nodes[0] = x_from.
  std::vector<Eigen::VectorXd> nodes;
  double energy = 0.0;
  double length = 0.0;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
  // False when max_iters was hit or the line search stalled above tol.
  bool converged = true;
};

// W(x)^-1, symmetrized. Throws SingularMetric (condition > 1e12) or
// NonPositiveMetric (lambda_min(W) <= 0).
Eigen::MatrixXd metric_at(const cert::DccmCertificate& cert, const Eigen::VectorXd& x);

struct PathEnergy {
  double energy = 0.0;
  double length = 0.0;
};

// Energy and length of the deltas of `path`, recomputed from scratch.
PathEnergy path_energy(const GeodesicPath& path, const cert::DccmCertificate& cert);

// Energy as a function of the n x N matrix of deltas (column i is d_{i+1});
// fills `grad` (same shape) when non-null. Includes the dependence of M(x_i)
// on every earlier delta.
double discrete_energy(const cert::DccmCertificate& cert, const Eigen::VectorXd& x_from, const Eigen::MatrixXd& deltas,
                       Eigen::MatrixXd* grad = nullptr);

// Projected gradient descent from the straight line. The returned path
// never has higher energy than the straight line.
GeodesicPath compute_geodesic(const cert::DccmCertificate& cert, const Eigen::VectorXd& x_from,
                              const Eigen::VectorXd& x_to, int N, const GeodesicOptions& opts = {});

// Columns: s, x1..xn, dx1..dxn, segment_energy (one row per node, the first
// row has zero deltas).
void write_path_csv(std::ostream& os, const GeodesicPath& path, const cert::DccmCertificate& cert);

}  // namespace dccm::geo
