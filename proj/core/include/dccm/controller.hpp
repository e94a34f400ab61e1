#pragma once

// Tracking controller u = u* + integral of K(gamma(s)) gamma'(s) ds along the
// geodesic from x* (s = 0) to x (s = 1).

#include <Eigen/Dense>

#include "dccm/certificate.hpp"
#include "dccm/geodesic.hpp"
#include "dccm/system.hpp"

namespace dccm::ctrl {

enum class GainEvaluation {
  // K at every geodesic node x_i.
  AlongGeodesic,
  // K at the plant state only: u = u* + K(x)(x - x*).
  AtState,
};

struct ControllerOptions {
  int N = 30;
  GainEvaluation gain = GainEvaluation::AlongGeodesic;
  geo::GeodesicOptions geodesic;
};

struct ControlDecision {
  Eigen::VectorXd u;
  geo::GeodesicPath geodesic;
  Eigen::VectorXd u_star;
  // u - u_star
  Eigen::VectorXd feedback_term;
};

ControlDecision control_input(const cert::DccmCertificate& cert, const sys::ControlAffineSystem& sys,
                              const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, const Eigen::VectorXd& u_star,
                              const ControllerOptions& opts = {});

}  // namespace dccm::ctrl
