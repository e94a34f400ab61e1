#include "dccm/controller.hpp"

#include "dccm/errors.hpp"

namespace dccm::ctrl {

ControlDecision control_input(const cert::DccmCertificate& cert, const sys::ControlAffineSystem& sys,
                              const Eigen::VectorXd& x, const Eigen::VectorXd& x_star, const Eigen::VectorXd& u_star,
                              const ControllerOptions& opts) {
  if (sys.state_dim() != cert.n() || sys.input_dim() != cert.m())
    throw DimensionMismatch("certificate dimensions do not match the system");
  if (x.size() != cert.n() || x_star.size() != cert.n() || u_star.size() != cert.m())
    throw DimensionMismatch("controller arguments have wrong dimension");

  ControlDecision d;
  d.u_star = u_star;
  d.geodesic = geo::compute_geodesic(cert, x_star, x, opts.N, opts.geodesic);
  d.feedback_term = Eigen::VectorXd::Zero(cert.m());
  if (x != x_star) {
    if (opts.gain == GainEvaluation::AtState) {
      d.feedback_term = cert::gain_at(cert, x) * (x - x_star);
    } else {
      const auto& g = d.geodesic;
      for (int i = 0; i < g.N; ++i)
        d.feedback_term += g.delta_s * (cert::gain_at(cert, g.nodes[static_cast<std::size_t>(i + 1)]) *
                                        g.deltas[static_cast<std::size_t>(i)]);
    }
  }
  d.u = u_star + d.feedback_term;
  return d;
}

}  // namespace dccm::ctrl
