#include "dccm/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "dccm/sdp.hpp"

namespace dccm::sim {

const ReferenceSegment& ReferenceSchedule::at(int k) const {
  if (segments.empty()) throw InvalidArgument("empty reference schedule");
  const ReferenceSegment* cur = &segments.front();
  for (const auto& s : segments) {
    if (s.start_step > k) break;
    cur = &s;
  }
  return *cur;
}

void ReferenceSchedule::validate(const sys::ControlAffineSystem& sys, double tol) const {
  if (segments.empty()) throw InvalidArgument("reference schedule has no segments");
  if (segments.front().start_step != 0) throw InvalidArgument("first reference segment must start at step 0");
  if (total_steps < 0) throw InvalidArgument("negative total_steps");
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const std::string tag = "reference segment " + std::to_string(i);
    if (i > 0 && s.start_step <= segments[i - 1].start_step) throw InvalidArgument(tag + " is out of order");
    if (s.x_star.size() != sys.state_dim() || s.u_star.size() != sys.input_dim())
      throw DimensionMismatch(tag + " has wrong dimensions");
    const double err = (sys.step(s.x_star, s.u_star) - s.x_star).cwiseAbs().maxCoeff();
    if (!(err <= tol)) throw InvalidArgument(tag + " is not an equilibrium (residual " + std::to_string(err) + ")");
  }
}

ReferenceSchedule cstr_schedule() {
  ReferenceSchedule s;
  s.total_steps = 100;
  s.segments.push_back({0, Eigen::Vector2d(0.0, 0.0), Eigen::VectorXd::Constant(1, 0.0)});
  s.segments.push_back({33, Eigen::Vector2d(1.0, 1.0), Eigen::VectorXd::Constant(1, 0.0)});
  s.segments.push_back({66, Eigen::Vector2d(0.5, 0.5), Eigen::VectorXd::Constant(1, -0.025)});
  return s;
}

TrajectoryLog simulate(const sys::ControlAffineSystem& sys, const cert::DccmCertificate& cert,
                       const ReferenceSchedule& schedule, const Eigen::VectorXd& x0, const SimulationOptions& opts) {
  if (x0.size() != sys.state_dim()) throw DimensionMismatch("initial state has wrong dimension");
  schedule.validate(sys);
  TrajectoryLog log;
  Eigen::VectorXd x = x0;
  for (int k = 0; k < schedule.total_steps; ++k) {
    const ReferenceSegment& ref = schedule.at(k);
    ctrl::ControlDecision d;
    try {
      d = ctrl::control_input(cert, sys, x, ref.x_star, ref.u_star, opts.controller);
    } catch (const Error& e) {
      log.final_state = x;
      throw SimulationError(k, std::move(log), e.what());
    }
    TrajectoryRow row;
    row.k = k;
    row.x = x;
    row.u = d.u;
    row.x_star = ref.x_star;
    row.u_star = ref.u_star;
    row.energy = d.geodesic.energy;
    row.length = d.geodesic.length;
    row.geodesic_iterations = d.geodesic.iterations;
    row.geodesic_converged = d.geodesic.converged;
    log.rows.push_back(std::move(row));
    if (opts.keep_paths) log.paths.push_back(std::move(d.geodesic));
    x = sys.step(x, d.u);
    if (!x.allFinite()) {
      log.final_state = x;
      throw SimulationError(k, std::move(log), "state diverged");
    }
  }
  log.final_state = x;
  return log;
}

sys::Box default_state_box() { return {{{-0.5, 1.5}, {-0.5, 1.5}}}; }
sys::Box default_input_box() { return {{{-0.2, 0.2}}}; }

namespace {

std::vector<double> axis_points(const sys::Interval& iv, int res) {
  if (res == 1) return {0.5 * (iv.lo + iv.hi)};
  std::vector<double> out;
  for (int i = 0; i < res; ++i) out.push_back(iv.lo + (iv.hi - iv.lo) * static_cast<double>(i) / (res - 1));
  return out;
}

// Row-major enumeration of a tensor grid.
std::vector<Eigen::VectorXd> tensor_grid(const std::vector<std::vector<double>>& axes) {
  std::vector<Eigen::VectorXd> out{Eigen::VectorXd(0)};
  for (const auto& ax : axes) {
    std::vector<Eigen::VectorXd> next;
    for (const auto& p : out)
      for (double v : ax) {
        Eigen::VectorXd q(p.size() + 1);
        q << p, v;
        next.push_back(std::move(q));
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

VerificationReport verify_contraction(const sys::ControlAffineSystem& sys, const cert::DccmCertificate& cert,
                                      const sys::Box& state_box, const sys::Box& input_box, int resolution) {
  if (resolution < 1) throw InvalidArgument("grid resolution must be >= 1");
  if (state_box.dim() != sys.state_dim() || input_box.dim() != sys.input_dim())
    throw DimensionMismatch("verification boxes do not match the system");
  for (const auto* b : {&state_box, &input_box})
    for (const auto& iv : b->axes)
      if (!(iv.lo <= iv.hi)) throw InvalidArgument("verification box has an empty axis");

  VerificationReport rep;
  rep.state_box = state_box;
  rep.input_box = input_box;
  rep.resolution = resolution;
  rep.max_lemma_eigenvalue = -std::numeric_limits<double>::infinity();
  rep.min_metric_eigenvalue = std::numeric_limits<double>::infinity();
  rep.max_metric_eigenvalue = -std::numeric_limits<double>::infinity();
  rep.min_block_eigenvalue = std::numeric_limits<double>::infinity();

  std::vector<std::vector<double>> xa, ua;
  for (const auto& iv : state_box.axes) xa.push_back(axis_points(iv, resolution));
  for (const auto& iv : input_box.axes) ua.push_back(axis_points(iv, resolution));
  const auto xs = tensor_grid(xa);
  const auto us = tensor_grid(ua);

  for (const auto& x : xs) {
    bool metric_ok = true;
    try {
      const Eigen::MatrixXd M = cert::invert_metric_dual(cert.W_at(x));
      const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(M, Eigen::EigenvaluesOnly).eigenvalues();
      rep.min_metric_eigenvalue = std::min(rep.min_metric_eigenvalue, ev(0));
      rep.max_metric_eigenvalue = std::max(rep.max_metric_eigenvalue, ev(ev.size() - 1));
    } catch (const SingularMetric&) {
      metric_ok = false;
    }
    for (const auto& u : us) {
      ++rep.points;
      if (!metric_ok) {
        ++rep.singular_points;
        continue;
      }
      double lemma = 0.0;
      try {
        lemma = cert::check_lemma_condition(sys, cert, x, u);
      } catch (const SingularMetric&) {
        ++rep.singular_points;
        continue;
      }
      if (lemma > rep.max_lemma_eigenvalue) {
        rep.max_lemma_eigenvalue = lemma;
        rep.worst_point = {x, u};
      }
      const double block = sdp::psd_check(cert::contraction_matrix_at(sys, cert, x, u), 0.0).lambda_min;
      rep.min_block_eigenvalue = std::min(rep.min_block_eigenvalue, block);
      const bool banded = std::abs(lemma) <= kSignTolerance || std::abs(block) <= kSignTolerance;
      if (!banded && (lemma < 0.0) != (block > 0.0)) ++rep.sign_disagreements;
    }
  }
  rep.pass = rep.singular_points == 0 && rep.max_lemma_eigenvalue < 0.0 && rep.min_metric_eigenvalue > 0.0;
  return rep;
}

}  // namespace dccm::sim
