#pragma once

// Closed-loop simulation against a piecewise-constant reference schedule and
// grid verification of a certificate.

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dccm/certificate.hpp"
#include "dccm/controller.hpp"
#include "dccm/errors.hpp"
#include "dccm/geodesic.hpp"
#include "dccm/system.hpp"

namespace dccm::sim {

struct ReferenceSegment {
  int start_step = 0;
  Eigen::VectorXd x_star;
  Eigen::VectorXd u_star;
};

struct ReferenceSchedule {
  std::vector<ReferenceSegment> segments;
  int total_steps = 0;

  // Segment active at step k.
  const ReferenceSegment& at(int k) const;
  // Throws InvalidArgument unless segments are ordered, start at 0, have the
  // system's dimensions and each (x*, u*) is an equilibrium within tol.
  void validate(const sys::ControlAffineSystem& sys, double tol = 1e-9) const;
};

// Steps 0, 33, 66 at x* = 0, 1, 0.5 with u* = 0, 0, -0.025; 100 steps.
ReferenceSchedule cstr_schedule();

struct TrajectoryRow {
  int k = 0;
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  Eigen::VectorXd x_star;
  Eigen::VectorXd u_star;
  double energy = 0.0;
  double length = 0.0;
  int geodesic_iterations = 0;
  bool geodesic_converged = true;
};

struct TrajectoryLog {
  std::vector<TrajectoryRow> rows;
  // State after the last row's input.
  Eigen::VectorXd final_state;
  // Geodesic used at each row, kept when SimulationOptions::keep_paths is set.
  std::vector<geo::GeodesicPath> paths;
};

struct SimulationOptions {
  ctrl::ControllerOptions controller;
  bool keep_paths = false;
};

class SimulationError : public Error {
 public:
  SimulationError(int step, TrajectoryLog partial, const std::string& what)
      : Error("step " + std::to_string(step) + ": " + what), step_(step), partial_(std::move(partial)) {}
  int step() const { return step_; }
  const TrajectoryLog& partial_log() const { return partial_; }

 private:
  int step_;
  TrajectoryLog partial_;
};

TrajectoryLog simulate(const sys::ControlAffineSystem& sys, const cert::DccmCertificate& cert,
                       const ReferenceSchedule& schedule, const Eigen::VectorXd& x0,
                       const SimulationOptions& opts = {});

// [-0.5, 1.5]^2 and [-0.2, 0.2].
sys::Box default_state_box();
sys::Box default_input_box();

struct GridPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
};

struct VerificationReport {
  sys::Box state_box;
  sys::Box input_box;
  int resolution = 0;
  int points = 0;
  double max_lemma_eigenvalue = 0.0;
  GridPoint worst_point;
  // Extreme eigenvalues of M = W^-1 over the state grid (alpha_1, alpha_2 estimates).
  double min_metric_eigenvalue = 0.0;
  double max_metric_eigenvalue = 0.0;
  // Smallest eigenvalue of the block matrix [[W+, AW+BL], [., (1-beta)W]].
  double min_block_eigenvalue = 0.0;
  // Points where the lemma check and the block PSD check disagree in sign.
  int sign_disagreements = 0;
  // Points where W was singular; each counts as a failure.
  int singular_points = 0;
  bool pass = false;
};

// Band around zero within which the two checks are not compared.
inline constexpr double kSignTolerance = 1e-8;

// Grid with `resolution` points per axis (the midpoint when resolution = 1)
// over state_box x input_box.
VerificationReport verify_contraction(const sys::ControlAffineSystem& sys, const cert::DccmCertificate& cert,
                                      const sys::Box& state_box, const sys::Box& input_box, int resolution);

}  // namespace dccm::sim
