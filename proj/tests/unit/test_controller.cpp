#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "dccm/controller.hpp"
#include "dccm/errors.hpp"
#include "dccm/simulate.hpp"
#include "dccm/synth.hpp"
#include "fixtures.hpp"
#include "test_support.hpp"

namespace dccm {
namespace {

using dccm::testing::cstr_certificate;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

const ctrl::GainEvaluation kModes[] = {ctrl::GainEvaluation::AlongGeodesic, ctrl::GainEvaluation::AtState};

ctrl::ControllerOptions with_mode(ctrl::GainEvaluation g) {
  ctrl::ControllerOptions o;
  o.gain = g;
  return o;
}

double spectral_radius(const MatrixXd& A) { return A.eigenvalues().cwiseAbs().maxCoeff(); }

TEST(ControlInput, ReturnsFeedforwardAtReference) {
  const auto sys = sys::cstr_preset();
  for (auto mode : kModes)
    for (int t = 0; t < 5; ++t) {
      const VectorXd xs = dccm::testing::random_point(2, -0.5, 1.5);
      const VectorXd us = dccm::testing::random_point(1, -0.2, 0.2);
      const auto d = ctrl::control_input(cstr_certificate(), sys, xs, xs, us, with_mode(mode));
      EXPECT_EQ(d.u, us);
      EXPECT_EQ(d.feedback_term, VectorXd::Zero(1));
      EXPECT_EQ(d.geodesic.length, 0.0);
    }
}

TEST(ControlInput, FeedforwardOnScheduledReferences) {
  const auto sys = sys::cstr_preset();
  for (const auto& seg : sim::cstr_schedule().segments) {
    EXPECT_LE((sys.step(seg.x_star, seg.u_star) - seg.x_star).norm(), 1e-12);
    EXPECT_EQ(ctrl::control_input(cstr_certificate(), sys, seg.x_star, seg.x_star, seg.u_star).u, seg.u_star);
  }
}

TEST(ControlInput, DecompositionIsExact) {
  const auto sys = sys::cstr_preset();
  const auto d = ctrl::control_input(cstr_certificate(), sys, Vector2d(0.7, 0.2), Vector2d(0.5, 0.5),
                                     VectorXd::Constant(1, -0.025));
  EXPECT_EQ(d.u, d.u_star + d.feedback_term);
  EXPECT_EQ(d.geodesic.x_from, Vector2d(0.5, 0.5));
  EXPECT_EQ(d.geodesic.x_to, Vector2d(0.7, 0.2));
}

TEST(ControlInput, ZeroGainIsPureFeedforward) {
  const auto c = cstr_certificate().with_zero_gain();
  const auto d = ctrl::control_input(c, sys::cstr_preset(), Vector2d(0.3, -0.1), Vector2d(0, 0), VectorXd::Zero(1));
  EXPECT_EQ(d.u, VectorXd::Zero(1));
}

TEST(ControlInput, LinearSystemTelescopesToStateFeedback) {
  MatrixXd F(2, 2), G(2, 1);
  F << 1.2, 0.3, 0.0, 0.8;
  G << 0.0, 1.0;
  const auto sys = dccm::testing::linear_system(F, G);
  const auto c = synth::synthesize(sys, cert::CertificateTemplate(2, 1, 0, 0, 0.1));
  const MatrixXd K = c.L_at(VectorXd::Zero(2)) * c.W_at(VectorXd::Zero(2)).inverse();
  EXPECT_LE(spectral_radius(F + G * K), std::sqrt(0.9) + 1e-6);
  EXPECT_GT(spectral_radius(F), 1.0);
  for (auto mode : kModes)
    for (int t = 0; t < 5; ++t) {
      const VectorXd x = dccm::testing::random_point(2), xs = dccm::testing::random_point(2);
      const VectorXd us = dccm::testing::random_point(1);
      const VectorXd expected = us + K * (x - xs);
      const auto d = ctrl::control_input(c, sys, x, xs, us, with_mode(mode));
      EXPECT_LE((d.u - expected).norm(), 1e-9 * (1.0 + expected.norm()));
    }
}

TEST(ControlInput, ScalarGainSatisfiesContractionBound) {
  MatrixXd F(1, 1), G(1, 1);
  F << 0.5;
  G << 1.0;
  const auto sys = dccm::testing::linear_system(F, G);
  const auto c = synth::synthesize(sys, cert::CertificateTemplate(1, 1, 0, 0, 0.1));
  const double K = cert::gain_at(c, VectorXd::Zero(1))(0, 0);
  EXPECT_LE(std::abs(0.5 + K), std::sqrt(0.9));
}

TEST(ControlInput, OneStepContractionOnCstr) {
  const auto sys = sys::cstr_preset();
  const auto& c = cstr_certificate();
  const Vector2d xs(0, 0), x(0.2, 0.1);
  const auto d = ctrl::control_input(c, sys, x, xs, VectorXd::Zero(1));
  const VectorXd x_next = sys.step(x, d.u);
  const auto next = geo::compute_geodesic(c, xs, x_next, 30);
  EXPECT_LE(next.energy, 0.95 * d.geodesic.energy);
}

TEST(ControlInput, ClosedLoopEnergyDecaysFromRandomStarts) {
  const auto sys = sys::cstr_preset();
  const auto& c = cstr_certificate();
  const auto box = sim::default_state_box();
  for (const auto& seg : sim::cstr_schedule().segments)
    for (int trial = 0; trial < 50; ++trial) {
      VectorXd x(2);
      for (int i = 0; i < 2; ++i) x(i) = dccm::testing::uniform(box.axes[i].lo, box.axes[i].hi);
      double E = std::numeric_limits<double>::infinity();
      for (int k = 0; k < 200; ++k) {
        const auto d = ctrl::control_input(c, sys, x, seg.x_star, seg.u_star);
        if (k > 0) EXPECT_LE(d.geodesic.energy, 0.95 * E) << "start " << trial << " step " << k;
        E = d.geodesic.energy;
        if (E < 1e-6) break;
        x = sys.step(x, d.u);
      }
      EXPECT_LT(E, 1e-6);
    }
}

TEST(ControlInput, RejectsMismatchedDimensions) {
  const auto sys = sys::cstr_preset();
  EXPECT_THROW(ctrl::control_input(cstr_certificate(), sys, VectorXd::Zero(3), Vector2d(0, 0), VectorXd::Zero(1)),
               DimensionMismatch);
  EXPECT_THROW(ctrl::control_input(cstr_certificate(), sys, Vector2d(0, 0), Vector2d(0, 0), VectorXd::Zero(2)),
               DimensionMismatch);
}

}  // namespace
}  // namespace dccm
