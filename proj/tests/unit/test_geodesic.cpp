#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "dccm/errors.hpp"
#include "dccm/geodesic.hpp"
#include "fixtures.hpp"
#include "path_oracle.hpp"
#include "test_support.hpp"

namespace dccm {
namespace {

using dccm::testing::constant_certificate;
using dccm::testing::cstr_certificate;
using dccm::testing::curved_certificate;
using dccm::testing::lattice_energy;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

MatrixXd random_spd(int n) {
  const MatrixXd A = MatrixXd::NullaryExpr(n, n, [] { return dccm::testing::uniform(-1.0, 1.0); });
  return A * A.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

// Zero-sum perturbation of the straight line, so the endpoints stay fixed.
MatrixXd random_feasible_deltas(const VectorXd& delta, int N, double scale) {
  MatrixXd D = delta.replicate(1, N);
  MatrixXd P = MatrixXd::NullaryExpr(delta.size(), N, [&] { return dccm::testing::uniform(-scale, scale); });
  P.colwise() -= P.rowwise().mean();
  return D + P;
}

TEST(MetricAt, ConstantTwoIdentity) {
  const auto c = constant_certificate(2.0 * MatrixXd::Identity(2, 2), MatrixXd::Zero(1, 2));
  for (int t = 0; t < 5; ++t)
    EXPECT_TRUE(geo::metric_at(c, dccm::testing::random_point(2)).isApprox(0.5 * MatrixXd::Identity(2, 2), 1e-15));
}

TEST(MetricAt, DiagonalInverse) {
  const auto c = constant_certificate(Vector2d(4.0, 1.0).asDiagonal(), MatrixXd::Zero(1, 2));
  const MatrixXd M = geo::metric_at(c, Vector2d(0.3, -0.7));
  EXPECT_DOUBLE_EQ(M(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(M(1, 1), 1.0);
  EXPECT_EQ(M(0, 1), 0.0);
}

TEST(MetricAt, CstrMatchesDirectInverse) {
  const auto& c = cstr_certificate();
  const VectorXd x0 = VectorXd::Zero(2);
  const MatrixXd direct = c.W_at(x0).inverse();
  EXPECT_LE((geo::metric_at(c, x0) - direct).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(MetricAt, NegativeDefiniteThrows) {
  const auto c = constant_certificate(-MatrixXd::Identity(2, 2), MatrixXd::Zero(1, 2));
  EXPECT_THROW(geo::metric_at(c, VectorXd::Zero(2)), NonPositiveMetric);
}

TEST(MetricAt, IllConditionedThrows) {
  const auto c = constant_certificate(Vector2d(1.0, 1e-14).asDiagonal(), MatrixXd::Zero(1, 2));
  EXPECT_THROW(geo::metric_at(c, VectorXd::Zero(2)), SingularMetric);
}

TEST(PathEnergy, ZeroPath) {
  const auto c = curved_certificate();
  const auto p = geo::compute_geodesic(c, Vector2d(0.4, -0.2), Vector2d(0.4, -0.2), 10);
  const auto e = geo::path_energy(p, c);
  EXPECT_EQ(e.energy, 0.0);
  EXPECT_EQ(e.length, 0.0);
  for (const auto& d : p.deltas) EXPECT_EQ(d.norm(), 0.0);
}

TEST(PathEnergy, EuclideanStraightLine) {
  const auto c = constant_certificate(MatrixXd::Identity(2, 2), MatrixXd::Zero(1, 2));
  const auto p = geo::compute_geodesic(c, Vector2d(0, 0), Vector2d(3, 4), 30);
  const auto e = geo::path_energy(p, c);
  EXPECT_NEAR(e.energy, 25.0, 1e-12);
  EXPECT_NEAR(e.length, 5.0, 1e-12);
}

TEST(PathEnergy, HalvingWDoublesEnergy) {
  const auto c = curved_certificate();
  auto half = c.w_coeffs();
  for (auto& v : half) v *= 0.5;
  const cert::DccmCertificate c_half(c.templ(), half, c.l_coeffs(), 0.0);
  geo::GeodesicPath p;
  p.x_from = Vector2d(-0.3, 0.2);
  p.N = 12;
  p.delta_s = 1.0 / 12;
  for (int i = 0; i < p.N; ++i) p.deltas.push_back(dccm::testing::random_point(2));
  const auto e = geo::path_energy(p, c), e_half = geo::path_energy(p, c_half);
  EXPECT_NEAR(e_half.energy, 2.0 * e.energy, 1e-12 * e.energy);
  EXPECT_NEAR(e_half.length, std::sqrt(2.0) * e.length, 1e-12 * e.length);
}

TEST(Geodesic, ConstantMetricIsStraightLine) {
  for (int t = 0; t < 10; ++t) {
    const MatrixXd W = random_spd(2);
    const auto c = constant_certificate(W, MatrixXd::Zero(1, 2));
    const VectorXd a = dccm::testing::random_point(2), b = dccm::testing::random_point(2);
    const VectorXd delta = b - a;
    const double closed_form = delta.dot(W.inverse() * delta);
    const auto p = geo::compute_geodesic(c, a, b, 30);
    EXPECT_TRUE(p.converged);
    EXPECT_TRUE(dccm::testing::rel_close(p.energy, closed_form, 1e-8)) << p.energy << " vs " << closed_form;
    EXPECT_TRUE(dccm::testing::rel_close(p.length, std::sqrt(closed_form), 1e-8));
    for (const auto& d : p.deltas) EXPECT_LE((d - delta).norm(), 1e-8 * (1.0 + delta.norm()));
  }
}

TEST(Geodesic, ConstantMetricSymmetry) {
  for (int t = 0; t < 5; ++t) {
    const auto c = constant_certificate(random_spd(2), MatrixXd::Zero(1, 2));
    const VectorXd a = dccm::testing::random_point(2), b = dccm::testing::random_point(2);
    const double ab = geo::compute_geodesic(c, a, b, 30).energy, ba = geo::compute_geodesic(c, b, a, 30).energy;
    EXPECT_TRUE(dccm::testing::rel_close(ab, ba, 1e-8));
  }
}

TEST(Geodesic, EndpointConstraintAndCauchySchwarz) {
  const std::vector<cert::DccmCertificate> certs = {curved_certificate(), cstr_certificate()};
  for (const auto& c : certs)
    for (int t = 0; t < 5; ++t) {
      const VectorXd a = dccm::testing::random_point(2, -0.5, 1.5), b = dccm::testing::random_point(2, -0.5, 1.5);
      const auto p = geo::compute_geodesic(c, a, b, 30);
      ASSERT_EQ(p.nodes.size(), 31u);
      ASSERT_EQ(p.deltas.size(), 30u);
      EXPECT_DOUBLE_EQ(p.delta_s * p.N, 1.0);
      VectorXd sum = VectorXd::Zero(2);
      for (const auto& d : p.deltas) sum += d * p.delta_s;
      EXPECT_LE((sum - (b - a)).norm(), 1e-9);
      EXPECT_LE((p.nodes.back() - b).norm(), 1e-9);
      EXPECT_EQ(p.nodes.front(), a);
      EXPECT_GE(p.energy, p.length * p.length * (1.0 - 1e-12));
      EXPECT_GT(p.length, 0.0);
    }
}

TEST(Geodesic, NeverWorseThanStraightLine) {
  const auto c = curved_certificate();
  for (int t = 0; t < 5; ++t) {
    const VectorXd a = dccm::testing::random_point(2), b = dccm::testing::random_point(2);
    const double straight = geo::discrete_energy(c, a, (b - a).replicate(1, 30));
    const auto p = geo::compute_geodesic(c, a, b, 30);
    EXPECT_TRUE(p.converged);
    EXPECT_LE(p.projected_gradient_norm, 1e-8);
    EXPECT_LE(p.energy, straight);
  }
}

TEST(Geodesic, CurvedMetricBends) {
  const auto p = geo::compute_geodesic(curved_certificate(), Vector2d(-1.0, 1.0), Vector2d(1.0, 1.0), 30);
  double max_dev = 0.0;
  for (const auto& x : p.nodes) max_dev = std::max(max_dev, std::abs(x(1) - 1.0));
  EXPECT_GT(max_dev, 1e-2);
}

TEST(Geodesic, GradientMatchesFiniteDifferences) {
  const std::vector<cert::DccmCertificate> certs = {curved_certificate(), cstr_certificate()};
  for (const auto& c : certs)
    for (int t = 0; t < 10; ++t) {
      const VectorXd a = dccm::testing::random_point(2, -0.5, 1.0), b = dccm::testing::random_point(2, -0.5, 1.0);
      const int N = 8;
      const MatrixXd D = random_feasible_deltas(b - a, N, 0.5);
      MatrixXd grad;
      geo::discrete_energy(c, a, D, &grad);
      MatrixXd fd(2, N);
      const double h = 1e-6;
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < N; ++j) {
          MatrixXd Dp = D, Dm = D;
          Dp(i, j) += h;
          Dm(i, j) -= h;
          fd(i, j) = (geo::discrete_energy(c, a, Dp) - geo::discrete_energy(c, a, Dm)) / (2 * h);
        }
      EXPECT_LT((grad - fd).norm() / grad.norm(), 1e-4);
    }
}

TEST(Geodesic, RefinementOnCstr) {
  const auto& c = cstr_certificate();
  for (int t = 0; t < 10; ++t) {
    const VectorXd a = dccm::testing::random_point(2, -0.5, 1.5), b = dccm::testing::random_point(2, -0.5, 1.5);
    const double e30 = geo::compute_geodesic(c, a, b, 30).energy;
    const double e60 = geo::compute_geodesic(c, a, b, 60).energy;
    EXPECT_LE(e60, e30 + 1e-6);
  }
}

TEST(Geodesic, CstrMatchesLatticeOracle) {
  const auto& c = cstr_certificate();
  const std::vector<std::pair<Vector2d, Vector2d>> pairs = {
      {Vector2d(0, 0), Vector2d(1, 1)}, {Vector2d(1, 1), Vector2d(0.5, 0.5)}, {Vector2d(-0.25, 0.5), Vector2d(1, 0)}};
  for (const auto& [a, b] : pairs) {
    const double oracle = lattice_energy(c, a, b, 10, 0.025, 0.2);
    const double e = geo::compute_geodesic(c, a, b, 30).energy;
    EXPECT_LE(std::abs(e - oracle), 0.01 * oracle) << a.transpose() << " -> " << b.transpose();
  }
}

TEST(Geodesic, CurvedMetricNoWorseThanLattice) {
  const auto c = curved_certificate();
  const Vector2d a(-1.0, 1.0), b(1.0, 1.0);
  const double oracle = lattice_energy(c, a, b, 10, 0.025, 0.3);
  const double e = geo::compute_geodesic(c, a, b, 10).energy;
  EXPECT_LE(e, oracle + 1e-9);
  EXPECT_GE(e, 0.98 * oracle);
}

TEST(Geodesic, RejectsBadArguments) {
  const auto c = curved_certificate();
  EXPECT_THROW(geo::compute_geodesic(c, Vector2d(0, 0), Vector2d(1, 1), 0), InvalidArgument);
  EXPECT_THROW(geo::compute_geodesic(c, VectorXd::Zero(3), Vector2d(1, 1), 5), DimensionMismatch);
}

TEST(Geodesic, PathCsvHasOneRowPerNode) {
  const auto c = curved_certificate();
  const auto p = geo::compute_geodesic(c, Vector2d(0, 0), Vector2d(1, 0.5), 6);
  std::ostringstream os;
  geo::write_path_csv(os, p, c);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "s,x1,x2,dx1,dx2,segment_energy");
  int rows = 0;
  double total = 0.0;
  while (std::getline(in, line)) {
    ++rows;
    total += std::stod(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 7);
  EXPECT_NEAR(total, p.energy, 1e-12);
}

}  // namespace
}  // namespace dccm
