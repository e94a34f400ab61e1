#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "dccm/controller.hpp"
#include "dccm/geodesic.hpp"
#include "dccm/poly.hpp"
#include "dccm/sdp.hpp"
#include "dccm/simulate.hpp"
#include "dccm/synth.hpp"

using namespace dccm;

namespace {

const cert::DccmCertificate& cstr_cert() {
  static const auto c = synth::synthesize(sys::cstr_preset(), cert::CertificateTemplate(2, 1, 2, 2, 0.1));
  return c;
}

}  // namespace

static void BM_PolyMul(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const auto basis = poly::monomial_basis(2, d);
  const auto p = poly::from_coefficients(basis, Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(basis.size()), -1, 1));
  for (auto _ : state) benchmark::DoNotOptimize(p * p);
}
BENCHMARK(BM_PolyMul)->Arg(2)->Arg(4)->Arg(6);

static void BM_SolveLyapunovSdp(benchmark::State& state) {
  sdp::SdpProblem p(3);
  p.objective << 1.0, 0.0, 1.0;
  Eigen::Matrix2d A;
  A << 0.1, -0.6, 0.7, 0.2;
  Eigen::Matrix2d E[3];
  E[0] << 1, 0, 0, 0;
  E[1] << 0, 1, 1, 0;
  E[2] << 0, 0, 0, 1;
  sdp::LmiBlock lyap(-Eigen::MatrixXd::Identity(2, 2)), pos(Eigen::MatrixXd::Zero(2, 2));
  for (int i = 0; i < 3; ++i) {
    lyap.add(i, Eigen::MatrixXd(E[i] - A.transpose() * E[i] * A));
    pos.add(i, Eigen::MatrixXd(E[i]));
  }
  p.blocks = {lyap, pos};
  for (auto _ : state) benchmark::DoNotOptimize(sdp::solve_sdp(p));
}
BENCHMARK(BM_SolveLyapunovSdp);

static void BM_SynthesizeCstr(benchmark::State& state) {
  const auto s = sys::cstr_preset();
  const cert::CertificateTemplate t(2, 1, 2, 2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(synth::synthesize(s, t));
  state.SetLabel("degree 2");
}
BENCHMARK(BM_SynthesizeCstr)->Unit(benchmark::kMillisecond);

static void BM_Geodesic(benchmark::State& state) {
  const int N = static_cast<int>(state.range(0));
  const Eigen::Vector2d a(0, 0), b(1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(geo::compute_geodesic(cstr_cert(), a, b, N));
}
BENCHMARK(BM_Geodesic)->Arg(10)->Arg(30)->Arg(60)->Unit(benchmark::kMicrosecond);

static void BM_ControlInput(benchmark::State& state) {
  const auto s = sys::cstr_preset();
  const Eigen::Vector2d x(0.2, 0.1), xs(0, 0);
  const Eigen::VectorXd us = Eigen::VectorXd::Zero(1);
  for (auto _ : state) benchmark::DoNotOptimize(ctrl::control_input(cstr_cert(), s, x, xs, us));
}
BENCHMARK(BM_ControlInput)->Unit(benchmark::kMicrosecond);

static void BM_SimulateCstr(benchmark::State& state) {
  const auto s = sys::cstr_preset();
  const auto sched = sim::cstr_schedule();
  for (auto _ : state) benchmark::DoNotOptimize(sim::simulate(s, cstr_cert(), sched, Eigen::Vector2d(0, 0)));
}
BENCHMARK(BM_SimulateCstr)->Unit(benchmark::kMillisecond);

static void BM_VerifyGrid(benchmark::State& state) {
  const auto s = sys::cstr_preset();
  const int res = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(
        sim::verify_contraction(s, cstr_cert(), sim::default_state_box(), sim::default_input_box(), res));
  state.SetItemsProcessed(state.iterations() * res * res * res);
}
BENCHMARK(BM_VerifyGrid)->Arg(11)->Arg(21)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
