// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dccm/certificate.hpp"
#include "dccm/errors.hpp"
#include "dccm/geodesic.hpp"
#include "dccm/sdp.hpp"
#include "dccm/simulate.hpp"
#include "dccm/synth.hpp"
#include "fixtures.hpp"
#include "path_oracle.hpp"
#include "test_support.hpp"

namespace {

using namespace dccm;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::VectorXd;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void run(int id, const char* name, std::optional<double> budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double dt = seconds_since(t0);
  if (budget_s && dt > *budget_s) {
    out.pass = false;
    out.detail += fmt("; runtime %.2f s exceeds %.0f s", dt, *budget_s);
  }
  if (!out.pass) ++failures;
  std::printf("%s  %d  %-34s %8.3f s  %s\n", out.pass ? "PASS" : "FAIL", id, name, dt, out.detail.c_str());
  std::fflush(stdout);
}

// CSTR closed loop shared by criteria 1 and 2; its cost is charged to criterion 1.
struct CstrRun {
  sim::ReferenceSchedule schedule;
  sim::TrajectoryLog log;
};

const CstrRun& cstr_run() {
  static const CstrRun r = [] {
    const auto sys = sys::cstr_preset();
    const auto c = synth::synthesize(sys, cert::CertificateTemplate(2, 1, 2, 2, 0.1));
    CstrRun out;
    out.schedule = sim::cstr_schedule();
    sim::SimulationOptions o;
    o.controller.N = 30;
    out.log = sim::simulate(sys, c, out.schedule, Vector2d(0, 0), o);
    return out;
  }();
  return r;
}

// [start, end) step ranges of the schedule's segments.
std::vector<std::pair<int, int>> segment_ranges(const sim::ReferenceSchedule& s) {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < s.segments.size(); ++i) {
    const int end = i + 1 < s.segments.size() ? s.segments[i + 1].start_step : s.total_steps;
    out.emplace_back(s.segments[i].start_step, end);
  }
  return out;
}

Outcome criterion_tracking() {
  const auto& r = cstr_run();
  Outcome out{true, "settling steps"};
  for (const auto& [start, end] : segment_ranges(r.schedule)) {
    // First step from which the error stays below 1e-3 until the next switch.
    int settled = -1;
    for (int k = end - 1; k >= start; --k) {
      const auto& row = r.log.rows[static_cast<std::size_t>(k)];
      if ((row.x - row.x_star).cwiseAbs().maxCoeff() >= 1e-3) break;
      settled = k;
    }
    if (settled < 0) {
      out.pass = false;
      out.detail += fmt(" [switch %d: never]", start);
      continue;
    }
    const int steps = settled - start;
    if (steps > 15) out.pass = false;
    out.detail += fmt(" [switch %d: %d]", start, steps);
  }
  out.detail += " (limit 15)";
  return out;
}

Outcome criterion_energy_decay() {
  const auto& r = cstr_run();
  double worst = 0.0;
  int checked = 0;
  for (const auto& [start, end] : segment_ranges(r.schedule))
    for (int k = start; k + 1 < end; ++k) {
      const double E = r.log.rows[static_cast<std::size_t>(k)].energy;
      if (E < 1e-6) break;
      worst = std::max(worst, r.log.rows[static_cast<std::size_t>(k) + 1].energy / E);
      ++checked;
    }
  return {checked > 0 && worst <= 0.95, fmt("max E_{k+1}/E_k = %.4f over %d steps (limit 0.95)", worst, checked)};
}

Outcome criterion_grid() {
  const auto r = sim::verify_contraction(sys::cstr_preset(), dccm::testing::cstr_certificate(), sim::default_state_box(),
                                         sim::default_input_box(), 21);
  const bool ok = r.pass && r.points == 9261 && r.sign_disagreements == 0;
  return {ok, fmt("points %d, max lemma %.3e, min metric %.3e, sign disagreements %d, singular %d", r.points,
                  r.max_lemma_eigenvalue, r.min_metric_eigenvalue, r.sign_disagreements, r.singular_points)};
}

sdp::SdpProblem max_eigenvalue_problem(const MatrixXd& A) {
  sdp::SdpProblem p(1);
  p.objective << 1.0;
  sdp::LmiBlock b(-A);
  b.add(0, MatrixXd::Identity(A.rows(), A.cols()));
  p.blocks.push_back(b);
  return p;
}

Outcome criterion_sdp() {
  struct Case {
    std::string name;
    sdp::SdpProblem problem;
    double optimum;
  };
  std::vector<Case> cases;
  {
    MatrixXd A(2, 2);
    A << 0, 1, 1, 0;
    cases.push_back({"lambda_max [[0,1],[1,0]]", max_eigenvalue_problem(A), 1.0});
  }
  {
    MatrixXd A(3, 3);
    A << 2, 1, 0, 1, 2, 0, 0, 0, 1;
    cases.push_back({"lambda_max 3x3", max_eigenvalue_problem(A), 3.0});
    // max t s.t. A - t I >= 0
    sdp::SdpProblem p(1);
    p.objective << -1.0;
    sdp::LmiBlock b(A);
    b.add(0, MatrixXd(-MatrixXd::Identity(3, 3)));
    p.blocks.push_back(b);
    cases.push_back({"lambda_min 3x3", p, -1.0});
  }
  {
    // min y0 s.t. [[y0, 1], [1, y1]] >= 0, y1 = 4
    sdp::SdpProblem p(2);
    p.objective << 1.0, 0.0;
    MatrixXd F0(2, 2), F1 = MatrixXd::Zero(2, 2), F2 = MatrixXd::Zero(2, 2);
    F0 << 0, 1, 1, 0;
    F1(0, 0) = 1;
    F2(1, 1) = 1;
    sdp::LmiBlock b(F0);
    b.add(0, F1);
    b.add(1, F2);
    p.blocks.push_back(b);
    p.equalities.push_back({{{1, 1.0}}, 4.0});
    cases.push_back({"Schur complement 1/4", p, 0.25});
  }
  {
    // min tr P s.t. P - A^T P A - I >= 0 with A = diag(0.5, 0.2):
    // P = diag(1 / 0.75, 1 / 0.96).
    sdp::SdpProblem p(3);
    p.objective << 1.0, 0.0, 1.0;
    const Eigen::Matrix2d A = Vector2d(0.5, 0.2).asDiagonal();
    Eigen::Matrix2d E[3];
    E[0] << 1, 0, 0, 0;
    E[1] << 0, 1, 1, 0;
    E[2] << 0, 0, 0, 1;
    sdp::LmiBlock lyap(-MatrixXd::Identity(2, 2)), pos(MatrixXd::Zero(2, 2));
    for (int i = 0; i < 3; ++i) {
      lyap.add(i, MatrixXd(E[i] - A.transpose() * E[i] * A));
      pos.add(i, MatrixXd(E[i]));
    }
    p.blocks = {lyap, pos};
    cases.push_back({"discrete Lyapunov trace", p, 1.0 / 0.75 + 1.0 / 0.96});
  }
  {
    // min y0 + y1 s.t. diag(y0, y1) >= 0, y0 - y1 = 1
    sdp::SdpProblem p(2);
    p.objective << 1.0, 1.0;
    MatrixXd F1 = MatrixXd::Zero(2, 2), F2 = MatrixXd::Zero(2, 2);
    F1(0, 0) = 1;
    F2(1, 1) = 1;
    sdp::LmiBlock b(MatrixXd::Zero(2, 2));
    b.add(0, F1);
    b.add(1, F2);
    p.blocks.push_back(b);
    p.equalities.push_back({{{0, 1.0}, {1, -1.0}}, 1.0});
    cases.push_back({"diagonal LP", p, 1.0});
  }

  Outcome out{true, ""};
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto s = sdp::solve_sdp(c.problem);
    const double err = std::abs(s.objective_value - c.optimum);
    worst = std::max(worst, err);
    if (s.status != sdp::SolveStatus::Optimal || !(err <= 1e-6)) {
      out.pass = false;
      out.detail += fmt("%s: %s err %.2e; ", c.name.c_str(), sdp::to_string(s.status), err);
    }
  }
  // [[t, 2], [2, t]] >= 0 and t <= 1
  sdp::SdpProblem bad(1);
  bad.objective << 1.0;
  MatrixXd F0(2, 2);
  F0 << 0, 2, 2, 0;
  sdp::LmiBlock a(F0);
  a.add(0, MatrixXd::Identity(2, 2));
  sdp::LmiBlock b(MatrixXd::Constant(1, 1, 1.0));
  b.add(0, MatrixXd::Constant(1, 1, -1.0));
  bad.blocks = {a, b};
  const auto st = sdp::solve_sdp(bad).status;
  if (st != sdp::SolveStatus::Infeasible) out.pass = false;
  out.detail += fmt("%zu optima, max abs error %.2e; infeasible problem -> %s", cases.size(), worst, sdp::to_string(st));
  return out;
}

Outcome criterion_geodesic_oracle() {
  Outcome out{true, ""};
  double worst_const = 0.0;
  for (int t = 0; t < 10; ++t) {
    const MatrixXd R = MatrixXd::NullaryExpr(2, 2, [] { return dccm::testing::uniform(-1.0, 1.0); });
    const MatrixXd W = R * R.transpose() + 0.5 * MatrixXd::Identity(2, 2);
    const auto c = dccm::testing::constant_certificate(W, MatrixXd::Zero(1, 2));
    const VectorXd a = dccm::testing::random_point(2), b = dccm::testing::random_point(2);
    const double E = (b - a).dot(W.inverse() * (b - a));
    const auto p = geo::compute_geodesic(c, a, b, 30);
    worst_const = std::max({worst_const, std::abs(p.energy - E) / E, std::abs(p.length - std::sqrt(E)) / std::sqrt(E)});
  }
  if (!(worst_const <= 1e-8)) out.pass = false;

  const auto& c = dccm::testing::cstr_certificate();
  const std::vector<std::pair<Vector2d, Vector2d>> pairs = {
      {Vector2d(0, 0), Vector2d(1, 1)}, {Vector2d(1, 1), Vector2d(0.5, 0.5)}, {Vector2d(-0.25, 0.5), Vector2d(1, 0)}};
  double worst_lattice = 0.0;
  for (const auto& [a, b] : pairs) {
    const double oracle = dccm::testing::lattice_energy(c, a, b, 10, 0.025, 0.2);
    const double e = geo::compute_geodesic(c, a, b, 30).energy;
    worst_lattice = std::max(worst_lattice, std::abs(e - oracle) / oracle);
  }
  if (!(worst_lattice <= 0.01)) out.pass = false;
  out.detail = fmt("constant metric max rel error %.2e (limit 1e-8); CSTR vs lattice oracle max rel diff %.2e (limit 1e-2)",
                   worst_const, worst_lattice);
  return out;
}

Outcome criterion_gradient() {
  const auto& c = dccm::testing::cstr_certificate();
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const VectorXd a = dccm::testing::random_point(2, -0.5, 1.5), b = dccm::testing::random_point(2, -0.5, 1.5);
    const int N = 30;
    MatrixXd D = (b - a).replicate(1, N);
    MatrixXd P = MatrixXd::NullaryExpr(2, N, [] { return dccm::testing::uniform(-0.5, 0.5); });
    P.colwise() -= P.rowwise().mean();
    D += P;
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
    worst = std::max(worst, (grad - fd).norm() / grad.norm());
  }
  return {worst < 1e-4, fmt("max relative error %.2e at 10 points (limit 1e-4)", worst)};
}

Outcome criterion_negative_control() {
  Outcome out{true, ""};
  poly::Polynomial f(1, {{poly::Monomial({1}), 2.0}});
  const sys::ControlAffineSystem unstabilizable({f}, poly::PolyMatrix(1, 1, 1));
  try {
    synth::synthesize(unstabilizable, cert::CertificateTemplate(1, 1, 0, 0, 0.1));
    out.pass = false;
    out.detail = "unstabilizable pair: certificate returned; ";
  } catch (const synth::SynthesisInfeasible& e) {
    out.detail = fmt("unstabilizable pair: SynthesisInfeasible (%s); ", sdp::to_string(e.status()));
  }
  const auto r = sim::verify_contraction(sys::cstr_preset(), dccm::testing::cstr_certificate().with_zero_gain(),
                                         sim::default_state_box(), sim::default_input_box(), 21);
  if (r.pass) out.pass = false;
  out.detail += fmt("zeroed L: pass=%s, max lemma %.3e", r.pass ? "true" : "false", r.max_lemma_eigenvalue);
  return out;
}

Outcome criterion_scalar() {
  poly::Polynomial f(1, {{poly::Monomial({1}), 0.5}});
  poly::PolyMatrix g(1, 1, 1);
  g(0, 0) = poly::Polynomial::constant(1, 1.0);
  const auto c = synth::synthesize(sys::ControlAffineSystem({f}, g), cert::CertificateTemplate(1, 1, 0, 0, 0.1));
  const VectorXd x0 = VectorXd::Zero(1);
  const double K = c.L_at(x0)(0, 0) / c.W_at(x0)(0, 0);
  const double v = (0.5 + K) * (0.5 + K);
  return {v <= 0.9 + 1e-6, fmt("K = %.6f, (0.5 + K)^2 = %.6f (limit 0.9 + 1e-6)", K, v)};
}

}  // namespace

int main() {
  run(1, "CSTR end-to-end tracking", 60.0, criterion_tracking);
  run(2, "geodesic energy decay", std::nullopt, criterion_energy_decay);
  run(3, "grid verification 21^3", 30.0, criterion_grid);
  run(4, "SDP oracle suite", 5.0, criterion_sdp);
  run(5, "geodesic oracles", 60.0, criterion_geodesic_oracle);
  run(6, "geodesic gradient check", std::nullopt, criterion_gradient);
  run(7, "negative controls", std::nullopt, criterion_negative_control);
  run(8, "scalar analytic bound", std::nullopt, criterion_scalar);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
