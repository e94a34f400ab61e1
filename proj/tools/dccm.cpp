// dccm: synthesize, simulate, verify and inspect contraction-metric controllers.
//
// Exit status: 0 success, 1 domain failure (infeasible synthesis, failed
// verification, simulation abort), 2 usage or input-file error.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <Eigen/Dense>

#include "dccm/errors.hpp"
#include "dccm/geodesic.hpp"
#include "dccm/io.hpp"
#include "dccm/plot.hpp"
#include "dccm/simulate.hpp"
#include "dccm/synth.hpp"

namespace {

using namespace dccm;

constexpr int kOk = 0;
constexpr int kDomainFailure = 1;
constexpr int kUsage = 2;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) throw UsageError(what + ": '" + s + "' is not a number");
  return v;
}

// "a,b,c"
Eigen::VectorXd parse_vector(const std::string& s, const std::string& what) {
  const auto parts = split(s, ',');
  if (parts.empty()) throw UsageError(what + ": empty vector");
  Eigen::VectorXd v(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) v(static_cast<Eigen::Index>(i)) = parse_double(parts[i], what);
  return v;
}

// "lo:hi,lo:hi"
sys::Box parse_box(const std::string& s, const std::string& what) {
  sys::Box b;
  for (const auto& axis : split(s, ',')) {
    const auto lh = split(axis, ':');
    if (lh.size() != 2) throw UsageError(what + ": expected lo:hi, got '" + axis + "'");
    const double lo = parse_double(lh[0], what), hi = parse_double(lh[1], what);
    if (!(lo <= hi)) throw UsageError(what + ": interval '" + axis + "' has lo > hi");
    b.axes.push_back({lo, hi});
  }
  return b;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string out;
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.6g", i ? "," : "", v(i));
    out += buf;
  }
  return out;
}

void check_pair(const sys::ControlAffineSystem& s, const cert::DccmCertificate& c) {
  if (s.state_dim() != c.n() || s.input_dim() != c.m())
    throw UsageError("certificate is for n = " + std::to_string(c.n()) + ", m = " + std::to_string(c.m()) +
                     " but the system has n = " + std::to_string(s.state_dim()) +
                     ", m = " + std::to_string(s.input_dim()));
}

struct SynthArgs {
  std::string system, out, mode = "margin";
  int degree = 2;
  int gain_degree = -1;
  double beta = 0.1;
  double epsilon = 1e-4;
};

int run_synth(const SynthArgs& a) {
  const auto s = io::load_system(a.system);
  const cert::CertificateTemplate tmpl(s.state_dim(), s.input_dim(), a.degree,
                                       a.gain_degree < 0 ? a.degree : a.gain_degree, a.beta);
  synth::SynthesisOptions opts;
  opts.sos.epsilon = a.epsilon;
  opts.sos.mode = a.mode == "feasibility" ? synth::ObjectiveMode::FeasibilityOnly : synth::ObjectiveMode::MaximizeMargin;
  const auto r = synth::synthesize_detailed(s, tmpl, opts);
  io::write_json_file(a.out, io::certificate_to_json(r.certificate));
  std::printf("status: %s\n", sdp::to_string(r.solution.status));
  std::printf("iterations: %d\n", r.solution.iterations);
  std::printf("margin: %.9g\n", r.certificate.margin());
  std::printf("wrote %s\n", a.out.c_str());
  return kOk;
}

struct SimulateArgs {
  std::string system, cert, schedule, x0 = "0,0", out, plot;
  int steps = -1;
  int ngeo = 30;
  bool eq28_gain = false;
};

int run_simulate(const SimulateArgs& a) {
  const auto s = io::load_system(a.system);
  const auto c = io::load_certificate(a.cert);
  check_pair(s, c);
  auto schedule = io::load_schedule(a.schedule);
  if (a.steps >= 0) schedule.total_steps = a.steps;
  try {
    schedule.validate(s);
  } catch (const Error& e) {
    throw FormatError("", e.what(), a.schedule);
  }
  const Eigen::VectorXd x0 = parse_vector(a.x0, "--x0");
  if (x0.size() != s.state_dim()) throw UsageError("--x0 must have " + std::to_string(s.state_dim()) + " entries");

  sim::SimulationOptions opts;
  opts.controller.N = a.ngeo;
  opts.controller.gain = a.eq28_gain ? ctrl::GainEvaluation::AtState : ctrl::GainEvaluation::AlongGeodesic;

  auto emit = [&](const sim::TrajectoryLog& log) {
    std::ostringstream csv;
    io::write_trajectory_csv(csv, log);
    if (a.out.empty())
      std::cout << csv.str();
    else
      io::write_text_file(a.out, csv.str());
    if (!a.plot.empty()) io::write_text_file(a.plot, plot::trajectory_svg(log));
  };

  sim::TrajectoryLog log;
  try {
    log = sim::simulate(s, c, schedule, x0, opts);
  } catch (const sim::SimulationError& e) {
    emit(e.partial_log());
    std::fprintf(stderr, "simulation aborted: %s\n", e.what());
    return kDomainFailure;
  }
  emit(log);
  int unconverged = 0;
  for (const auto& r : log.rows) unconverged += r.geodesic_converged ? 0 : 1;
  std::FILE* info = a.out.empty() ? stderr : stdout;
  std::fprintf(info, "steps: %zu\n", log.rows.size());
  std::fprintf(info, "final state: %s\n", format_vector(log.final_state).c_str());
  if (!log.rows.empty()) {
    std::fprintf(info, "final tracking error: %.3e\n",
                 (log.final_state - log.rows.back().x_star).cwiseAbs().maxCoeff());
    std::fprintf(info, "final geodesic energy: %.3e\n", log.rows.back().energy);
  }
  if (unconverged) std::fprintf(info, "geodesic solves above tolerance: %d\n", unconverged);
  return kOk;
}

struct VerifyArgs {
  std::string system, cert, box = "-0.5:1.5,-0.5:1.5", ubox = "-0.2:0.2", out;
  int res = 21;
};

int run_verify(const VerifyArgs& a) {
  const auto s = io::load_system(a.system);
  const auto c = io::load_certificate(a.cert);
  check_pair(s, c);
  const auto xb = parse_box(a.box, "--box"), ub = parse_box(a.ubox, "--ubox");
  if (xb.dim() != s.state_dim()) throw UsageError("--box must have " + std::to_string(s.state_dim()) + " intervals");
  if (ub.dim() != s.input_dim()) throw UsageError("--ubox must have " + std::to_string(s.input_dim()) + " intervals");
  const auto r = sim::verify_contraction(s, c, xb, ub, a.res);
  const std::string text = io::report_to_json(r).dump(2) + "\n";
  if (a.out.empty()) {
    std::cout << text;
  } else {
    io::write_text_file(a.out, text);
    std::printf("points: %d\n", r.points);
    std::printf("max lemma eigenvalue: %.6e\n", r.max_lemma_eigenvalue);
    std::printf("metric eigenvalues: [%.6e, %.6e]\n", r.min_metric_eigenvalue, r.max_metric_eigenvalue);
    std::printf("sign disagreements: %d\n", r.sign_disagreements);
    std::printf("singular points: %d\n", r.singular_points);
    std::printf("%s\n", r.pass ? "PASS" : "FAIL");
  }
  return r.pass ? kOk : kDomainFailure;
}

struct GeodesicArgs {
  std::string cert, from, to, out;
  int n = 30;
};

int run_geodesic(const GeodesicArgs& a) {
  const auto c = io::load_certificate(a.cert);
  const Eigen::VectorXd from = parse_vector(a.from, "--from"), to = parse_vector(a.to, "--to");
  if (from.size() != c.n() || to.size() != c.n())
    throw UsageError("--from and --to must have " + std::to_string(c.n()) + " entries");
  const auto p = geo::compute_geodesic(c, from, to, a.n);
  if (!a.out.empty()) {
    std::ostringstream csv;
    geo::write_path_csv(csv, p, c);
    io::write_text_file(a.out, csv.str());
  }
  std::printf("energy: %.12g\n", p.energy);
  std::printf("length: %.12g\n", p.length);
  std::printf("iterations: %d\n", p.iterations);
  std::printf("converged: %s\n", p.converged ? "yes" : "no");
  return kOk;
}

struct PresetArgs {
  std::string name = "cstr", system_out, schedule_out;
};

int run_preset(const PresetArgs& a) {
  if (a.name != "cstr") throw UsageError("unknown preset '" + a.name + "'");
  if (!a.system_out.empty()) io::write_json_file(a.system_out, io::system_to_json(sys::cstr_preset()));
  if (!a.schedule_out.empty()) io::write_json_file(a.schedule_out, io::schedule_to_json(sim::cstr_schedule()));
  if (a.system_out.empty() && a.schedule_out.empty())
    std::cout << io::system_to_json(sys::cstr_preset()).dump(2) << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete-time control contraction metrics: synthesis, simulation and verification"};
  app.require_subcommand(1);

  SynthArgs sa;
  auto* synth_cmd = app.add_subcommand("synth", "Synthesize a certificate (W, L) by SOS programming");
  synth_cmd->add_option("--system", sa.system, "System JSON")->required()->check(CLI::ExistingFile);
  synth_cmd->add_option("--degree", sa.degree, "Polynomial degree of W")->check(CLI::NonNegativeNumber);
  synth_cmd->add_option("--gain-degree", sa.gain_degree, "Polynomial degree of L (default: --degree)");
  synth_cmd->add_option("--beta", sa.beta, "Contraction rate parameter in (0, 1]");
  synth_cmd->add_option("--epsilon", sa.epsilon, "Minimum margin");
  synth_cmd->add_option("--mode", sa.mode, "margin or feasibility")->check(CLI::IsMember({"margin", "feasibility"}));
  synth_cmd->add_option("--out", sa.out, "Certificate JSON to write")->required();

  SimulateArgs ma;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate the closed loop against a reference schedule");
  sim_cmd->add_option("--system", ma.system, "System JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--cert", ma.cert, "Certificate JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--schedule", ma.schedule, "Reference schedule JSON")->required()->check(CLI::ExistingFile);
  sim_cmd->add_option("--x0", ma.x0, "Initial state, comma separated");
  sim_cmd->add_option("--steps", ma.steps, "Number of steps (default: the schedule's total_steps)")
      ->check(CLI::NonNegativeNumber);
  sim_cmd->add_option("--out", ma.out, "Trajectory CSV (stdout when omitted)");
  sim_cmd->add_option("--plot", ma.plot, "SVG plot to write");
  sim_cmd->add_option("--ngeo", ma.ngeo, "Geodesic segments")->check(CLI::PositiveNumber);
  sim_cmd->add_flag("--eq28-gain", ma.eq28_gain, "Evaluate the gain at the plant state only");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Check the contraction condition on a grid");
  verify_cmd->add_option("--system", va.system, "System JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--cert", va.cert, "Certificate JSON")->required()->check(CLI::ExistingFile);
  verify_cmd->add_option("--box", va.box, "State box lo:hi,lo:hi");
  verify_cmd->add_option("--ubox", va.ubox, "Input box lo:hi");
  verify_cmd->add_option("--res", va.res, "Grid points per axis")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--out", va.out, "Report JSON (stdout when omitted)");

  GeodesicArgs ga;
  auto* geo_cmd = app.add_subcommand("geodesic", "Compute one geodesic under a certificate's metric");
  geo_cmd->add_option("--cert", ga.cert, "Certificate JSON")->required()->check(CLI::ExistingFile);
  geo_cmd->add_option("--from", ga.from, "Start point, comma separated")->required();
  geo_cmd->add_option("--to", ga.to, "End point, comma separated")->required();
  geo_cmd->add_option("--n", ga.n, "Segments")->check(CLI::PositiveNumber);
  geo_cmd->add_option("--out", ga.out, "Path CSV to write");

  PresetArgs pa;
  auto* preset_cmd = app.add_subcommand("preset", "Write the built-in CSTR system and schedule");
  preset_cmd->add_option("name", pa.name, "Preset name (cstr)");
  preset_cmd->add_option("--system-out", pa.system_out, "System JSON to write");
  preset_cmd->add_option("--schedule-out", pa.schedule_out, "Schedule JSON to write");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*synth_cmd) return run_synth(sa);
    if (*sim_cmd) return run_simulate(ma);
    if (*verify_cmd) return run_verify(va);
    if (*geo_cmd) return run_geodesic(ga);
    if (*preset_cmd) return run_preset(pa);
  } catch (const UsageError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const FormatError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const synth::SynthesisInfeasible& e) {
    std::fprintf(stderr, "infeasible: %s\n", e.what());
    return kDomainFailure;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDomainFailure;
  }
  return kUsage;
}
