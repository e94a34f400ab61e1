#include "dccm/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dccm/errors.hpp"

namespace dccm::io {

namespace {

const json& at(const json& j, const std::string& key, const std::string& pointer) {
  if (!j.is_object()) throw FormatError(pointer, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw FormatError(pointer + "/" + key, "missing");
  return *it;
}

double number(const json& j, const std::string& pointer) {
  if (!j.is_number()) throw FormatError(pointer, "expected a number");
  return j.get<double>();
}

int integer(const json& j, const std::string& pointer) {
  if (!j.is_number_integer()) throw FormatError(pointer, "expected an integer");
  return j.get<int>();
}

const json& array(const json& j, const std::string& pointer, std::optional<std::size_t> size = std::nullopt) {
  if (!j.is_array()) throw FormatError(pointer, "expected an array");
  if (size && j.size() != *size)
    throw FormatError(pointer, "expected " + std::to_string(*size) + " elements, found " + std::to_string(j.size()));
  return j;
}

Eigen::VectorXd vector(const json& j, const std::string& pointer, std::optional<std::size_t> size = std::nullopt) {
  array(j, pointer, size);
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], pointer + "/" + std::to_string(i));
  return v;
}

json to_array(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json box_to_json(const sys::Box& b) {
  json a = json::array();
  for (const auto& iv : b.axes) a.push_back({iv.lo, iv.hi});
  return a;
}

sys::Box box_from_json(const json& j, const std::string& pointer) {
  array(j, pointer);
  sys::Box b;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = pointer + "/" + std::to_string(i);
    const Eigen::VectorXd lh = vector(j[i], p, 2);
    if (!(lh(0) <= lh(1))) throw FormatError(p, "interval has lo > hi");
    b.axes.push_back({lh(0), lh(1)});
  }
  return b;
}

std::string index_key(int i, int j, bool pair, int n) {
  const std::string sep = n >= 10 ? "," : "";
  return pair ? std::to_string(i + 1) + sep + std::to_string(j + 1) : std::to_string(j + 1);
}

void check_grlex(const json& j, const std::string& pointer) {
  if (j.contains("ordering") && j["ordering"] != "grlex") throw FormatError(pointer + "/ordering", "only grlex is supported");
}

template <class F>
auto with_path(const std::string& path, F&& f) {
  try {
    return f(read_json_file(path));
  } catch (const FormatError& e) {
    if (!e.path().empty()) throw;
    throw e.with_path(path);
  } catch (const Error& e) {
    throw FormatError("", e.what(), path);
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json polynomial_to_json(const poly::Polynomial& p) {
  const int d = p.degree();
  const auto basis = poly::monomial_basis(p.n_vars(), d);
  return {{"n_vars", p.n_vars()}, {"ordering", "grlex"}, {"max_degree", d}, {"coeffs", to_array(poly::coefficients(p, basis))}};
}

poly::Polynomial polynomial_from_json(const json& j, const std::string& pointer) {
  const int n = integer(at(j, "n_vars", pointer), pointer + "/n_vars");
  const int d = integer(at(j, "max_degree", pointer), pointer + "/max_degree");
  if (n < 1) throw FormatError(pointer + "/n_vars", "must be positive");
  if (d < 0) throw FormatError(pointer + "/max_degree", "must be nonnegative");
  check_grlex(j, pointer);
  const auto basis = poly::monomial_basis(n, d);
  const Eigen::VectorXd c = vector(at(j, "coeffs", pointer), pointer + "/coeffs", basis.size());
  return poly::from_coefficients(basis, c);
}

json system_to_json(const sys::ControlAffineSystem& s) {
  json f = json::array();
  for (const auto& p : s.drift()) f.push_back(polynomial_to_json(p));
  json g = json::array();
  for (int i = 0; i < s.state_dim(); ++i) {
    json row = json::array();
    for (int k = 0; k < s.input_dim(); ++k) row.push_back(polynomial_to_json(s.input_matrix()(i, k)));
    g.push_back(row);
  }
  json out = {{"n", s.state_dim()}, {"m", s.input_dim()}, {"f", f}, {"g", g}};
  if (s.domain()) out["domain"] = box_to_json(*s.domain());
  return out;
}

sys::ControlAffineSystem system_from_json(const json& j) {
  const int n = integer(at(j, "n", ""), "/n");
  const int m = integer(at(j, "m", ""), "/m");
  if (n < 1 || m < 1) throw FormatError("/n", "state and input dimensions must be positive");
  const json& fj = array(at(j, "f", ""), "/f", static_cast<std::size_t>(n));
  std::vector<poly::Polynomial> f;
  for (int i = 0; i < n; ++i) {
    const std::string p = "/f/" + std::to_string(i);
    f.push_back(polynomial_from_json(fj[static_cast<std::size_t>(i)], p));
    if (f.back().n_vars() != n) throw FormatError(p + "/n_vars", "must equal n");
  }
  const json& gj = array(at(j, "g", ""), "/g", static_cast<std::size_t>(n));
  poly::PolyMatrix g(n, m, n);
  for (int i = 0; i < n; ++i) {
    const std::string pr = "/g/" + std::to_string(i);
    const json& row = array(gj[static_cast<std::size_t>(i)], pr, static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const std::string p = pr + "/" + std::to_string(k);
      g(i, k) = polynomial_from_json(row[static_cast<std::size_t>(k)], p);
      if (g(i, k).n_vars() != n) throw FormatError(p + "/n_vars", "must equal n");
    }
  }
  std::optional<sys::Box> domain;
  if (j.contains("domain") && !j["domain"].is_null()) {
    domain = box_from_json(j["domain"], "/domain");
    if (domain->dim() != n) throw FormatError("/domain", "must have n intervals");
  }
  return sys::ControlAffineSystem(std::move(f), std::move(g), std::move(domain));
}

json certificate_to_json(const cert::DccmCertificate& c) {
  const auto& t = c.templ();
  json tj = {{"n", t.n()},
             {"m", t.m()},
             {"metric_degree", t.metric_degree()},
             {"gain_degree", t.gain_degree()},
             {"beta", t.beta()},
             {"ordering", "grlex"}};
  json w = json::object(), l = json::object();
  for (int i = 0; i < t.n(); ++i)
    for (int k = i; k < t.n(); ++k)
      w[index_key(i, k, true, t.n())] = to_array(c.w_coeffs()[static_cast<std::size_t>(t.w_entry(i, k))]);
  for (int i = 0; i < t.m(); ++i)
    for (int k = 0; k < t.n(); ++k)
      l[index_key(i, k, t.m() > 1, t.n())] = to_array(c.l_coeffs()[static_cast<std::size_t>(i * t.n() + k)]);
  return {{"template", tj}, {"w", w}, {"l", l}, {"margin", c.margin()}};
}

cert::DccmCertificate certificate_from_json(const json& j) {
  const json& tj = at(j, "template", "");
  const int n = integer(at(tj, "n", "/template"), "/template/n");
  const int m = integer(at(tj, "m", "/template"), "/template/m");
  const int md = integer(at(tj, "metric_degree", "/template"), "/template/metric_degree");
  const int gd = integer(at(tj, "gain_degree", "/template"), "/template/gain_degree");
  const double beta = number(at(tj, "beta", "/template"), "/template/beta");
  check_grlex(tj, "/template");
  cert::CertificateTemplate t;
  try {
    t = cert::CertificateTemplate(n, m, md, gd, beta);
  } catch (const InvalidArgument& e) {
    throw FormatError("/template", e.what());
  }
  const json& wj = at(j, "w", "");
  const json& lj = at(j, "l", "");
  std::vector<Eigen::VectorXd> w(static_cast<std::size_t>(t.num_w_entries()));
  std::vector<Eigen::VectorXd> l;
  for (int i = 0; i < n; ++i)
    for (int k = i; k < n; ++k) {
      const std::string key = index_key(i, k, true, n);
      w[static_cast<std::size_t>(t.w_entry(i, k))] = vector(at(wj, key, "/w"), "/w/" + key, t.basis().size());
    }
  for (int i = 0; i < m; ++i)
    for (int k = 0; k < n; ++k) {
      const std::string key = index_key(i, k, m > 1, n);
      l.push_back(vector(at(lj, key, "/l"), "/l/" + key, t.gain_basis().size()));
    }
  const double margin = j.contains("margin") ? number(j["margin"], "/margin") : 0.0;
  return cert::DccmCertificate(t, std::move(w), std::move(l), margin);
}

json schedule_to_json(const sim::ReferenceSchedule& s) {
  json segs = json::array();
  for (const auto& seg : s.segments)
    segs.push_back({{"start_step", seg.start_step}, {"x_star", to_array(seg.x_star)}, {"u_star", to_array(seg.u_star)}});
  return {{"segments", segs}, {"total_steps", s.total_steps}};
}

sim::ReferenceSchedule schedule_from_json(const json& j) {
  sim::ReferenceSchedule s;
  s.total_steps = integer(at(j, "total_steps", ""), "/total_steps");
  const json& segs = array(at(j, "segments", ""), "/segments");
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const std::string p = "/segments/" + std::to_string(i);
    sim::ReferenceSegment seg;
    seg.start_step = integer(at(segs[i], "start_step", p), p + "/start_step");
    seg.x_star = vector(at(segs[i], "x_star", p), p + "/x_star");
    seg.u_star = vector(at(segs[i], "u_star", p), p + "/u_star");
    s.segments.push_back(std::move(seg));
  }
  return s;
}

json report_to_json(const sim::VerificationReport& r) {
  json worst = nullptr;
  if (r.worst_point.x.size() > 0) worst = {{"x", to_array(r.worst_point.x)}, {"u", to_array(r.worst_point.u)}};
  return {{"state_box", box_to_json(r.state_box)},
          {"input_box", box_to_json(r.input_box)},
          {"resolution", r.resolution},
          {"points", r.points},
          {"max_lemma_eigenvalue", r.max_lemma_eigenvalue},
          {"worst_point", worst},
          {"min_metric_eigenvalue", r.min_metric_eigenvalue},
          {"max_metric_eigenvalue", r.max_metric_eigenvalue},
          {"min_block_eigenvalue", r.min_block_eigenvalue},
          {"sign_disagreements", r.sign_disagreements},
          {"singular_points", r.singular_points},
          {"pass", r.pass}};
}

void write_trajectory_csv(std::ostream& os, const sim::TrajectoryLog& log) {
  if (log.rows.empty()) {
    os << "k,energy,length\n";
    return;
  }
  const auto n = log.rows.front().x.size();
  const auto m = log.rows.front().u.size();
  os << "k";
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i + 1;
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i + 1;
  for (Eigen::Index i = 0; i < n; ++i) os << ",x" << i + 1 << "_star";
  for (Eigen::Index i = 0; i < m; ++i) os << ",u" << i + 1 << "_star";
  os << ",energy,length\n";
  for (const auto& r : log.rows) {
    os << r.k;
    for (const auto* v : {&r.x, &r.u, &r.x_star, &r.u_star})
      for (Eigen::Index i = 0; i < v->size(); ++i) os << ',' << fmt((*v)(i));
    os << ',' << fmt(r.energy) << ',' << fmt(r.length) << '\n';
  }
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("", "cannot open file", path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw FormatError("", std::string("invalid JSON: ") + e.what(), path);
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

void write_json_file(const std::string& path, const json& j) { write_text_file(path, j.dump(2) + "\n"); }

sys::ControlAffineSystem load_system(const std::string& path) {
  return with_path(path, [](const json& j) { return system_from_json(j); });
}

cert::DccmCertificate load_certificate(const std::string& path) {
  return with_path(path, [](const json& j) { return certificate_from_json(j); });
}

sim::ReferenceSchedule load_schedule(const std::string& path) {
  return with_path(path, [](const json& j) { return schedule_from_json(j); });
}

}  // namespace dccm::io
