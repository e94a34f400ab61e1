#pragma once

// JSON and CSV formats for systems, certificates, schedules, verification
// reports and trajectories. Parsers throw FormatError carrying the JSON
// pointer of the offending value; the *_file helpers add the file path.

#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "dccm/certificate.hpp"
#include "dccm/poly.hpp"
#include "dccm/simulate.hpp"
#include "dccm/system.hpp"

namespace dccm::io {

using nlohmann::json;

// {"n_vars", "ordering": "grlex", "max_degree", "coeffs": [...]}, coeffs dense over the grlex basis.
json polynomial_to_json(const poly::Polynomial& p);
poly::Polynomial polynomial_from_json(const json& j, const std::string& pointer = "");

// {"n", "m", "f": [poly], "g": [[poly]], "domain": [[lo, hi], ...]}
json system_to_json(const sys::ControlAffineSystem& s);
sys::ControlAffineSystem system_from_json(const json& j);

// {"template": {...}, "w": {"11": [...], ...}, "l": {"1": [...], ...}, "margin": r}
json certificate_to_json(const cert::DccmCertificate& c);
cert::DccmCertificate certificate_from_json(const json& j);

// {"segments": [{"start_step", "x_star", "u_star"}], "total_steps"}
json schedule_to_json(const sim::ReferenceSchedule& s);
sim::ReferenceSchedule schedule_from_json(const json& j);

json report_to_json(const sim::VerificationReport& r);

// Header k, x1.., u1.., x1_star.., u1_star.., energy, length; 17 significant digits.
void write_trajectory_csv(std::ostream& os, const sim::TrajectoryLog& log);

// Throws FormatError (pointer "") with the path on unreadable or unparsable files.
json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const json& j);
void write_text_file(const std::string& path, const std::string& text);

sys::ControlAffineSystem load_system(const std::string& path);
cert::DccmCertificate load_certificate(const std::string& path);
sim::ReferenceSchedule load_schedule(const std::string& path);

}  // namespace dccm::io
