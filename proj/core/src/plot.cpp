#include "dccm/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <vector>

namespace dccm::plot {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

struct Series {
  std::vector<double> y;
  std::string label;
  std::string color;
  bool dashed = false;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string px(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

// Ticks at multiples of a 1-2-5 step covering [lo, hi].
std::vector<double> ticks(double lo, double hi, int target) {
  const double raw = (hi - lo) / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double f : {1.0, 2.0, 5.0, 10.0})
    if (f * mag >= raw) {
      step = f * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

void panel(std::ostringstream& os, const std::vector<Series>& series, const std::string& title, double top, const PlotOptions& o,
           double t_max) {
  const double left = 70, right = o.width - 20.0, ptop = top + 24, bottom = top + o.panel_height - 30.0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : series)
    for (double v : s.y)
      if (std::isfinite(v)) lo = std::min(lo, v), hi = std::max(hi, v);
  if (!std::isfinite(lo)) lo = 0, hi = 1;
  if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;
  auto X = [&](double t) { return left + (right - left) * (t_max > 0 ? t / t_max : 0.0); };
  auto Y = [&](double v) { return bottom - (bottom - ptop) * (v - lo) / (hi - lo); };

  os << "<text x=\"" << px(left) << "\" y=\"" << px(top + 16) << "\" font-size=\"13\">" << title << "</text>\n";
  os << "<rect x=\"" << px(left) << "\" y=\"" << px(ptop) << "\" width=\"" << px(right - left) << "\" height=\""
     << px(bottom - ptop) << "\" fill=\"none\" stroke=\"#444\"/>\n";
  for (double v : ticks(lo, hi, 4)) {
    os << "<line x1=\"" << px(left) << "\" x2=\"" << px(right) << "\" y1=\"" << px(Y(v)) << "\" y2=\"" << px(Y(v))
       << "\" stroke=\"#ddd\"/>\n";
    os << "<text x=\"" << px(left - 6) << "\" y=\"" << px(Y(v) + 4) << "\" font-size=\"10\" text-anchor=\"end\">" << num(v)
       << "</text>\n";
  }
  for (double t : ticks(0.0, t_max, 5)) {
    os << "<text x=\"" << px(X(t)) << "\" y=\"" << px(bottom + 14) << "\" font-size=\"10\" text-anchor=\"middle\">" << num(t)
       << "</text>\n";
  }
  double legend_x = left + 10;
  for (const auto& s : series) {
    os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\"";
    if (s.dashed) os << " stroke-dasharray=\"5,3\"";
    os << " points=\"";
    for (std::size_t k = 0; k < s.y.size(); ++k) {
      if (!std::isfinite(s.y[k])) continue;
      os << px(X(static_cast<double>(k) * o.sampling_period)) << ',' << px(Y(s.y[k])) << ' ';
    }
    os << "\"/>\n";
    os << "<text x=\"" << px(legend_x) << "\" y=\"" << px(ptop + 14) << "\" font-size=\"10\" fill=\"" << s.color << "\">"
       << s.label << "</text>\n";
    legend_x += 12.0 + 7.0 * static_cast<double>(s.label.size());
  }
}

}  // namespace

std::string trajectory_svg(const sim::TrajectoryLog& log, const PlotOptions& opts) {
  const int height = 3 * opts.panel_height + 20;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << opts.width << "\" height=\"" << height << "\" viewBox=\"0 0 "
     << opts.width << ' ' << height << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  const std::size_t K = log.rows.size();
  const double t_max = K > 1 ? static_cast<double>(K - 1) * opts.sampling_period : 1.0;
  const Eigen::Index n = K ? log.rows.front().x.size() : 0;
  const Eigen::Index m = K ? log.rows.front().u.size() : 0;

  auto column = [&](auto get) {
    std::vector<double> y;
    y.reserve(K);
    for (const auto& r : log.rows) y.push_back(get(r));
    return y;
  };
  std::vector<Series> states, inputs, lengths;
  for (Eigen::Index i = 0; i < n; ++i) {
    const std::string c = kPalette[i % 6];
    const std::string idx = std::to_string(i + 1);
    states.push_back({column([i](const sim::TrajectoryRow& r) { return r.x(i); }), "x" + idx, c, false});
    states.push_back({column([i](const sim::TrajectoryRow& r) { return r.x_star(i); }), "x" + idx + "*", c, true});
  }
  for (Eigen::Index i = 0; i < m; ++i) {
    const std::string c = kPalette[(i + 2) % 6];
    const std::string idx = std::to_string(i + 1);
    inputs.push_back({column([i](const sim::TrajectoryRow& r) { return r.u(i); }), "u" + idx, c, false});
    inputs.push_back({column([i](const sim::TrajectoryRow& r) { return r.u_star(i); }), "u" + idx + "*", c, true});
  }
  lengths.push_back({column([](const sim::TrajectoryRow& r) { return r.length; }), "d", kPalette[3], false});

  panel(os, states, "state and reference", 0, opts, t_max);
  panel(os, inputs, "control input", opts.panel_height, opts, t_max);
  panel(os, lengths, "geodesic length", 2.0 * opts.panel_height, opts, t_max);
  os << "<text x=\"" << opts.width / 2 << "\" y=\"" << height - 6
     << "\" font-size=\"11\" text-anchor=\"middle\">time</text>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace dccm::plot
