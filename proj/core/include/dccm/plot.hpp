#pragma once

#include <string>

#include "dccm/simulate.hpp"

namespace dccm::plot {

struct PlotOptions {
  int width = 720;
  int panel_height = 200;
  double sampling_period = 0.1;
};

// Static SVG with three stacked panels: states with their references, the
// input with its feedforward, and the geodesic length per step.
std::string trajectory_svg(const sim::TrajectoryLog& log, const PlotOptions& opts = {});

}  // namespace dccm::plot
