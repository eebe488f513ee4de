#pragma once

#include <string>
#include <vector>

#include "ale/logpolar.hpp"

namespace ale::harness {

// One closed polyline, viewBox fitted to the points with a 5% margin.
void write_cluster_svg(const std::string& path, const std::vector<cplx>& points);

// Step plot of theta_k against k with a zero axis.
void write_angles_svg(const std::string& path, const std::vector<double>& angles);

// Anisotropy statistic of the grown material: principal-axis standard
// deviation ratio of the trace points with |w| > exclude_radius. Near 1 for
// bushy growth, large for a straight slit.
double principal_aspect_ratio(const std::vector<cplx>& points, double exclude_radius = 1.0 + 1e-9);

}  // namespace ale::harness
