#pragma once

#include <ostream>
#include <string>

#include "metro/analytics.hpp"
#include "metro/dynamics.hpp"

namespace metro {

/// Shortest decimal form that round-trips to the same double.
std::string format_number(double v);

/// Columns: k,j,departure,dwell,run,headway for k = 1..K.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log);

/// Columns: m,demand_scale,x_mean,X_mean,headway_s,frequency_hz,phase,term1,term2,term3.
/// Invalid cells carry phase INVALID and empty numeric fields.
void write_sweep_csv(std::ostream& out, const SweepGrid& grid);

}  // namespace metro
