#pragma once

#include <string>
#include <vector>

#include "zdiheat/sim.hpp"

namespace zdiheat::output {

void write_field_csv(const std::string& path, const SimTrajectory& traj);
/// Header t,u_1..u_m.
void write_controls_csv(const std::string& path, const SpaceTimeGrid& grid,
                        const std::vector<double>& controls, std::size_t m);
void write_errors_csv(const std::string& path, const ErrorTrace& trace);

struct Series {
  std::string label;
  std::vector<double> values;
};

void write_heatmap_svg(const std::string& path, const SimTrajectory& traj, const std::string& title);
void write_line_svg(const std::string& path, const std::string& title, const std::string& x_label,
                    const std::vector<double>& xs, const std::vector<Series>& series);

}  // namespace zdiheat::output
