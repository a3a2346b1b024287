#pragma once

#include <string>
#include <vector>

#include "dqn/network.hpp"

namespace dqn {

/// One epoch of a single-qubit model as a standalone SVG document with three
/// panels: the Bloch sphere seen from +Q3 (Q1-Q2 plane), seen from -Q2 (Q1-Q3
/// plane), and a histogram of the encoded inputs x~. Points are coloured by
/// label; pre-SU(2) states are drawn hollow, post-SU(2) states filled.
std::string render_bloch_svg(const TrajectoryRecord& record, const std::vector<std::string>& class_names);

}  // namespace dqn
