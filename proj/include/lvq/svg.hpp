#pragma once

#include <string>
#include <vector>

#include "lvq/evaluation.hpp"

namespace lvq {

/// Standalone SVG 1.1 line plot of averaged accuracy-reject curves:
/// one polyline per curve, axes and a small legend.
void write_arc_svg(const std::vector<AveragedARC>& arcs, const std::string& path);

}  // namespace lvq
