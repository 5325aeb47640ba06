#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kcenter/geometry.hpp"

namespace kcenter {

/// Plain-text point format: one point per line, whitespace-separated
/// coordinates. Blank lines are skipped; ids are the 0-based index of the
/// data line. Ragged rows or unparsable tokens raise Validation.
std::vector<Point> read_points(std::istream& in);
std::vector<Point> load_point_file(const std::string& path);

void write_points(std::ostream& out, const PointSet& points);

}  // namespace kcenter
