#include "kcenter/point_io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "kcenter/error.hpp"

namespace kcenter {

std::vector<Point> read_points(std::istream& in) {
  std::vector<Point> points;
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::vector<double> coords;
    std::string token;
    while (fields >> token) {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
      if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw Error(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": not a number: '" + token + "'");
      }
      coords.push_back(v);
    }
    if (coords.empty()) continue;
    if (dim == 0) dim = coords.size();
    if (coords.size() != dim) {
      throw Error(ErrorKind::kValidation, "line " + std::to_string(line_no) + ": ragged row (" +
                                              std::to_string(coords.size()) + " values, expected " +
                                              std::to_string(dim) + ")");
    }
    points.push_back(Point{std::move(coords), static_cast<std::int64_t>(points.size())});
  }
  return points;
}

std::vector<Point> load_point_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  return read_points(in);
}

void write_points(std::ostream& out, const PointSet& points) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto c = points.coords(i);
    for (std::size_t a = 0; a < c.size(); ++a) out << (a ? " " : "") << c[a];
    out << '\n';
  }
}

}  // namespace kcenter
