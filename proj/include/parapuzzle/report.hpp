#pragma once

#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "parapuzzle/common.hpp"
#include "parapuzzle/geometry.hpp"
#include "parapuzzle/puzzle.hpp"
#include "parapuzzle/realnest.hpp"

namespace parapuzzle {

using Json = nlohmann::ordered_json;

/// The value rounded to 15 significant digits; JSON output then prints at most 15.
double round15(double x);
Json json_number(double x);
Json json_complex(Complex z);
Json json_polyline(const Polyline& line);

/// RFC 4180 field quoting.
std::string csv_field(const std::string& text);

Json tiling_json(const InitialTiling& tiling);
Json complex_nest_json(const ComplexNest& nest);
Json real_nest_json(const RealNest& nest);

/// SVG 1.1 document over a window with the y axis pointing up.
class SvgCanvas {
 public:
  SvgCanvas(Box view, int width_px);

  void polyline(const Polyline& line, const std::string& stroke, bool closed, const std::string& fill = "none",
                double stroke_px = 1.0);
  void circle(Complex center, double radius_px, const std::string& fill);
  void text(Complex at, const std::string& content, double size_px = 12.0);
  void write(std::ostream& out) const;

 private:
  double px(double x) const;
  double py(double y) const;

  Box view_;
  int width_ = 0;
  int height_ = 0;
  std::ostringstream body_;
};

/// Line chart with optional logarithmic y axis.
void write_line_chart_svg(std::ostream& out, const std::string& title, const std::vector<double>& x,
                          const std::vector<double>& y, bool log_y);

}  // namespace parapuzzle
