#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parapuzzle/common.hpp"

namespace parapuzzle {

using Polyline = std::vector<Complex>;

struct Box {
  double x0 = 0.0;
  double y0 = 0.0;
  double x1 = 0.0;
  double y1 = 0.0;

  static Box around(Complex center, double half_width) {
    return {center.real() - half_width, center.imag() - half_width, center.real() + half_width,
            center.imag() + half_width};
  }
  bool contains(Complex z) const { return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1; }
  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  Complex center() const { return {0.5 * (x0 + x1), 0.5 * (y0 + y1)}; }
};

Box bounding_box(const Polyline& line);

/// Crossing-number test; the polygon is implicitly closed.
bool point_in_polygon(const Polyline& polygon, Complex z);
double distance_to_segment(Complex a, Complex b, Complex z);
double distance_to_polyline(const Polyline& line, Complex z, bool closed);
/// Positive for counterclockwise polygons.
double signed_area(const Polyline& polygon);
bool segments_intersect(Complex a, Complex b, Complex c, Complex d);
/// Whether two closed polylines cross or touch.
bool polygons_intersect(const Polyline& a, const Polyline& b);

/// Closes a polyline by repeating its first point when needed.
Polyline closed(Polyline line);

/// Labels points by the polygon (region) containing them, accelerated by a
/// uniform grid: cells crossed by no edge carry their region directly.
class RegionLocator {
 public:
  RegionLocator() = default;
  RegionLocator(std::vector<Polyline> regions, int grid = 256);

  /// Region index containing z, or -1 outside every region. Sets near_edge when
  /// z lies within tol of some region edge.
  int locate(Complex z, double tol, bool& near_edge) const;
  const std::vector<Polyline>& regions() const { return regions_; }
  const Box& box() const { return box_; }

 private:
  struct Edge {
    Complex a;
    Complex b;
  };
  int slow_locate(Complex z) const;
  int cell_of(Complex z, int& ix, int& iy) const;

  std::vector<Polyline> regions_;
  Box box_;
  int grid_ = 0;
  double dx_ = 1.0;
  double dy_ = 1.0;
  std::vector<int> cell_region_;  // -2 marks a mixed cell
  std::vector<std::uint32_t> edge_offsets_;  // edges of cell c: [offsets[c], offsets[c + 1])
  std::vector<Edge> edges_;
};

/// Row-major boolean raster over a window; cell (i, j) has center
/// (x0 + (i + 1/2) dx, y0 + (j + 1/2) dy).
struct Raster {
  Box window;
  int nx = 0;
  int ny = 0;
  std::vector<std::uint8_t> cells;

  Raster() = default;
  Raster(Box w, int nx_, int ny_) : window(w), nx(nx_), ny(ny_), cells(static_cast<std::size_t>(nx_) * ny_, 0) {}

  std::uint8_t& at(int i, int j) { return cells[static_cast<std::size_t>(j) * nx + i]; }
  std::uint8_t at(int i, int j) const { return cells[static_cast<std::size_t>(j) * nx + i]; }
  Complex center(int i, int j) const {
    return {window.x0 + (i + 0.5) * window.width() / nx, window.y0 + (j + 0.5) * window.height() / ny};
  }
  /// Cell containing z, or nullopt outside the window.
  std::optional<std::pair<int, int>> cell(Complex z) const;
  std::size_t count() const;
};

/// The 4-connected component of nonzero cells containing (i, j).
Raster component4(const Raster& mask, int i, int j);
bool touches_edge(const Raster& mask);

/// Marching-squares contours of the nonzero cells (4-connected foreground),
/// as closed polylines through cell-edge midpoints. Outer boundaries are
/// counterclockwise, holes clockwise.
std::vector<Polyline> contours(const Raster& mask);

/// Run-length encoding of the cells in row-major order, starting with a run of zeros.
std::vector<std::uint32_t> run_lengths(const Raster& mask);
Raster from_run_lengths(Box window, int nx, int ny, const std::vector<std::uint32_t>& runs);

}  // namespace parapuzzle
