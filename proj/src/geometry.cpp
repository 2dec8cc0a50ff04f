#include "parapuzzle/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace parapuzzle {

Box bounding_box(const Polyline& line) {
  if (line.empty()) return {};
  Box b{line[0].real(), line[0].imag(), line[0].real(), line[0].imag()};
  for (const Complex& z : line) {
    b.x0 = std::min(b.x0, z.real());
    b.x1 = std::max(b.x1, z.real());
    b.y0 = std::min(b.y0, z.imag());
    b.y1 = std::max(b.y1, z.imag());
  }
  return b;
}

bool point_in_polygon(const Polyline& polygon, Complex z) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  bool inside = false;
  const double x = z.real();
  const double y = z.imag();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Complex a = polygon[i];
    const Complex b = polygon[j];
    if ((a.imag() > y) != (b.imag() > y)) {
      const double xc = a.real() + (y - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real());
      if (x < xc) inside = !inside;
    }
  }
  return inside;
}

namespace {

double squared_distance_to_segment(Complex a, Complex b, Complex z) {
  const double dx = b.real() - a.real();
  const double dy = b.imag() - a.imag();
  const double px = z.real() - a.real();
  const double py = z.imag() - a.imag();
  const double len2 = dx * dx + dy * dy;
  const double t = len2 == 0.0 ? 0.0 : std::clamp((px * dx + py * dy) / len2, 0.0, 1.0);
  const double ex = px - t * dx;
  const double ey = py - t * dy;
  return ex * ex + ey * ey;
}

}  // namespace

double distance_to_segment(Complex a, Complex b, Complex z) { return std::sqrt(squared_distance_to_segment(a, b, z)); }

double distance_to_polyline(const Polyline& line, Complex z, bool is_closed) {
  if (line.empty()) return INFINITY;
  if (line.size() == 1) return std::abs(z - line[0]);
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, distance_to_segment(line[i], line[i + 1], z));
  if (is_closed) best = std::min(best, distance_to_segment(line.back(), line.front(), z));
  return best;
}

double signed_area(const Polyline& polygon) {
  double area = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++)
    area += polygon[j].real() * polygon[i].imag() - polygon[i].real() * polygon[j].imag();
  return 0.5 * area;
}

namespace {

double cross(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

bool on_segment(Complex a, Complex b, Complex p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

}  // namespace

bool segments_intersect(Complex a, Complex b, Complex c, Complex d) {
  const double d1 = cross(d - c, a - c);
  const double d2 = cross(d - c, b - c);
  const double d3 = cross(b - a, c - a);
  const double d4 = cross(b - a, d - a);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
  if (d1 == 0 && on_segment(c, d, a)) return true;
  if (d2 == 0 && on_segment(c, d, b)) return true;
  if (d3 == 0 && on_segment(a, b, c)) return true;
  if (d4 == 0 && on_segment(a, b, d)) return true;
  return false;
}

bool polygons_intersect(const Polyline& a, const Polyline& b) {
  if (a.size() < 2 || b.size() < 2) return false;
  const Box ba = bounding_box(a);
  const Box bb = bounding_box(b);
  if (ba.x1 < bb.x0 || bb.x1 < ba.x0 || ba.y1 < bb.y0 || bb.y1 < ba.y0) return false;
  const std::size_t na = a.size();
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < na; ++i) {
    const Complex p = a[i];
    const Complex q = a[(i + 1) % na];
    const Box e{std::min(p.real(), q.real()), std::min(p.imag(), q.imag()), std::max(p.real(), q.real()),
                std::max(p.imag(), q.imag())};
    if (e.x1 < bb.x0 || bb.x1 < e.x0 || e.y1 < bb.y0 || bb.y1 < e.y0) continue;
    for (std::size_t j = 0; j < nb; ++j)
      if (segments_intersect(p, q, b[j], b[(j + 1) % nb])) return true;
  }
  return false;
}

Polyline closed(Polyline line) {
  if (!line.empty() && line.front() != line.back()) line.push_back(line.front());
  return line;
}

RegionLocator::RegionLocator(std::vector<Polyline> regions, int grid) : regions_(std::move(regions)), grid_(grid) {
  if (grid_ < 1) fail(ErrorCode::InvalidArgument, "locator grid must be positive");
  bool first = true;
  for (const auto& r : regions_) {
    if (r.empty()) continue;
    const Box b = bounding_box(r);
    if (first) {
      box_ = b;
      first = false;
    } else {
      box_ = {std::min(box_.x0, b.x0), std::min(box_.y0, b.y0), std::max(box_.x1, b.x1), std::max(box_.y1, b.y1)};
    }
  }
  const double pad = 1e-6 * std::max({box_.width(), box_.height(), 1e-300});
  box_ = {box_.x0 - pad, box_.y0 - pad, box_.x1 + pad, box_.y1 + pad};
  dx_ = box_.width() / grid_;
  dy_ = box_.height() / grid_;
  const std::size_t ncell = static_cast<std::size_t>(grid_) * grid_;
  cell_region_.assign(ncell, -1);

  // Every point within pad of an edge falls in a cell that lists the edge.
  // Two passes fill a compressed table: counts, then edges.
  std::vector<std::uint32_t> count(ncell + 1, 0);
  auto for_cells = [&](Complex a, Complex b, auto&& visit) {
    const int i0 = std::clamp(static_cast<int>((std::min(a.real(), b.real()) - pad - box_.x0) / dx_), 0, grid_ - 1);
    const int i1 = std::clamp(static_cast<int>((std::max(a.real(), b.real()) + pad - box_.x0) / dx_), 0, grid_ - 1);
    const int j0 = std::clamp(static_cast<int>((std::min(a.imag(), b.imag()) - pad - box_.y0) / dy_), 0, grid_ - 1);
    const int j1 = std::clamp(static_cast<int>((std::max(a.imag(), b.imag()) + pad - box_.y0) / dy_), 0, grid_ - 1);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) visit(static_cast<std::size_t>(j) * grid_ + i);
  };
  for (const auto& r : regions_)
    for (std::size_t k = 0, n = r.size(); k < n; ++k) for_cells(r[k], r[(k + 1) % n], [&](std::size_t c) { ++count[c + 1]; });
  for (std::size_t c = 0; c < ncell; ++c) count[c + 1] += count[c];
  edge_offsets_ = count;
  edges_.resize(count[ncell]);
  for (const auto& r : regions_)
    for (std::size_t k = 0, n = r.size(); k < n; ++k) {
      const Edge e{r[k], r[(k + 1) % n]};
      for_cells(e.a, e.b, [&](std::size_t c) {
        edges_[count[c]++] = e;
        cell_region_[c] = -2;
      });
    }

  // Scanline fill of the remaining cells by their centers.
  std::vector<double> xs;
  for (int j = 0; j < grid_; ++j) {
    const double y = box_.y0 + (j + 0.5) * dy_;
    for (std::size_t id = 0; id < regions_.size(); ++id) {
      const auto& r = regions_[id];
      const std::size_t n = r.size();
      xs.clear();
      for (std::size_t k = 0, m = n - 1; k < n; m = k++) {
        const Complex a = r[k];
        const Complex b = r[m];
        if ((a.imag() > y) != (b.imag() > y))
          xs.push_back(a.real() + (y - a.imag()) / (b.imag() - a.imag()) * (b.real() - a.real()));
      }
      std::sort(xs.begin(), xs.end());
      for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
        const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - box_.x0) / dx_ - 0.5)));
        const int i1 = std::min(grid_ - 1, static_cast<int>(std::floor((xs[k + 1] - box_.x0) / dx_ - 0.5)));
        for (int i = i0; i <= i1; ++i) {
          int& cell = cell_region_[static_cast<std::size_t>(j) * grid_ + i];
          if (cell == -1) cell = static_cast<int>(id);
        }
      }
    }
  }
}

int RegionLocator::cell_of(Complex z, int& ix, int& iy) const {
  if (!box_.contains(z)) return -1;
  ix = std::min(grid_ - 1, static_cast<int>((z.real() - box_.x0) / dx_));
  iy = std::min(grid_ - 1, static_cast<int>((z.imag() - box_.y0) / dy_));
  return iy * grid_ + ix;
}

int RegionLocator::slow_locate(Complex z) const {
  for (std::size_t id = 0; id < regions_.size(); ++id)
    if (point_in_polygon(regions_[id], z)) return static_cast<int>(id);
  return -1;
}

int RegionLocator::locate(Complex z, double tol, bool& near_edge) const {
  near_edge = false;
  int ix = 0, iy = 0;
  const int c = cell_of(z, ix, iy);
  if (c < 0) return -1;
  const int region = cell_region_[static_cast<std::size_t>(c)];
  if (region != -2) return region;
  const double tol2 = tol * tol;
  for (std::uint32_t k = edge_offsets_[c]; k < edge_offsets_[c + 1]; ++k)
    if (squared_distance_to_segment(edges_[k].a, edges_[k].b, z) <= tol2) {
      near_edge = true;
      break;
    }
  return slow_locate(z);
}

std::optional<std::pair<int, int>> Raster::cell(Complex z) const {
  if (!window.contains(z)) return std::nullopt;
  const int i = std::min(nx - 1, static_cast<int>((z.real() - window.x0) / window.width() * nx));
  const int j = std::min(ny - 1, static_cast<int>((z.imag() - window.y0) / window.height() * ny));
  return std::make_pair(i, j);
}

std::size_t Raster::count() const {
  return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](std::uint8_t v) { return v != 0; }));
}

Raster component4(const Raster& mask, int i, int j) {
  Raster out(mask.window, mask.nx, mask.ny);
  if (i < 0 || j < 0 || i >= mask.nx || j >= mask.ny || !mask.at(i, j)) return out;
  std::vector<std::pair<int, int>> stack{{i, j}};
  out.at(i, j) = 1;
  while (!stack.empty()) {
    const auto [x, y] = stack.back();
    stack.pop_back();
    const int nbr[4][2] = {{x + 1, y}, {x - 1, y}, {x, y + 1}, {x, y - 1}};
    for (const auto& n : nbr) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= mask.nx || n[1] >= mask.ny) continue;
      if (!mask.at(n[0], n[1]) || out.at(n[0], n[1])) continue;
      out.at(n[0], n[1]) = 1;
      stack.push_back({n[0], n[1]});
    }
  }
  return out;
}

bool touches_edge(const Raster& mask) {
  for (int i = 0; i < mask.nx; ++i)
    if (mask.at(i, 0) || mask.at(i, mask.ny - 1)) return true;
  for (int j = 0; j < mask.ny; ++j)
    if (mask.at(0, j) || mask.at(mask.nx - 1, j)) return true;
  return false;
}

std::vector<Polyline> contours(const Raster& mask) {
  // Lattice of cell centers padded by one empty ring; vertex (i, j) of the
  // contour graph sits on the midpoint of a lattice edge, keyed in doubled
  // lattice coordinates so that endpoints match exactly.
  const int nx = mask.nx;
  const int ny = mask.ny;
  auto value = [&](int i, int j) -> bool {
    return i >= 0 && j >= 0 && i < nx && j < ny && mask.at(i, j) != 0;
  };
  using Key = std::pair<int, int>;
  std::map<Key, Key> next;
  auto link = [&](Key a, Key b) { next[a] = b; };
  for (int j = -1; j < ny; ++j) {
    for (int i = -1; i < nx; ++i) {
      const bool a = value(i, j);          // bottom-left
      const bool b = value(i + 1, j);      // bottom-right
      const bool c = value(i + 1, j + 1);  // top-right
      const bool d = value(i, j + 1);      // top-left
      const int code = (a ? 1 : 0) | (b ? 2 : 0) | (c ? 4 : 0) | (d ? 8 : 0);
      if (code == 0 || code == 15) continue;
      const Key bottom{2 * i + 1, 2 * j};
      const Key right{2 * i + 2, 2 * j + 1};
      const Key top{2 * i + 1, 2 * j + 2};
      const Key left{2 * i, 2 * j + 1};
      // Segments are oriented with the foreground on the left.
      switch (code) {
        case 1: link(bottom, left); break;
        case 2: link(right, bottom); break;
        case 3: link(right, left); break;
        case 4: link(top, right); break;
        case 5:  // separated diagonal: foreground is 4-connected
          link(bottom, left);
          link(top, right);
          break;
        case 6: link(top, bottom); break;
        case 7: link(top, left); break;
        case 8: link(left, top); break;
        case 9: link(bottom, top); break;
        case 10:
          link(right, bottom);
          link(left, top);
          break;
        case 11: link(right, top); break;
        case 12: link(left, right); break;
        case 13: link(bottom, right); break;
        case 14: link(left, bottom); break;
        default: break;
      }
    }
  }
  std::vector<Polyline> out;
  const double hx = mask.window.width() / nx;
  const double hy = mask.window.height() / ny;
  auto to_point = [&](Key k) {
    return Complex(mask.window.x0 + (0.5 * k.first + 0.5) * hx, mask.window.y0 + (0.5 * k.second + 0.5) * hy);
  };
  while (!next.empty()) {
    const Key start = next.begin()->first;
    Polyline loop;
    Key k = start;
    for (;;) {
      auto it = next.find(k);
      if (it == next.end()) break;
      loop.push_back(to_point(k));
      const Key n = it->second;
      next.erase(it);
      k = n;
      if (k == start) break;
    }
    if (loop.size() >= 3) {
      loop.push_back(loop.front());
      out.push_back(std::move(loop));
    }
  }
  return out;
}

std::vector<std::uint32_t> run_lengths(const Raster& mask) {
  std::vector<std::uint32_t> runs;
  std::uint8_t current = 0;
  std::uint32_t length = 0;
  for (std::uint8_t v : mask.cells) {
    const std::uint8_t bit = v ? 1 : 0;
    if (bit == current) {
      ++length;
    } else {
      runs.push_back(length);
      current = bit;
      length = 1;
    }
  }
  runs.push_back(length);
  return runs;
}

Raster from_run_lengths(Box window, int nx, int ny, const std::vector<std::uint32_t>& runs) {
  Raster out(window, nx, ny);
  std::size_t pos = 0;
  std::uint8_t bit = 0;
  for (std::uint32_t r : runs) {
    if (pos + r > out.cells.size()) fail(ErrorCode::InvalidArgument, "run lengths exceed the raster size");
    std::fill_n(out.cells.begin() + static_cast<std::ptrdiff_t>(pos), r, bit);
    pos += r;
    bit ^= 1;
  }
  if (pos != out.cells.size()) fail(ErrorCode::InvalidArgument, "run lengths do not cover the raster");
  return out;
}

}  // namespace parapuzzle
