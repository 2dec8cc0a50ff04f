#include "parapuzzle/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>

namespace parapuzzle {

double round15(double x) {
  if (!std::isfinite(x)) return x;
  return std::strtod(fmt(x).c_str(), nullptr);
}

Json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round15(x);
}

Json json_complex(Complex z) { return Json::array({json_number(z.real()), json_number(z.imag())}); }

Json json_polyline(const Polyline& line) {
  Json out = Json::array();
  for (const auto& z : line) out.push_back(json_complex(z));
  return out;
}

std::string csv_field(const std::string& text) {
  if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
  std::string out = "\"";
  for (char ch : text) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

namespace {

std::string_view kind_name(PieceKind kind) {
  switch (kind) {
    case PieceKind::Y: return "Y";
    case PieceKind::V0: return "V0";
    case PieceKind::X: return "X";
    case PieceKind::Z: return "Z";
    case PieceKind::Outside: return "Outside";
    case PieceKind::Boundary: return "Boundary";
  }
  return "?";
}

}  // namespace

Json tiling_json(const InitialTiling& t) {
  Json out;
  out["c"] = json_complex(t.c);
  out["p"] = t.p;
  out["q"] = t.q;
  out["dyadic_depth"] = t.dyadic_depth;
  out["equipotential_level"] = json_number(t.equip_level);
  out["alpha"] = json_complex(t.alpha);
  out["alpha_prime"] = json_complex(t.alpha_prime);
  Json angles = Json::array();
  for (const auto& a : t.cycle.angles) angles.push_back(a.to_string());
  out["cycle"] = angles;
  out["critical_sector"] = t.critical_sector;
  out["characteristic_sector"] = t.characteristic_sector;
  Json pieces = Json::array();
  for (const auto& piece : t.catalog) {
    Json j;
    j["label"] = piece.label();
    j["kind"] = kind_name(piece.kind);
    j["index"] = piece.index;
    j["generation"] = piece.generation;
    j["code"] = piece.code;
    Json arcs = Json::array();
    for (const auto& a : piece.arcs) arcs.push_back(Json::array({a.from.to_string(), a.to.to_string()}));
    j["arcs"] = arcs;
    j["level"] = json_number(piece.level);
    j["depth"] = piece.depth;
    pieces.push_back(j);
  }
  out["catalog"] = pieces;
  return out;
}

Json complex_nest_json(const ComplexNest& nest) {
  Json out;
  out["stop"] = to_string(nest.stop);
  out["diagnostic"] = nest.diagnostic;
  Json levels = Json::array();
  for (const auto& l : nest.levels) {
    Json j;
    j["level"] = l.level;
    j["return_time"] = l.return_time;
    j["central"] = l.central;
    j["cascade_len"] = l.cascade_len;
    j["depth"] = l.depth;
    levels.push_back(j);
  }
  out["levels"] = levels;
  return out;
}

Json real_nest_json(const RealNest& nest) {
  Json out;
  out["c"] = json_number(nest.c);
  out["stop"] = to_string(nest.stop);
  out["diagnostic"] = nest.diagnostic;
  Json levels = Json::array();
  for (const auto& l : nest.levels) {
    Json j;
    j["level"] = l.level;
    j["half_width"] = json_number(l.half_width);
    j["return_time"] = l.return_time;
    j["central"] = l.central;
    j["cascade_len"] = l.cascade_len;
    levels.push_back(j);
  }
  out["levels"] = levels;
  return out;
}

SvgCanvas::SvgCanvas(Box view, int width_px) : view_(view), width_(width_px) {
  if (!(view.width() > 0) || !(view.height() > 0) || width_px < 1)
    fail(ErrorCode::InvalidArgument, "SVG view must have positive extent");
  height_ = std::max(1, static_cast<int>(std::lround(width_px * view.height() / view.width())));
}

double SvgCanvas::px(double x) const { return (x - view_.x0) / view_.width() * width_; }
double SvgCanvas::py(double y) const { return (view_.y1 - y) / view_.height() * height_; }

void SvgCanvas::polyline(const Polyline& line, const std::string& stroke, bool closed, const std::string& fill,
                         double stroke_px) {
  if (line.empty()) return;
  body_ << (closed ? "<polygon" : "<polyline") << " fill=\"" << fill << "\" stroke=\"" << stroke
        << "\" stroke-width=\"" << fmt(stroke_px) << "\" points=\"";
  for (const auto& z : line) body_ << fmt(px(z.real())) << ',' << fmt(py(z.imag())) << ' ';
  body_ << "\"/>\n";
}

void SvgCanvas::circle(Complex center, double radius_px, const std::string& fill) {
  body_ << "<circle cx=\"" << fmt(px(center.real())) << "\" cy=\"" << fmt(py(center.imag())) << "\" r=\""
        << fmt(radius_px) << "\" fill=\"" << fill << "\"/>\n";
}

void SvgCanvas::text(Complex at, const std::string& content, double size_px) {
  std::string escaped;
  for (char ch : content) {
    if (ch == '<') escaped += "&lt;";
    else if (ch == '>') escaped += "&gt;";
    else if (ch == '&') escaped += "&amp;";
    else escaped += ch;
  }
  body_ << "<text x=\"" << fmt(px(at.real())) << "\" y=\"" << fmt(py(at.imag())) << "\" font-size=\"" << fmt(size_px)
        << "\" font-family=\"monospace\">" << escaped << "</text>\n";
}

void SvgCanvas::write(std::ostream& out) const {
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width_ << "\" height=\"" << height_
      << "\" viewBox=\"0 0 " << width_ << ' ' << height_ << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      << body_.str() << "</svg>\n";
}

void write_line_chart_svg(std::ostream& out, const std::string& title, const std::vector<double>& x,
                          const std::vector<double>& y, bool log_y) {
  std::vector<Complex> pts;
  for (std::size_t k = 0; k < std::min(x.size(), y.size()); ++k) {
    if (log_y && !(y[k] > 0)) continue;
    if (!std::isfinite(x[k]) || !std::isfinite(y[k])) continue;
    pts.emplace_back(x[k], log_y ? std::log10(y[k]) : y[k]);
  }
  Box box{0.0, 0.0, 1.0, 1.0};
  if (!pts.empty()) {
    box = bounding_box(pts);
    const double mx = std::max(box.width(), 1e-12) * 0.1;
    const double my = std::max(box.height(), 1e-12) * 0.15;
    box = {box.x0 - mx, box.y0 - my, box.x1 + mx, box.y1 + my};
  }
  SvgCanvas svg(box, 640);
  svg.polyline(pts, "steelblue", false, "none", 2.0);
  for (const auto& z : pts) {
    svg.circle(z, 3.0, "steelblue");
    svg.text(z, fmt(log_y ? std::pow(10.0, z.imag()) : z.imag()), 10.0);
  }
  svg.text({box.x0 + 0.02 * box.width(), box.y1 - 0.05 * box.height()}, title + (log_y ? " (log scale)" : ""), 14.0);
  svg.write(out);
}

}  // namespace parapuzzle
