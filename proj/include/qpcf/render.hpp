#pragma once

// Deterministic SVG rendering: the unit circle, leaves as circular arcs
// orthogonal to the boundary, spine edges as geodesic arcs.

#include <cmath>
#include <cstdio>
#include <string>

#include "qpcf/hypgeom.hpp"
#include "qpcf/lamination.hpp"

namespace qpcf::render {

namespace detail {

inline std::string num(double v) {
  char buf[32];
  if (std::abs(v) < 5e-7) v = 0.0;  // avoid -0.000000
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// Scene coordinates: unit disk mapped to a 512x512 viewport.
inline double sx(double x) { return 256.0 + 240.0 * x; }
inline double sy(double y) { return 256.0 - 240.0 * y; }

// SVG path for the hyperbolic geodesic between two points of the closed
// disk: the arc of the circle through both, orthogonal to the unit circle;
// near-diameters degenerate to straight segments.
inline std::string geodesic_path(double x1, double y1, double x2, double y2) {
  // Orthogonal circle center c solves <c,p> = (1+|p|^2)/2 for both points.
  double b1 = 0.5 * (1.0 + x1 * x1 + y1 * y1);
  double b2 = 0.5 * (1.0 + x2 * x2 + y2 * y2);
  double det = x1 * y2 - y1 * x2;
  std::string out = "M " + num(sx(x1)) + " " + num(sy(y1)) + " ";
  if (std::abs(det) < 1e-9) {
    return out + "L " + num(sx(x2)) + " " + num(sy(y2));
  }
  double cx = (b1 * y2 - y1 * b2) / det;
  double cy = (x1 * b2 - b1 * x2) / det;
  double r = std::sqrt(cx * cx + cy * cy - 1.0);
  double rs = 240.0 * r;
  // Sweep so the arc bends toward the origin (the geodesic side).
  double cross = (x2 - x1) * (cy - y1) - (y2 - y1) * (cx - x1);
  int sweep = cross > 0 ? 0 : 1;
  return out + "A " + num(rs) + " " + num(rs) + " 0 0 " + std::to_string(sweep) + " " +
         num(sx(x2)) + " " + num(sy(y2));
}

}  // namespace detail

inline std::string render_svg(const Lamination& lam) {
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" "
      "viewBox=\"0 0 512 512\">\n"
      "<circle cx=\"256\" cy=\"256\" r=\"240\" fill=\"none\" stroke=\"black\" "
      "stroke-width=\"1\"/>\n";
  for (const auto& e : lam.entries()) {
    double a = 2 * M_PI * e.leaf.a().to_double();
    double b = 2 * M_PI * e.leaf.b().to_double();
    svg += "<path d=\"" +
           detail::geodesic_path(std::cos(a), std::sin(a), std::cos(b), std::sin(b)) +
           "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"1\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string render_svg(const MarkedSpine& spine) {
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"512\" height=\"512\" "
      "viewBox=\"0 0 512 512\">\n"
      "<circle cx=\"256\" cy=\"256\" r=\"240\" fill=\"none\" stroke=\"black\" "
      "stroke-width=\"1\"/>\n";
  for (auto [i, j] : spine.edges) {
    const auto& p = spine.vertices[i].x;
    const auto& q = spine.vertices[j].x;
    svg += "<path d=\"" + detail::geodesic_path(p[0], p[1], q[0], q[1]) +
           "\" fill=\"none\" stroke=\"firebrick\" stroke-width=\"1\"/>\n";
  }
  for (size_t v = 0; v < spine.vertices.size(); ++v) {
    const auto& p = spine.vertices[v].x;
    bool marked = spine.marked.count(static_cast<int>(v)) > 0;
    svg += "<circle cx=\"" + detail::num(detail::sx(p[0])) + "\" cy=\"" +
           detail::num(detail::sy(p[1])) + "\" r=\"" + (marked ? "4" : "2") +
           "\" fill=\"" + (marked ? "firebrick" : "gray") + "\"/>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace qpcf::render
