#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "qpcf/angle.hpp"

namespace qpcf {

enum class Model { Disk, Ball };

/// A point of the Poincaré disk (2d) or ball (3d) model.
struct HPoint {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  Model model = Model::Disk;

  static HPoint disk(double a, double b) { return {{a, b, 0.0}, Model::Disk}; }
  static HPoint ball(double a, double b, double c) { return {{a, b, c}, Model::Ball}; }

  double norm2() const { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2]; }
  double norm() const { return std::sqrt(norm2()); }
};

namespace hyp {

inline std::array<double, 3> add(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  return {u[0] + v[0], u[1] + v[1], u[2] + v[2]};
}
inline std::array<double, 3> sub(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  return {u[0] - v[0], u[1] - v[1], u[2] - v[2]};
}
inline std::array<double, 3> scale(double s, const std::array<double, 3>& u) {
  return {s * u[0], s * u[1], s * u[2]};
}
inline double dot(const std::array<double, 3>& u, const std::array<double, 3>& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}
inline double norm(const std::array<double, 3>& u) { return std::sqrt(dot(u, u)); }

/// Möbius addition on the unit ball; u ⊕ v is the image of v under the
/// hyperbolic translation taking 0 to u.
inline std::array<double, 3> mobius_add(const std::array<double, 3>& u,
                                        const std::array<double, 3>& v) {
  double uv = dot(u, v), u2 = dot(u, u), v2 = dot(v, v);
  double denom = 1.0 + 2.0 * uv + u2 * v2;
  auto a = scale(1.0 + 2.0 * uv + v2, u);
  auto b = scale(1.0 - u2, v);
  return scale(1.0 / denom, add(a, b));
}

inline std::array<double, 3> neg(const std::array<double, 3>& u) {
  return {-u[0], -u[1], -u[2]};
}

}  // namespace hyp

inline void check_same_model(const HPoint& a, const HPoint& b) {
  if (a.model != b.model)
    throw Error(ErrorKind::ModelMismatch, "points live in different models");
}

inline double hyp_dist(const HPoint& a, const HPoint& b) {
  check_same_model(a, b);
  auto diff = hyp::sub(a.x, b.x);
  double num = hyp::dot(diff, diff);
  double da = 1.0 - a.norm2();
  double db = 1.0 - b.norm2();
  // Inputs rounded onto or past the boundary: saturate instead of blowing up,
  // so distance comparisons against representable points stay ordered.
  if (da <= 0.0 || db <= 0.0) return 745.0;
  double t = 1.0 + 2.0 * num / (da * db);
  if (!std::isfinite(t)) return 745.0;
  return std::min(std::acosh(t), 745.0);
}

/// Point at hyperbolic arc-length fraction s along the geodesic from a to b.
inline HPoint geodesic_point(const HPoint& a, const HPoint& b, double s) {
  check_same_model(a, b);
  auto v = hyp::mobius_add(hyp::neg(a.x), b.x);
  double r = hyp::norm(v);
  if (r < 1e-15) throw Error(ErrorKind::DegenerateSegment, "geodesic through equal points");
  double d = 2.0 * std::atanh(std::min(r, 1.0 - 1e-16));
  double rho = std::tanh(0.5 * s * d);
  auto q = hyp::scale(rho / r, v);
  return HPoint{hyp::mobius_add(a.x, q), a.model};
}

struct Projection {
  HPoint foot;
  double dist = 0.0;
  double s = 0.0;  // parameter of the foot along [a, b]
};

/// Nearest point of the geodesic segment [a, b] to p. In coordinates where a
/// sits at the origin the segment is a Euclidean ray and the hyperbolic
/// distance minimizer along it solves c r^2 - (1+|p|^2) r + c = 0 with
/// c = <p, u>.
inline Projection project_segment(const HPoint& p, const HPoint& a, const HPoint& b) {
  check_same_model(p, a);
  check_same_model(p, b);
  auto pv = hyp::mobius_add(hyp::neg(a.x), p.x);
  auto bv = hyp::mobius_add(hyp::neg(a.x), b.x);
  double rb = hyp::norm(bv);
  if (rb < 1e-15) throw Error(ErrorKind::DegenerateSegment, "projection onto a point");
  auto u = hyp::scale(1.0 / rb, bv);
  double c = hyp::dot(pv, u);
  double B = 1.0 + hyp::dot(pv, pv);
  double rstar = 0.0;
  if (c > 1e-15) {
    double disc = B * B - 4.0 * c * c;
    disc = std::max(disc, 0.0);
    rstar = (B - std::sqrt(disc)) / (2.0 * c);
  } else if (c < -1e-15) {
    rstar = 0.0;  // minimizer lies behind a
  }
  rstar = std::clamp(rstar, 0.0, rb);
  auto q = hyp::scale(rstar, u);
  HPoint foot{hyp::mobius_add(a.x, q), p.model};
  HPoint pp{p.x, p.model};
  Projection out;
  out.foot = foot;
  out.dist = hyp_dist(pp, foot);
  double dtot = 2.0 * std::atanh(std::min(rb, 1.0 - 1e-16));
  out.s = dtot > 0 ? 2.0 * std::atanh(rstar) / dtot : 0.0;
  return out;
}

/// Geodesic spine over a set of input points: a tree whose vertices contain
/// every input point, with geodesic edges.
struct MarkedSpine {
  Model model = Model::Disk;
  std::vector<HPoint> vertices;
  std::vector<std::pair<int, int>> edges;
  std::set<int> marked;
  std::vector<int> input_map;  // input point index -> vertex index
  std::vector<bool> is_input;

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertices.size());
    for (auto [i, j] : edges) {
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
    return adj;
  }

  bool is_tree() const {
    if (vertices.empty()) return true;
    if (edges.size() + 1 != vertices.size()) return false;
    auto adj = adjacency();
    std::vector<bool> seen(vertices.size(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    size_t cnt = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = true;
          ++cnt;
          stack.push_back(w);
        }
    }
    return cnt == vertices.size();
  }
};

/// Hyperbolic angle between two edges at their shared vertex.
inline double vertex_angle(const MarkedSpine& spine, int v, std::pair<int, int> e1,
                           std::pair<int, int> e2) {
  auto other = [&](std::pair<int, int> e) {
    if (e.first == v) return e.second;
    if (e.second == v) return e.first;
    throw Error(ErrorKind::NotIncident, "edge not incident at vertex");
  };
  int a = other(e1), b = other(e2);
  auto va = hyp::mobius_add(hyp::neg(spine.vertices[v].x), spine.vertices[a].x);
  auto vb = hyp::mobius_add(hyp::neg(spine.vertices[v].x), spine.vertices[b].x);
  double na = hyp::norm(va), nb = hyp::norm(vb);
  if (na < 1e-15 || nb < 1e-15)
    throw Error(ErrorKind::DegenerateSegment, "zero-length edge at vertex");
  double c = hyp::dot(va, vb) / (na * nb);
  return std::acos(std::clamp(c, -1.0, 1.0));
}

namespace detail {

// Distance from p to the approximate convex hull of `verts`: the minimum over
// all pairwise geodesic segments. Also reports the nearest foot.
inline Projection hull_projection(const HPoint& p, const std::vector<HPoint>& verts) {
  Projection best;
  best.dist = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < verts.size(); ++i) {
    double d = hyp_dist(p, verts[i]);
    if (d < best.dist) best = Projection{verts[i], d, 0.0};
    for (size_t j = i + 1; j < verts.size(); ++j) {
      auto pr = project_segment(p, verts[i], verts[j]);
      if (pr.dist < best.dist) best = pr;
    }
  }
  return best;
}

// Relocate every non-input vertex to the weighted center of its neighbors
// (the point minimizing the sum of hyperbolic distances). Plain gradient
// descent; objective differences underflow long before the gradient does, so
// convergence is judged on the gradient alone. Input vertices never move.
inline void balance_branch_vertices(MarkedSpine& spine) {
  auto adj = spine.adjacency();
  for (int sweep = 0; sweep < 20000; ++sweep) {
    double worst = 0.0;
    for (size_t v = 0; v < spine.vertices.size(); ++v) {
      if (spine.is_input[v] || adj[v].empty()) continue;
      auto pos = spine.vertices[v].x;
      // Gradient of the distance sum, pulled back to the origin; the descent
      // direction is the sum of unit vectors toward the neighbors.
      std::array<double, 3> g{0, 0, 0};
      double dmin = std::numeric_limits<double>::infinity();
      for (int w : adj[v]) {
        auto q = hyp::mobius_add(hyp::neg(pos), spine.vertices[w].x);
        double n = hyp::norm(q);
        dmin = std::min(dmin, n);
        if (n > 1e-14) g = hyp::add(g, hyp::scale(1.0 / n, q));
      }
      double gn = hyp::norm(g);
      worst = std::max(worst, gn);
      if (gn < 1e-12) continue;
      double steplen = 0.25 * std::min({gn, 1.0, dmin});
      auto cand = hyp::mobius_add(pos, hyp::scale(steplen / gn, g));
      if (hyp::dot(cand, cand) < 1.0) spine.vertices[v].x = cand;
    }
    if (worst < 1e-12) break;
  }
}

}  // namespace detail

/// Inductive spine construction. Points are attached in order of increasing
/// distance to the current hull; a projection landing within attach_radius of
/// an existing vertex attaches there (Case 1), otherwise the nearest tree
/// point splits its edge and receives the new branch (Case 2). Branch
/// vertices are finally balanced to the local center of their neighbors.
inline MarkedSpine build_spine(const std::vector<HPoint>& points, double attach_radius) {
  if (points.empty()) throw Error(ErrorKind::DuplicatePoints, "build_spine needs >= 1 point");
  for (size_t i = 0; i < points.size(); ++i)
    for (size_t j = i + 1; j < points.size(); ++j) {
      check_same_model(points[i], points[j]);
      if (hyp::norm(hyp::sub(points[i].x, points[j].x)) < 1e-15)
        throw Error(ErrorKind::DuplicatePoints, "duplicate input points");
    }

  MarkedSpine spine;
  spine.model = points[0].model;
  spine.input_map.assign(points.size(), -1);

  auto add_vertex = [&](const HPoint& p, bool input) {
    spine.vertices.push_back(p);
    spine.is_input.push_back(input);
    return static_cast<int>(spine.vertices.size()) - 1;
  };

  spine.input_map[0] = add_vertex(points[0], true);

  std::vector<size_t> remaining;
  for (size_t i = 1; i < points.size(); ++i) remaining.push_back(i);

  while (!remaining.empty()) {
    // Next point: minimal distance to the current hull, ties by input index.
    size_t pick = 0;
    Projection pick_proj;
    double best = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < remaining.size(); ++k) {
      auto pr = detail::hull_projection(points[remaining[k]], spine.vertices);
      if (pr.dist < best - 1e-12) {
        best = pr.dist;
        pick = k;
        pick_proj = pr;
      }
    }
    size_t idx = remaining[pick];
    remaining.erase(remaining.begin() + pick);
    const HPoint& b = points[idx];
    int vb = add_vertex(b, true);
    spine.input_map[idx] = vb;

    // Case 1: the hull projection stays near an existing vertex.
    int near = -1;
    double near_d = attach_radius;
    for (size_t v = 0; v + 1 < spine.vertices.size(); ++v) {
      double d = hyp_dist(pick_proj.foot, spine.vertices[v]);
      if (d <= near_d) {
        near_d = d;
        near = static_cast<int>(v);
      }
    }
    if (near >= 0) {
      spine.edges.push_back({near, vb});
      continue;
    }

    // Case 2: split the tree edge nearest to the projection.
    int split_edge = -1;
    Projection split_proj;
    split_proj.dist = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < spine.edges.size(); ++e) {
      auto [i, j] = spine.edges[e];
      auto pr = project_segment(pick_proj.foot, spine.vertices[i], spine.vertices[j]);
      if (pr.dist < split_proj.dist) {
        split_proj = pr;
        split_edge = static_cast<int>(e);
      }
    }
    if (split_edge < 0) {
      // No edges yet: attach to the only other vertex.
      spine.edges.push_back({0, vb});
      continue;
    }
    auto [i, j] = spine.edges[split_edge];
    double d_i = hyp_dist(split_proj.foot, spine.vertices[i]);
    double d_j = hyp_dist(split_proj.foot, spine.vertices[j]);
    if (d_i < 1e-9 || d_j < 1e-9) {
      spine.edges.push_back({d_i < d_j ? i : j, vb});
      continue;
    }
    int va = add_vertex(split_proj.foot, false);
    spine.edges[split_edge] = {i, va};
    spine.edges.push_back({va, j});
    spine.edges.push_back({va, vb});
  }

  detail::balance_branch_vertices(spine);
  return spine;
}

}  // namespace qpcf
