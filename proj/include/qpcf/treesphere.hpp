#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qpcf/blaschke.hpp"

namespace qpcf {

/// A point of the Riemann sphere in one affine chart.
struct SpherePoint {
  Complex z;
  bool inf = false;

  static SpherePoint at(Complex z) { return {z, false}; }
  static SpherePoint infinity() { return {Complex(0), true}; }
};

inline double chordal_dist(const SpherePoint& a, const SpherePoint& b) {
  if (a.inf && b.inf) return 0.0;
  if (a.inf) return 2.0 / std::sqrt(1.0 + std::norm(b.z));
  if (b.inf) return 2.0 / std::sqrt(1.0 + std::norm(a.z));
  return 2.0 * std::abs(a.z - b.z) /
         (std::sqrt(1.0 + std::norm(a.z)) * std::sqrt(1.0 + std::norm(b.z)));
}

/// Rational map as numerator/denominator coefficients; evaluation swaps to
/// the 1/z chart when |z| > 1 to keep the numerics bounded.
struct RatMap {
  Poly num{Complex(0)};
  Poly den{Complex(1)};

  int degree() const {
    return static_cast<int>(std::max(poly::degree(num), poly::degree(den)));
  }

  SpherePoint eval(const SpherePoint& p) const {
    size_t dn = poly::degree(num), dd = poly::degree(den);
    if (p.inf) {
      if (dn > dd) return SpherePoint::infinity();
      if (dn < dd) return SpherePoint::at(Complex(0));
      return SpherePoint::at(num[dn] / den[dd]);
    }
    if (std::abs(p.z) <= 1.0) {
      Complex n = poly::eval(num, p.z), d = poly::eval(den, p.z);
      if (std::abs(d) < 1e-300) return SpherePoint::infinity();
      return SpherePoint::at(n / d);
    }
    // w = 1/z chart: f(z) = z^(m) (num~(w)/den~(w)) with reversed coefficients.
    Complex w = Complex(1.0) / p.z;
    size_t m = std::max(dn, dd);
    Poly rn(m + 1, Complex(0)), rd(m + 1, Complex(0));
    for (size_t i = 0; i <= dn; ++i) rn[m - i] = num[i];
    for (size_t i = 0; i <= dd; ++i) rd[m - i] = den[i];
    Complex n = poly::eval(rn, w), d = poly::eval(rd, w);
    if (std::abs(d) < 1e-300) return SpherePoint::infinity();
    return SpherePoint::at(n / d);
  }

  /// Finite critical points (roots of the Wronskian) plus the multiplicity
  /// at infinity, so that the total is 2 deg - 2.
  std::pair<std::vector<Complex>, int> critical_points() const {
    Poly w = poly::add(poly::mul(poly::derivative(num), den),
                       poly::scale(poly::mul(num, poly::derivative(den)), Complex(-1)));
    int total = 2 * degree() - 2;
    bool zero = true;
    for (const auto& c : w)
      if (std::abs(c) > 1e-13) zero = false;
    if (zero) return {{}, 0};  // constant map; caller reports malformed input
    auto finite = poly::roots(w);
    int at_inf = total - static_cast<int>(finite.size());
    if (at_inf < 0) at_inf = 0;
    return {finite, at_inf};
  }
};

/// Tree of Riemann spheres with a candidate rational map (F, R).
struct TreeOfSpheres {
  std::vector<std::pair<int, int>> edges;               // tree on vertex ids 0..n-1
  std::vector<int> f_vertex;                            // tree self-map
  std::vector<std::map<int, SpherePoint>> xi;           // vertex -> (neighbor -> marked point)
  std::vector<RatMap> maps;                             // R_a per vertex
  BigInt degree = 2;

  size_t vertex_count() const { return f_vertex.size(); }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count());
    for (auto [u, v] : edges) {
      adj[u].push_back(v);
      adj[v].push_back(u);
    }
    return adj;
  }

  /// Next vertex on the path from a to b.
  int step_toward(int a, int b) const {
    if (a == b) throw Error(ErrorKind::ParseError, "no direction from a vertex to itself");
    auto adj = adjacency();
    std::map<int, int> prev;
    std::vector<int> queue{a};
    prev[a] = a;
    for (size_t qi = 0; qi < queue.size() && !prev.count(b); ++qi)
      for (int w : adj[queue[qi]])
        if (!prev.count(w)) {
          prev[w] = queue[qi];
          queue.push_back(w);
        }
    if (!prev.count(b)) throw Error(ErrorKind::ParseError, "vertices not connected");
    int cur = b;
    while (prev[cur] != a) cur = prev[cur];
    return cur;
  }

  /// DF_a applied to the tangent direction a -> b.
  int tangent_image(int a, int b) const {
    int fa = f_vertex[a], fb = f_vertex[b];
    if (fa == fb)
      throw Error(ErrorKind::NotSimplicial, "edge collapses under F");
    return step_toward(fa, fb);
  }
};

struct SphereCheck {
  std::string name;
  bool pass = true;
  std::string detail;
};

struct SphereValidation {
  bool pass = true;
  std::vector<SphereCheck> checks;
  int free_critical_count = 0;

  void add(const std::string& name, bool ok, const std::string& detail = "") {
    checks.push_back({name, ok, detail});
    pass = pass && ok;
  }
};

/// Structural validation of (F, R): injectivity on edges, tangent
/// compatibility R_a(xi_a(v)) = xi_{F(a)}(DF_a v), critical accounting, and
/// singular-set invariance. Failures are report entries, not exceptions.
inline SphereValidation validate_tree_of_spheres(const TreeOfSpheres& ts, double tol) {
  SphereValidation out;
  const size_t n = ts.vertex_count();
  if (ts.maps.size() != n || ts.xi.size() != n)
    throw Error(ErrorKind::ParseError, "per-vertex fields have inconsistent sizes");

  // F injective on edges.
  bool inj = true;
  std::string inj_detail;
  for (auto [u, v] : ts.edges)
    if (ts.f_vertex[u] == ts.f_vertex[v]) {
      inj = false;
      inj_detail = "edge [" + std::to_string(u) + "," + std::to_string(v) + "] collapses";
    }
  out.add("tree map injective on edges", inj, inj_detail);

  // Tangent compatibility.
  bool compat = true;
  std::string compat_detail;
  auto adj = ts.adjacency();
  if (inj) {
    for (size_t a = 0; a < n; ++a)
      for (int b : adj[a]) {
        auto it = ts.xi[a].find(b);
        if (it == ts.xi[a].end()) {
          compat = false;
          compat_detail = "missing marking at " + std::to_string(a);
          continue;
        }
        SpherePoint lhs = ts.maps[a].eval(it->second);
        int db = ts.tangent_image(static_cast<int>(a), b);
        auto jt = ts.xi[ts.f_vertex[a]].find(db);
        if (jt == ts.xi[ts.f_vertex[a]].end()) {
          compat = false;
          compat_detail = "missing marking at image vertex";
          continue;
        }
        double err = chordal_dist(lhs, jt->second);
        if (err > tol) {
          compat = false;
          compat_detail = "tangent compatibility off by " + std::to_string(err) + " at vertex " +
                          std::to_string(a);
        }
      }
  }
  out.add("tangent compatibility", compat, compat_detail);

  // Singular set invariance R_a(Xi_a) within Xi_{F(a)} (diagnostic view of
  // the same identity).
  bool sinv = true;
  if (inj) {
    for (size_t a = 0; a < n; ++a)
      for (const auto& [b, x] : ts.xi[a]) {
        SpherePoint img = ts.maps[a].eval(x);
        double best = std::numeric_limits<double>::infinity();
        for (const auto& [c, y] : ts.xi[ts.f_vertex[a]])
          best = std::min(best, chordal_dist(img, y));
        if (best > tol) sinv = false;
      }
  }
  out.add("singular set invariance", sinv);

  // Critical points off the singular set must number exactly 2d - 2.
  int free_count = 0;
  bool crit_ok = true;
  std::string crit_detail;
  for (size_t a = 0; a < n; ++a) {
    auto [finite, at_inf] = ts.maps[a].critical_points();
    auto is_singular = [&](const SpherePoint& p) {
      for (const auto& [b, x] : ts.xi[a])
        if (chordal_dist(p, x) <= tol) return true;
      return false;
    };
    for (const auto& c : finite)
      if (!is_singular(SpherePoint::at(c))) ++free_count;
    if (at_inf > 0 && !is_singular(SpherePoint::infinity())) free_count += at_inf;
  }
  out.free_critical_count = free_count;
  BigInt expect = 2 * ts.degree - 2;
  if (BigInt(free_count) != expect) {
    crit_ok = false;
    crit_detail = "free critical count " + std::to_string(free_count) + ", expected " +
                  expect.str();
  }
  out.add("free critical count = 2d-2", crit_ok, crit_detail);
  return out;
}

/// Local degree of R_a at the marked point toward b, by winding number over
/// a small circle, cross-checked from the other endpoint.
inline int edge_local_degree(const TreeOfSpheres& ts, int a, int b) {
  auto winding_degree = [&](int va, int vb) {
    auto it = ts.xi[va].find(vb);
    if (it == ts.xi[va].end()) throw Error(ErrorKind::ParseError, "missing marking");
    SpherePoint x = it->second;
    const RatMap& R = ts.maps[va];
    // Work in the chart where x is finite; swap for x at infinity.
    RatMap Rc = R;
    Complex x0;
    if (x.inf) {
      // Conjugate by z -> 1/z on the source: coefficients reverse.
      size_t m = std::max(poly::degree(R.num), poly::degree(R.den));
      Poly rn(m + 1, Complex(0)), rd(m + 1, Complex(0));
      for (size_t i = 0; i <= poly::degree(R.num); ++i) rn[m - i] = R.num[i];
      for (size_t i = 0; i <= poly::degree(R.den); ++i) rd[m - i] = R.den[i];
      Rc.num = rn;
      Rc.den = rd;
      x0 = Complex(0);
    } else {
      x0 = x.z;
    }
    // Radius: half the distance to the other critical/singular points,
    // floored at 1e-6. Roots within 1e-4 of x0 count as x0 itself: the
    // companion solver smears a multiplicity-m root over ~eps^(1/m).
    double r = 0.1;
    auto [finite, at_inf] = Rc.critical_points();
    for (const auto& c : finite)
      if (std::abs(c - x0) > 1e-4) r = std::min(r, 0.5 * std::abs(c - x0));
    for (const auto& [c, y] : ts.xi[va]) {
      Complex yz = y.inf ? Complex(0) : y.z;  // after the chart swap above
      if (x.inf != y.inf) continue;
      if (std::abs(yz - x0) > 1e-4) r = std::min(r, 0.5 * std::abs(yz - x0));
    }
    r = std::max(r, 1e-6);
    SpherePoint target = Rc.eval(SpherePoint::at(x0));
    // Winding of R(x0 + r e^{i t}) - R(x0), in the chart where the target is
    // finite.
    bool swap_target = target.inf || std::abs(target.z) > 1.0;
    auto value = [&](double t) {
      SpherePoint v = Rc.eval(SpherePoint::at(x0 + std::polar(r, t)));
      Complex num;
      if (swap_target) {
        Complex vz = v.inf ? Complex(0) : Complex(1.0) / v.z;
        Complex tz = target.inf ? Complex(0) : Complex(1.0) / target.z;
        num = vz - tz;
      } else {
        if (v.inf) throw Error(ErrorKind::RadiusSelectionFailed, "pole on the probe circle");
        num = v.z - target.z;
      }
      return num;
    };
    const int samples = 4096;
    double total = 0.0;
    Complex prev = value(0.0);
    for (int k = 1; k <= samples; ++k) {
      Complex cur = value(2 * M_PI * k / samples);
      double dtheta = std::arg(cur / prev);
      if (!std::isfinite(dtheta) || std::abs(dtheta) > 2.5)
        throw Error(ErrorKind::RadiusSelectionFailed, "winding step too large");
      total += dtheta;
      prev = cur;
    }
    double w = total / (2 * M_PI);
    int wi = static_cast<int>(std::lround(w));
    if (std::abs(w - wi) > 0.1)
      throw Error(ErrorKind::RadiusSelectionFailed, "winding number not close to an integer");
    return std::abs(wi);
  };
  int dab = winding_degree(a, b);
  int dba = winding_degree(b, a);
  if (dab != dba)
    throw Error(ErrorKind::DegreeMismatch,
                "local degrees disagree: " + std::to_string(dab) + " vs " + std::to_string(dba));
  return dab;
}

}  // namespace qpcf
