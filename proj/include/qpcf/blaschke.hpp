#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "qpcf/angle.hpp"
#include "qpcf/hypgeom.hpp"
#include "qpcf/treedyn.hpp"

namespace qpcf {

using Complex = std::complex<double>;
using Poly = std::vector<Complex>;  // coefficients, lowest degree first

namespace poly {

inline Poly mul(const Poly& a, const Poly& b) {
  Poly c(a.size() + b.size() - 1, Complex(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
  return c;
}

inline Poly add(Poly a, const Poly& b) {
  if (b.size() > a.size()) a.resize(b.size(), Complex(0));
  for (size_t i = 0; i < b.size(); ++i) a[i] += b[i];
  return a;
}

inline Poly scale(const Poly& a, Complex s) {
  Poly c = a;
  for (auto& x : c) x *= s;
  return c;
}

inline Poly derivative(const Poly& a) {
  Poly d;
  for (size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * double(i));
  if (d.empty()) d.push_back(Complex(0));
  return d;
}

inline Complex eval(const Poly& a, Complex z) {
  Complex v(0);
  for (size_t i = a.size(); i-- > 0;) v = v * z + a[i];
  return v;
}

inline size_t degree(const Poly& a, double tol = 1e-13) {
  size_t d = a.size();
  while (d > 1 && std::abs(a[d - 1]) <= tol) --d;
  return d - 1;
}

/// Roots via the companion matrix, polished by a few Newton steps.
inline std::vector<Complex> roots(const Poly& a) {
  size_t deg = degree(a);
  if (deg == 0) return {};
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
  Complex lead = a[deg];
  for (size_t i = 0; i < deg; ++i) {
    comp(i, deg - 1) = -a[i] / lead;
    if (i > 0) comp(i, i - 1) = 1.0;
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::RootFindingFailed, "companion eigensolver failed");
  Poly da = derivative(a);
  std::vector<Complex> out;
  for (int i = 0; i < static_cast<int>(deg); ++i) {
    Complex r = solver.eigenvalues()(i);
    for (int it = 0; it < 4; ++it) {
      Complex d = eval(da, r);
      if (std::abs(d) < 1e-14) break;
      Complex step = eval(a, r) / d;
      if (std::abs(step) > 0.5) break;  // near-multiple root: keep the eigenvalue
      r -= step;
    }
    out.push_back(r);
  }
  std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  return out;
}

}  // namespace poly

/// z * prod (z - a_i)/(1 - conj(a_i) z), all |a_i| < 1. Fixes 0.
class BlaschkeProduct {
public:
  explicit BlaschkeProduct(std::vector<Complex> zeros = {}) : zeros_(std::move(zeros)) {
    for (const auto& a : zeros_)
      if (std::abs(a) >= 1.0 - 1e-12)
        throw Error(ErrorKind::OutsideDisk, "Blaschke zero on or outside the circle");
    num_ = {Complex(0), Complex(1)};  // z
    den_ = {Complex(1)};
    for (const auto& a : zeros_) {
      num_ = poly::mul(num_, {-a, Complex(1)});
      den_ = poly::mul(den_, {Complex(1), -std::conj(a)});
    }
  }

  const std::vector<Complex>& zeros() const { return zeros_; }
  int degree() const { return static_cast<int>(zeros_.size()) + 1; }

  Complex operator()(Complex z) const {
    if (std::abs(z) > 1.0 + 1e-12)
      throw Error(ErrorKind::OutsideDisk, "evaluation outside the closed disk");
    return poly::eval(num_, z) / poly::eval(den_, z);
  }

  /// d/du of arg f(e^{2 pi i u}) / (2 pi): the circle expansion factor.
  double circle_derivative(double u) const {
    Complex z = std::polar(1.0, 2 * M_PI * u);
    Complex fp = poly::eval(poly::derivative(num_), z) * poly::eval(den_, z) -
                 poly::eval(num_, z) * poly::eval(poly::derivative(den_), z);
    Complex f = poly::eval(num_, z) / poly::eval(den_, z);
    fp /= poly::eval(den_, z) * poly::eval(den_, z);
    return (z * fp / f).real();
  }

  /// Critical points in the open disk, with multiplicity; exactly degree-1.
  std::vector<Complex> critical_points() const {
    Poly w = poly::add(poly::mul(poly::derivative(num_), den_),
                       poly::scale(poly::mul(num_, poly::derivative(den_)), Complex(-1)));
    auto rts = poly::roots(w);
    std::vector<Complex> inside;
    for (const auto& r : rts)
      if (std::abs(r) < 1.0 - 1e-10) inside.push_back(r);
    // p_d collapses the Wronskian degree; the deficiency sits at z = 0.
    while (static_cast<int>(inside.size()) < degree() - 1) inside.insert(inside.begin(), Complex(0));
    if (static_cast<int>(inside.size()) != degree() - 1)
      throw Error(ErrorKind::RootFindingFailed,
                  "critical point count does not match the degree");
    return inside;
  }

  /// All solutions of f(z) = w in the closed disk, with multiplicity.
  std::vector<Complex> preimages(Complex w) const {
    Poly p = poly::add(num_, poly::scale(den_, -w));
    auto rts = poly::roots(p);
    // A proper map of degree d: exactly d preimages; the polynomial can drop
    // degree when w pairs with a reflected pole, not for |w| < 1.
    std::vector<Complex> out;
    for (const auto& r : rts)
      if (std::abs(r) <= 1.0 + 1e-9) out.push_back(r);
    if (static_cast<int>(out.size()) != degree())
      throw Error(ErrorKind::RootFindingFailed, "preimage count mismatch");
    return out;
  }

private:
  std::vector<Complex> zeros_;
  Poly num_, den_;
};

inline Complex bp_eval(const BlaschkeProduct& f, Complex z) { return f(z); }
inline std::vector<Complex> bp_critical_points(const BlaschkeProduct& f) {
  return f.critical_points();
}

/// Boundary conjugacy eta_f with eta(d t) = f(eta(t)), eta continuing the
/// identity marking of p_d. Holds the continued fixed point and the branch
/// arcs; immutable after construction, safe for concurrent reads.
class CircleMarking {
public:
  explicit CircleMarking(const BlaschkeProduct& f) : f_(f), d_(f.degree()) {
    if (d_ < 2) throw Error(ErrorKind::NotExpanding, "marking needs degree >= 2");
    check_expanding();
    continue_fixed_point();
    cut_points_ = circle_preimages(u0_);
    // The fixed point is its own preimage; rotate it to front and lift the
    // rest so the sequence increases (arcs may wrap past angle 1).
    size_t k = 0;
    for (size_t i = 0; i < cut_points_.size(); ++i)
      if (circle_diff(cut_points_[i], u0_) < circle_diff(cut_points_[k], u0_)) k = i;
    std::rotate(cut_points_.begin(), cut_points_.begin() + k, cut_points_.end());
    cut_points_[0] = u0_;
    for (size_t i = 1; i < cut_points_.size(); ++i)
      while (cut_points_[i] < cut_points_[i - 1]) cut_points_[i] += 1.0;
  }

  double fixed_point_angle() const { return u0_; }

  /// eta(t) as a unit complex number, refined through `depth` digits.
  Complex eval(const Angle& t, int depth) const {
    if (depth < 1 || depth > 4096)
      throw Error(ErrorKind::DepthExhausted, "marking depth out of range");
    std::vector<int> digits;
    Angle cur = t;
    BigInt d(d_);
    for (int k = 0; k < depth; ++k) {
      // floor(d * t) with exact arithmetic.
      BigRat scaled = cur.value() * BigRat(d);
      BigInt digit =
          boost::multiprecision::numerator(scaled) / boost::multiprecision::denominator(scaled);
      digits.push_back(digit.convert_to<int>());
      cur = cur.times(d);
      if (cur == Angle()) break;  // all-zero tail ends at the fixed point
    }
    double u = u0_;
    for (size_t k = digits.size(); k-- > 0;) u = branch_inverse(digits[k], u);
    return std::polar(1.0, 2 * M_PI * u);
  }

  /// Angle coordinate of eta(t); mostly for monotonicity checks.
  double eval_angle(const Angle& t, int depth) const {
    Complex z = eval(t, depth);
    double u = std::arg(z) / (2 * M_PI);
    return u - std::floor(u);
  }

private:
  void check_expanding() const {
    for (int i = 0; i < 4096; ++i) {
      double u = i / 4096.0;
      if (f_.circle_derivative(u) <= 1.0)
        throw Error(ErrorKind::NotExpanding, "circle derivative drops to 1 or below");
    }
  }

  static double circle_diff(double a, double b) {
    double d = a - b - std::floor(a - b);
    return std::min(d, 1.0 - d);
  }

  // Signed angular residual of f(e^{2 pi i u}) against the target angle w.
  double residual(double u, double w) const {
    Complex fu = f_(std::polar(1.0, 2 * M_PI * u));
    double a = std::arg(fu) / (2 * M_PI) - w;
    a -= std::round(a);
    return a;
  }

  void continue_fixed_point() {
    // Track the boundary fixed point from p_d (angle 0) along zeros scaled
    // by s in [0, 1]; Newton on arg f_s(e^{2 pi i u}) = u.
    double u = 0.0;
    const int steps = 64;
    for (int k = 1; k <= steps; ++k) {
      double s = double(k) / steps;
      std::vector<Complex> zs;
      for (const auto& a : f_.zeros()) zs.push_back(a * s);
      BlaschkeProduct fs(zs);
      for (int it = 0; it < 60; ++it) {
        Complex fu = fs(std::polar(1.0, 2 * M_PI * u));
        double r = std::arg(fu) / (2 * M_PI) - u;
        r -= std::round(r);
        double deriv = fs.circle_derivative(u) - 1.0;
        double step = r / deriv;
        u -= step;
        u -= std::floor(u);
        if (std::abs(step) < 1e-15) break;
      }
    }
    u0_ = u;
  }

  // All preimage angles of the circle point at angle w, by scanning for sign
  // changes of the wrapped residual and bisecting each bracket.
  std::vector<double> circle_preimages(double w) const {
    const int grid = 4096 * d_;
    std::vector<double> out;
    double prev = residual(0.0, w);
    for (int i = 1; i <= grid; ++i) {
      double u = double(i) / grid;
      double cur = residual(u, w);
      if (prev <= 0 && cur > 0 && cur - prev < 0.5) {
        double lo = double(i - 1) / grid, hi = u;
        for (int it = 0; it < 60; ++it) {
          double mid = 0.5 * (lo + hi);
          (residual(mid, w) <= 0 ? lo : hi) = mid;
        }
        out.push_back(0.5 * (lo + hi));
      }
      prev = cur;
    }
    if (static_cast<int>(out.size()) != d_)
      throw Error(ErrorKind::RootFindingFailed, "expected d circle preimages");
    return out;
  }

  // Inverse branch landing in the j-th arc cut by the fixed-point preimages.
  // Along the arc the lift of arg f rises exactly one unit starting at u0,
  // so the fractional offset from u0 is itself monotone 0 -> 1; bisect it.
  double branch_inverse(int j, double w) const {
    double lo = cut_points_[j];
    double hi = j + 1 < d_ ? cut_points_[j + 1] : cut_points_[0] + 1.0;
    double target = w - u0_;
    target -= std::floor(target);
    if (target < 1e-15) return lo;
    auto frac_from_fixed = [&](double u) {
      Complex fu = f_(std::polar(1.0, 2 * M_PI * u));
      double a = std::arg(fu) / (2 * M_PI) - u0_;
      return a - std::floor(a);
    };
    for (int it = 0; it < 70; ++it) {
      double mid = 0.5 * (lo + hi);
      double frac = frac_from_fixed(mid);
      // The arc endpoints both sit at offset 0 (mod 1); near hi the offset
      // wraps back to ~0 only in exact arithmetic, not mid-arc.
      (frac < target ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    return u - std::floor(u);
  }

  const BlaschkeProduct f_;
  int d_;
  double u0_ = 0.0;
  std::vector<double> cut_points_;
};

inline Complex marking_eval(const BlaschkeProduct& f, const Angle& t, int depth) {
  return CircleMarking(f).eval(t, depth);
}

/// A Blaschke product per scheme vertex; periodic vertices fix 0, aperiodic
/// ones are zeros-centered.
struct BlaschkeScheme {
  MappingScheme scheme;
  std::vector<BlaschkeProduct> maps;  // one per scheme vertex

  void validate() const {
    if (maps.size() != scheme.size())
      throw Error(ErrorKind::ParseError, "one Blaschke product per scheme vertex required");
    for (size_t s = 0; s < maps.size(); ++s) {
      if (BigInt(maps[s].degree()) != scheme.delta[s])
        throw Error(ErrorKind::ParseError,
                    "map degree differs from scheme delta at vertex " + std::to_string(s));
      if (!scheme.is_periodic(static_cast<int>(s))) {
        Complex sum(0);
        for (const auto& a : maps[s].zeros()) sum += a;
        if (std::abs(sum) > 1e-9)
          throw Error(ErrorKind::ParseError,
                      "aperiodic vertex map must be zeros-centered (zeros sum to 0)");
      }
    }
  }
};

struct SchemePoint {
  int vertex = 0;
  Complex z;
};

inline SchemePoint scheme_orbit(const BlaschkeScheme& fs, int s, Complex z, int k) {
  if (std::abs(z) >= 1.0)
    throw Error(ErrorKind::OutsideDisk, "orbit point outside the open disk");
  SchemePoint p{s, z};
  for (int i = 0; i < k; ++i) {
    p.z = fs.maps[p.vertex](p.z);
    p.vertex = fs.scheme.phi[p.vertex];
  }
  return p;
}

/// Marked point sets: {0} at periodic vertices, full preimages of the image
/// vertex's set at strictly pre-periodic ones.
inline std::vector<std::vector<Complex>> marked_points(const BlaschkeScheme& fs) {
  const size_t n = fs.scheme.size();
  std::vector<std::optional<std::vector<Complex>>> memo(n);
  std::function<const std::vector<Complex>&(int)> get = [&](int s) -> const std::vector<Complex>& {
    if (memo[s]) return *memo[s];
    if (fs.scheme.is_periodic(s)) {
      memo[s] = std::vector<Complex>{Complex(0)};
      return *memo[s];
    }
    memo[s] = std::vector<Complex>{};  // breaks accidental cycles in bad data
    std::vector<Complex> pts;
    for (const auto& w : get(fs.scheme.phi[s])) {
      auto pre = fs.maps[s].preimages(w);
      // Collapse multiplicities within 1e-8.
      for (const auto& p : pre) {
        bool seen = false;
        for (const auto& q : pts)
          if (std::abs(p - q) < 1e-8) seen = true;
        if (!seen) pts.push_back(p);
      }
    }
    memo[s] = std::move(pts);
    return *memo[s];
  };
  std::vector<std::vector<Complex>> out;
  for (size_t s = 0; s < n; ++s) out.push_back(get(static_cast<int>(s)));
  return out;
}

/// d_S: hyperbolic within one vertex disk, infinite across vertices.
inline double scheme_dist(const SchemePoint& a, const SchemePoint& b) {
  if (a.vertex != b.vertex) return std::numeric_limits<double>::infinity();
  return hyp_dist(HPoint::disk(a.z.real(), a.z.imag()), HPoint::disk(b.z.real(), b.z.imag()));
}

struct QpcfWitness {
  struct PerCritical {
    int vertex = 0;       // scheme vertex holding the critical point
    Complex point;
    int preperiod = 0;    // l_i
    int period = 1;       // q_i
    double gap = 0.0;     // measured d_S(F^l(c), F^{l+q}(c))
  };
  std::vector<PerCritical> criticals;
};

/// Lexicographically least (l, q) with gap <= K for every labeled critical
/// point, searched within the given bounds.
inline QpcfWitness quasi_pcf_witness(const BlaschkeScheme& fs, double K, int max_preperiod,
                                     int max_period) {
  fs.validate();
  QpcfWitness out;
  double best_fail = std::numeric_limits<double>::infinity();
  for (size_t s = 0; s < fs.scheme.size(); ++s) {
    for (const auto& c : fs.maps[s].critical_points()) {
      // Orbit of the critical point through the scheme.
      std::vector<SchemePoint> orbit{{static_cast<int>(s), c}};
      for (int k = 0; k < max_preperiod + 2 * max_period + 1; ++k)
        orbit.push_back(scheme_orbit(fs, orbit.back().vertex, orbit.back().z, 1));
      bool found = false;
      for (int l = 0; l <= max_preperiod && !found; ++l)
        for (int q = 1; q <= max_period && !found; ++q) {
          double gap = scheme_dist(orbit[l], orbit[l + q]);
          if (gap <= K) {
            out.criticals.push_back({static_cast<int>(s), c, l, q, gap});
            found = true;
          } else {
            best_fail = std::min(best_fail, gap);
          }
        }
      if (!found)
        throw Error(ErrorKind::NoWitnessWithinBounds,
                    "no (l, q) within bounds; minimal gap " + std::to_string(best_fail));
    }
  }
  return out;
}

/// Per-step witnesses along a degenerating sequence of schemes.
inline std::vector<QpcfWitness> quasi_pcf_witness_seq(
    const std::function<BlaschkeScheme(int)>& scheme_at, std::pair<int, int> n_range, double K,
    int max_preperiod, int max_period) {
  std::vector<QpcfWitness> out;
  for (int n = n_range.first; n <= n_range.second; ++n)
    out.push_back(quasi_pcf_witness(scheme_at(n), K, max_preperiod, max_period));
  return out;
}

/// Cluster/spine core shared by the Blaschke wrapper and synthetic tests:
/// per scheme vertex, a point set and where each point maps.
struct VertexPointData {
  std::vector<Complex> points;
  std::vector<int> image_vertex;     // scheme vertex of the image
  std::vector<Complex> image_point;
};

struct QitReport {
  double min_vertex_separation = std::numeric_limits<double>::infinity();
  double max_critical_distance = 0.0;       // to the vertex set
  double max_vertex_displacement = 0.0;     // d_S(F(phi(v)), phi(F(v)))
  double max_edge_displacement = 0.0;       // sampled along edges
  bool simplicial = true;
  std::vector<std::string> notes;
};

struct ExtractedForest {
  std::vector<MarkedSpine> spines;                  // per scheme vertex
  std::vector<std::vector<int>> cluster_of_point;   // per vertex: point -> cluster
  std::vector<std::vector<Complex>> representatives;
  // Induced vertex map: (scheme vertex, spine vertex) -> (scheme vertex, spine vertex).
  std::map<std::pair<int, int>, std::pair<int, int>> vertex_map;
  QitReport report;
};

namespace detail {

inline std::vector<int> single_linkage(const std::vector<Complex>& pts, double gap) {
  const size_t n = pts.size();
  std::vector<int> cluster(n);
  for (size_t i = 0; i < n; ++i) cluster[i] = static_cast<int>(i);
  std::function<int(int)> find = [&](int x) {
    while (cluster[x] != x) x = cluster[x] = cluster[cluster[x]];
    return x;
  };
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j) {
      double d = hyp_dist(HPoint::disk(pts[i].real(), pts[i].imag()),
                          HPoint::disk(pts[j].real(), pts[j].imag()));
      if (d <= gap) cluster[find(static_cast<int>(i))] = find(static_cast<int>(j));
    }
  std::map<int, int> relabel;
  std::vector<int> out(n);
  for (size_t i = 0; i < n; ++i) {
    int r = find(static_cast<int>(i));
    auto [it, fresh] = relabel.emplace(r, relabel.size());
    out[i] = it->second;
  }
  return out;
}

}  // namespace detail

/// Clustering + spine + induced map over explicit point data. When the
/// underlying dynamics is supplied, edge displacements are sampled with it.
inline ExtractedForest extract_tree_core(
    const std::vector<VertexPointData>& data, double cluster_gap, double attach_radius,
    const std::function<Complex(int, Complex)>& dynamics = nullptr) {
  ExtractedForest out;
  const size_t n = data.size();
  out.spines.resize(n);
  out.cluster_of_point.resize(n);
  out.representatives.resize(n);
  std::vector<std::vector<int>> rep_point_index(n);

  for (size_t s = 0; s < n; ++s) {
    if (data[s].points.empty()) continue;
    auto cl = detail::single_linkage(data[s].points, cluster_gap);
    out.cluster_of_point[s] = cl;
    int nclusters = 1 + *std::max_element(cl.begin(), cl.end());
    if (data[s].points.size() >= 2 && nclusters == 1) {
      double diam = 0.0;
      for (size_t i = 0; i < data[s].points.size(); ++i)
        for (size_t j = i + 1; j < data[s].points.size(); ++j)
          diam = std::max(diam, std::abs(data[s].points[i] - data[s].points[j]));
      if (diam > 1e-12)
        throw Error(ErrorKind::ClusterDegenerate,
                    "all points of vertex " + std::to_string(s) +
                        " fall in one cluster at this threshold");
    }
    // First point of each cluster is its representative.
    std::vector<Complex> reps(nclusters);
    std::vector<int> rep_idx(nclusters, -1);
    for (size_t i = 0; i < cl.size(); ++i)
      if (rep_idx[cl[i]] < 0) {
        rep_idx[cl[i]] = static_cast<int>(i);
        reps[cl[i]] = data[s].points[i];
      }
    out.representatives[s] = reps;
    rep_point_index[s] = rep_idx;
    std::vector<HPoint> hp;
    for (const auto& r : reps) hp.push_back(HPoint::disk(r.real(), r.imag()));
    out.spines[s] = build_spine(hp, attach_radius);
    for (int r = 0; r < nclusters; ++r) out.spines[s].marked.insert(out.spines[s].input_map[r]);
  }

  // Induced map: every spine vertex goes to the nearest vertex of the image
  // spine under the point dynamics.
  for (size_t s = 0; s < n; ++s) {
    if (data[s].points.empty()) continue;
    int target = data[s].image_vertex.empty() ? static_cast<int>(s) : data[s].image_vertex[0];
    const auto& tspine = out.spines[target];
    for (size_t v = 0; v < out.spines[s].vertices.size(); ++v) {
      // Image of the vertex position: representatives carry their recorded
      // image point; a branch vertex borrows the nearest rep's image.
      Complex img;
      bool have = false;
      for (size_t r = 0; r < out.representatives[s].size(); ++r)
        if (out.spines[s].input_map[r] == static_cast<int>(v)) {
          img = data[s].image_point[rep_point_index[s][r]];
          have = true;
          break;
        }
      if (!have) {
        double best = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < data[s].points.size(); ++i) {
          double d = std::abs(data[s].points[i] - Complex(out.spines[s].vertices[v].x[0],
                                                          out.spines[s].vertices[v].x[1]));
          if (d < best) {
            best = d;
            img = data[s].image_point[i];
          }
        }
      }
      // Nearest vertex of the target spine.
      int bestv = 0;
      double bestd = std::numeric_limits<double>::infinity();
      HPoint imgp = HPoint::disk(img.real(), img.imag());
      for (size_t w = 0; w < tspine.vertices.size(); ++w) {
        double d = hyp_dist(imgp, tspine.vertices[w]);
        if (d < bestd) {
          bestd = d;
          bestv = static_cast<int>(w);
        }
      }
      out.vertex_map[{static_cast<int>(s), static_cast<int>(v)}] = {target, bestv};
      out.report.max_vertex_displacement = std::max(out.report.max_vertex_displacement, bestd);
    }
  }

  // Report: vertex separation and simpliciality of the induced map.
  for (size_t s = 0; s < n; ++s) {
    const auto& sp = out.spines[s];
    for (size_t i = 0; i < sp.vertices.size(); ++i)
      for (size_t j = i + 1; j < sp.vertices.size(); ++j)
        out.report.min_vertex_separation =
            std::min(out.report.min_vertex_separation, hyp_dist(sp.vertices[i], sp.vertices[j]));
    for (auto [i, j] : sp.edges) {
      auto fi = out.vertex_map[{static_cast<int>(s), i}];
      auto fj = out.vertex_map[{static_cast<int>(s), j}];
      if (fi == fj) {
        out.report.simplicial = false;
        out.report.notes.push_back("edge collapses under the induced map");
        continue;
      }
      // Edge displacement: push samples through the dynamics and measure
      // against the geodesic joining the image vertices.
      if (dynamics) {
        const auto& tspine = out.spines[fi.first];
        int steps = 9;
        for (int k = 1; k < steps; ++k) {
          auto x = geodesic_point(sp.vertices[i], sp.vertices[j], double(k) / steps);
          Complex fx = dynamics(static_cast<int>(s), Complex(x.x[0], x.x[1]));
          auto pr = project_segment(HPoint::disk(fx.real(), fx.imag()),
                                    tspine.vertices[fi.second], tspine.vertices[fj.second]);
          out.report.max_edge_displacement =
              std::max(out.report.max_edge_displacement, pr.dist);
        }
      }
      auto adjacent = [&](const std::pair<int, int>& a, const std::pair<int, int>& b) {
        if (a.first != b.first) return false;
        for (auto [u, v] : out.spines[a.first].edges)
          if ((u == a.second && v == b.second) || (u == b.second && v == a.second)) return true;
        return false;
      };
      if (!adjacent(fi, fj)) {
        out.report.simplicial = false;
        out.report.notes.push_back("edge maps onto a path, not an edge");
      }
    }
  }
  return out;
}

/// Quasi-invariant forest extraction for a Blaschke scheme: marked points
/// plus critical orbit segments, clustered and spined per vertex.
inline ExtractedForest extract_tree(const BlaschkeScheme& fs, const QpcfWitness& witness,
                                    double cluster_gap) {
  fs.validate();
  auto marked = marked_points(fs);
  std::vector<VertexPointData> data(fs.scheme.size());
  auto push = [&](int vertex, Complex z) {
    for (const auto& p : data[vertex].points)
      if (std::abs(p - z) < 1e-10) return;
    data[vertex].points.push_back(z);
    auto img = scheme_orbit(fs, vertex, z, 1);
    data[vertex].image_vertex.push_back(img.vertex);
    data[vertex].image_point.push_back(img.z);
  };
  for (size_t s = 0; s < marked.size(); ++s)
    for (const auto& z : marked[s]) push(static_cast<int>(s), z);
  for (const auto& c : witness.criticals) {
    SchemePoint p{c.vertex, c.point};
    for (int k = 0; k < c.preperiod + c.period; ++k) {
      push(p.vertex, p.z);
      p = scheme_orbit(fs, p.vertex, p.z, 1);
    }
  }
  auto dynamics = [&fs](int vertex, Complex z) { return fs.maps[vertex](z); };
  auto out = extract_tree_core(data, cluster_gap, cluster_gap, dynamics);

  // Critically-approximating constant: distance of critical points to the
  // vertex set of their spine.
  for (size_t s = 0; s < fs.scheme.size(); ++s)
    for (const auto& c : fs.maps[s].critical_points()) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& v : out.spines[s].vertices)
        best = std::min(best, hyp_dist(HPoint::disk(c.real(), c.imag()), v));
      if (out.spines[s].vertices.empty()) best = 0.0;
      out.report.max_critical_distance = std::max(out.report.max_critical_distance, best);
    }
  return out;
}

}  // namespace qpcf
