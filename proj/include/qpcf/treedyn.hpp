#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "qpcf/angle.hpp"
#include "qpcf/exact.hpp"
#include "qpcf/lamination.hpp"

namespace qpcf {

/// Finite mapping scheme (|S|, Phi, delta).
struct MappingScheme {
  std::vector<int> phi;     // vertex -> vertex
  std::vector<BigInt> delta;  // vertex -> degree >= 1

  size_t size() const { return phi.size(); }

  bool is_periodic(int s) const {
    // s lies on a Phi-cycle iff some iterate returns to it.
    int slow = s, fast = s;
    do {
      slow = phi[slow];
      fast = phi[phi[fast]];
    } while (slow != fast);
    int cur = slow;
    do {
      if (cur == s) return true;
      cur = phi[cur];
    } while (cur != slow);
    return false;
  }
};

struct SchemeValidation {
  bool ok = true;
  BigInt degree = 0;
  std::vector<std::string> violations;
};

/// Checks minimality and hyperbolicity; reports deg(S) = 1 + sum(delta-1).
inline SchemeValidation validate_scheme(const MappingScheme& s) {
  SchemeValidation out;
  const size_t n = s.size();
  if (s.delta.size() != n) throw Error(ErrorKind::ParseError, "scheme field sizes differ");
  for (size_t i = 0; i < n; ++i) {
    if (s.phi[i] < 0 || s.phi[i] >= static_cast<int>(n))
      throw Error(ErrorKind::ParseError, "phi out of range");
    if (s.delta[i] < 1) throw Error(ErrorKind::ParseError, "delta must be >= 1");
  }
  out.degree = 1;
  for (const auto& d : s.delta) out.degree += d - 1;

  // Minimality: every degree-1 vertex is an iterated forward image of a
  // vertex of degree >= 2.
  std::set<int> reachable;
  for (size_t i = 0; i < n; ++i) {
    if (s.delta[i] < 2) continue;
    int cur = s.phi[static_cast<int>(i)];
    for (size_t k = 0; k <= n; ++k) {
      reachable.insert(cur);
      cur = s.phi[cur];
    }
  }
  for (size_t i = 0; i < n; ++i)
    if (s.delta[i] == 1 && !reachable.count(static_cast<int>(i))) {
      out.ok = false;
      out.violations.push_back("MinimalityViolated: vertex " + std::to_string(i));
    }

  // Hyperbolicity: every periodic cycle holds a vertex of degree >= 2.
  std::vector<bool> seen(n, false);
  for (size_t i = 0; i < n; ++i) {
    if (!s.is_periodic(static_cast<int>(i)) || seen[i]) continue;
    std::vector<int> cycle;
    int cur = static_cast<int>(i);
    do {
      cycle.push_back(cur);
      seen[cur] = true;
      cur = s.phi[cur];
    } while (cur != static_cast<int>(i));
    bool has_critical = false;
    for (int v : cycle)
      if (s.delta[v] >= 2) has_critical = true;
    if (!has_critical) {
      out.ok = false;
      std::string c = "HyperbolicityViolated: cycle";
      for (int v : cycle) c += " " + std::to_string(v);
      out.violations.push_back(c);
    }
  }
  return out;
}

/// Marked ribbon forest with a simplicial self-map. Vertices are global
/// indices; each tree lists its vertices: tree t maps into tree
/// `tree_image[t]`. The ribbon gives the counterclockwise cyclic order of
/// incident edges at every vertex.
struct RibbonTreeMap {
  struct Anchor {
    int edge = -1;
    int side = 0;  // 0: as stored (u->v), 1: reversed
  };

  std::vector<std::vector<int>> tree_vertices;
  std::vector<std::pair<int, int>> edges;            // global vertex pairs
  std::vector<std::vector<int>> ribbon;              // vertex -> incident edges, ccw
  std::set<int> marked;
  std::vector<int> f_vertex;                         // vertex -> vertex
  std::vector<BigInt> delta_v;                       // local vertex degrees
  std::vector<BigInt> delta_e;                       // edge degrees
  std::vector<Anchor> anchors;                       // one per tree

  size_t vertex_count() const { return f_vertex.size(); }
  size_t edge_count() const { return edges.size(); }

  int tree_of_vertex(int v) const {
    for (size_t t = 0; t < tree_vertices.size(); ++t)
      for (int w : tree_vertices[t])
        if (w == v) return static_cast<int>(t);
    throw Error(ErrorKind::ParseError, "vertex in no tree");
  }

  std::vector<std::vector<int>> adjacency() const {
    std::vector<std::vector<int>> adj(vertex_count());
    for (size_t e = 0; e < edges.size(); ++e) {
      adj[edges[e].first].push_back(static_cast<int>(e));
      adj[edges[e].second].push_back(static_cast<int>(e));
    }
    return adj;
  }

  int edge_between(int u, int v) const {
    for (size_t e = 0; e < edges.size(); ++e)
      if ((edges[e].first == u && edges[e].second == v) ||
          (edges[e].first == v && edges[e].second == u))
        return static_cast<int>(e);
    return -1;
  }

  int edge_other(int e, int v) const {
    if (edges[e].first == v) return edges[e].second;
    if (edges[e].second == v) return edges[e].first;
    throw Error(ErrorKind::NotIncident, "edge not incident");
  }

  /// Vertex path from a to b inside one tree component.
  std::vector<int> vertex_path(int a, int b) const {
    auto adj = adjacency();
    std::map<int, int> prev;
    std::vector<int> queue{a};
    prev[a] = a;
    for (size_t qi = 0; qi < queue.size() && !prev.count(b); ++qi) {
      int v = queue[qi];
      for (int e : adj[v]) {
        int w = edge_other(e, v);
        if (!prev.count(w)) {
          prev[w] = v;
          queue.push_back(w);
        }
      }
    }
    if (!prev.count(b))
      throw Error(ErrorKind::ParseError, "vertices in different components");
    std::vector<int> path{b};
    while (path.back() != a) path.push_back(prev[path.back()]);
    std::reverse(path.begin(), path.end());
    return path;
  }

  /// Edge path covered by the image of edge e (from F(tail) to F(head)).
  std::vector<int> image_edge_path(int e) const {
    int fu = f_vertex[edges[e].first];
    int fv = f_vertex[edges[e].second];
    if (fu == fv)
      throw Error(ErrorKind::NotSimplicial,
                  "edge " + std::to_string(e) + " collapses: F(a) = F(b)");
    auto path = vertex_path(fu, fv);
    std::vector<int> out;
    for (size_t i = 0; i + 1 < path.size(); ++i) out.push_back(edge_between(path[i], path[i + 1]));
    return out;
  }

  bool edge_simplicial(int e) const { return image_edge_path(e).size() == 1; }

  /// Degree of the tree component (from the local vertex degrees).
  BigInt tree_degree(int t) const {
    BigInt d(1);
    for (int v : tree_vertices[t]) d += delta_v[v] - 1;
    return d;
  }

  int tree_image(int t) const {
    if (tree_vertices[t].empty()) throw Error(ErrorKind::ParseError, "empty tree");
    return tree_of_vertex(f_vertex[tree_vertices[t][0]]);
  }
};

struct SubdivisionReport {
  bool fully_simplicial = true;
  std::vector<int> added_vertices;
  std::vector<int> remaining_path_edges;  // periodic multi-image edges stay
};

/// Subdivides strictly pre-periodic edges whose images are multi-edge paths
/// until every such edge maps to a single edge. Periodic path edges cannot
/// be repaired this way and are reported instead.
inline SubdivisionReport subdivide_preperiodic(RibbonTreeMap& tm) {
  SubdivisionReport report;
  auto edge_periodic = [&](int e) {
    // e is periodic iff it is reachable from itself in the relation
    // e -> edges of its image path.
    std::set<int> frontier{e};
    for (size_t step = 0; step <= tm.edge_count(); ++step) {
      std::set<int> next;
      for (int f : frontier)
        for (int g : tm.image_edge_path(f)) next.insert(g);
      if (next.count(e)) return true;
      if (next == frontier) break;
      frontier = std::move(next);
    }
    return false;
  };
  for (int round = 0; round < 1000; ++round) {
    int pick = -1;
    std::vector<int> path;
    for (size_t e = 0; e < tm.edge_count(); ++e) {
      auto p = tm.image_edge_path(static_cast<int>(e));
      if (p.size() <= 1) continue;
      if (edge_periodic(static_cast<int>(e))) continue;
      pick = static_cast<int>(e);
      path = p;
      break;
    }
    if (pick < 0) break;
    // Subdivide edge `pick` into path.size() pieces; the new vertices map to
    // the interior vertices of the image path.
    auto [u, v] = tm.edges[pick];
    std::vector<int> img_verts{tm.f_vertex[u]};
    for (int pe : path) img_verts.push_back(tm.edge_other(pe, img_verts.back()));
    int tree = tm.tree_of_vertex(u);
    std::vector<int> chain_vertices{u};
    for (size_t i = 1; i < img_verts.size() - 1; ++i) {
      int m = static_cast<int>(tm.f_vertex.size());
      tm.f_vertex.push_back(img_verts[i]);
      tm.delta_v.push_back(BigInt(1));
      tm.ribbon.push_back({});
      tm.tree_vertices[tree].push_back(m);
      report.added_vertices.push_back(m);
      chain_vertices.push_back(m);
    }
    chain_vertices.push_back(v);
    // First piece reuses the slot of the original edge (anchors stay valid).
    BigInt de = tm.delta_e[pick];
    tm.edges[pick] = {chain_vertices[0], chain_vertices[1]};
    std::vector<int> piece_edges{pick};
    for (size_t i = 1; i + 1 < chain_vertices.size(); ++i) {
      piece_edges.push_back(static_cast<int>(tm.edges.size()));
      tm.edges.push_back({chain_vertices[i], chain_vertices[i + 1]});
      tm.delta_e.push_back(de);
    }
    // Ribbon: interior vertices see the two pieces; v's slot for `pick` now
    // refers to the last piece.
    for (size_t i = 1; i + 1 < chain_vertices.size(); ++i)
      tm.ribbon[chain_vertices[i]] = {piece_edges[i - 1], piece_edges[i]};
    for (auto& e2 : tm.ribbon[v])
      if (e2 == pick) e2 = piece_edges.back();
  }
  for (size_t e = 0; e < tm.edge_count(); ++e)
    if (tm.image_edge_path(static_cast<int>(e)).size() > 1) {
      report.fully_simplicial = false;
      report.remaining_path_edges.push_back(static_cast<int>(e));
    }
  return report;
}

struct EdgeMatrices {
  RatMat markov;   // 0/1
  RatMat degree;   // diagonal
  std::vector<int> edge_order;
};

/// M_ij = 1 iff E_i lies on the image path of E_j; D = diag(delta(E)).
inline EdgeMatrices markov_degree_matrices(const RibbonTreeMap& tm) {
  const size_t k = tm.edge_count();
  EdgeMatrices out;
  out.markov.assign(k, RatVec(k, BigRat(0)));
  out.degree.assign(k, RatVec(k, BigRat(0)));
  for (size_t j = 0; j < k; ++j) {
    out.degree[j][j] = BigRat(tm.delta_e[j]);
    for (int i : tm.image_edge_path(static_cast<int>(j))) out.markov[i][j] = 1;
    out.edge_order.push_back(static_cast<int>(j));
  }
  return out;
}

/// Exact solve of M v = D v over the nonnegative orthant; the largest entry
/// is normalized to 1. Returns nullopt when only v = 0 works.
inline std::optional<RatVec> solve_eigen_MD(const EdgeMatrices& em) {
  const size_t n = em.markov.size();
  RatMat A(n, RatVec(n, BigRat(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) A[i][j] = em.markov[i][j] - em.degree[i][j];
  auto x = exact::nonnegative_kernel_point(A);
  if (!x) return std::nullopt;
  BigRat mx(0);
  for (const auto& v : *x) mx = std::max(mx, v);
  if (mx == 0) return std::nullopt;
  for (auto& v : *x) v /= mx;
  return x;
}

/// Perron root of a nonnegative matrix to ~1e-9: repeated squaring of
/// A/s + I with max-normalization, then a Collatz-Wielandt ratio.
inline double spectral_radius(const std::vector<std::vector<double>>& a) {
  const size_t n = a.size();
  if (n == 0) return 0.0;
  double mx = 0.0;
  for (const auto& row : a) {
    if (row.size() != n) throw Error(ErrorKind::DimensionMismatch, "matrix not square");
    for (double v : row) {
      if (v < 0) throw Error(ErrorKind::ParseError, "matrix entry negative");
      mx = std::max(mx, v);
    }
  }
  if (mx == 0.0) return 0.0;
  const double s = mx;
  std::vector<std::vector<double>> b(n, std::vector<double>(n, 0.0));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) b[i][j] = a[i][j] / s;
    b[i][i] += 1.0;
  }
  for (int step = 0; step < 64; ++step) {
    std::vector<std::vector<double>> c(n, std::vector<double>(n, 0.0));
    double big = 0.0;
    for (size_t i = 0; i < n; ++i)
      for (size_t l = 0; l < n; ++l) {
        double bil = b[i][l];
        if (bil == 0.0) continue;
        for (size_t j = 0; j < n; ++j) c[i][j] += bil * b[l][j];
      }
    for (const auto& row : c)
      for (double v : row) big = std::max(big, v);
    for (auto& row : c)
      for (double& v : row) v /= big;
    b = std::move(c);
  }
  std::vector<double> y(n, 0.0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) y[i] += b[i][j];
  double ratio = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double by = 0.0;
    for (size_t j = 0; j < n; ++j) by += (a[i][j] / s) * y[j] + (i == j ? y[j] : 0.0);
    if (y[i] > 0) ratio = std::max(ratio, by / y[i]);
  }
  return s * (ratio - 1.0);
}

inline std::vector<std::vector<double>> to_double(const RatMat& m) {
  std::vector<std::vector<double>> out(m.size());
  for (size_t i = 0; i < m.size(); ++i)
    for (const auto& v : m[i]) out[i].push_back(v.convert_to<double>());
  return out;
}

/// Curve system covering data: per curve, its preimage components with the
/// isotopy class they represent (or none) and the covering degree.
struct CurveCover {
  struct Component {
    int isotopic_to = -1;  // index into curves, or -1
    BigInt degree = 1;
  };
  std::vector<std::vector<Component>> curves;  // curves[tau] = components over tau
};

struct ThurstonResult {
  RatMat matrix;
  double lambda = 0.0;
  bool obstructed = false;
  bool exact_confirmed = false;
};

/// A_{sigma,tau} = sum over components of f^{-1}(tau) isotopic to sigma of
/// 1/deg; obstructed iff the spectral radius reaches 1 (exact on rationals).
inline ThurstonResult thurston_matrix(const CurveCover& cover) {
  const size_t n = cover.curves.size();
  ThurstonResult out;
  out.matrix.assign(n, RatVec(n, BigRat(0)));
  for (size_t tau = 0; tau < n; ++tau)
    for (const auto& comp : cover.curves[tau]) {
      if (comp.degree < 1) throw Error(ErrorKind::ParseError, "covering degree must be >= 1");
      if (comp.isotopic_to < 0) continue;
      if (comp.isotopic_to >= static_cast<int>(n))
        throw Error(ErrorKind::ParseError, "isotopy tag out of range");
      out.matrix[comp.isotopic_to][tau] += BigRat(BigInt(1), comp.degree);
    }
  out.lambda = spectral_radius(to_double(out.matrix));
  out.obstructed = out.lambda >= 1.0 - 1e-9;
  bool exact = exact::spectral_radius_at_least_one(out.matrix);
  out.exact_confirmed = true;
  out.obstructed = exact;  // exact arithmetic wins at the boundary
  return out;
}

/// Entrywise A >= D^{-1} M.
inline bool compare_bound(const RatMat& a, const EdgeMatrices& em) {
  const size_t n = em.markov.size();
  if (a.size() != n) throw Error(ErrorKind::DimensionMismatch, "matrix sizes differ");
  for (size_t i = 0; i < n; ++i) {
    if (a[i].size() != n) throw Error(ErrorKind::DimensionMismatch, "matrix not square");
    for (size_t j = 0; j < n; ++j)
      if (a[i][j] < em.markov[i][j] / em.degree[i][i]) return false;
  }
  return true;
}

struct ReducedTree {
  RibbonTreeMap tree;                 // reduced forest (single component here)
  std::vector<std::vector<int>> reduced_edges;  // constituent original edges
  EdgeMatrices matrices;
  std::map<int, int> vertex_map;      // original vertex -> reduced index
};

/// Smallest connected subtree containing `keep`; pass-through vertices are
/// retained only at branch points of the hull (or when marked/kept).
inline ReducedTree convex_hull_subtree(const RibbonTreeMap& tm, const std::set<int>& keep) {
  if (keep.empty()) throw Error(ErrorKind::EmptyKeep, "keep set empty");
  // Union of vertex paths between all pairs of kept vertices.
  std::set<int> hull_edges;
  std::vector<int> ks(keep.begin(), keep.end());
  for (size_t i = 0; i < ks.size(); ++i)
    for (size_t j = i + 1; j < ks.size(); ++j) {
      auto path = tm.vertex_path(ks[i], ks[j]);
      for (size_t p = 0; p + 1 < path.size(); ++p)
        hull_edges.insert(tm.edge_between(path[p], path[p + 1]));
    }

  // Hull vertex valences.
  std::map<int, int> valence;
  for (int e : hull_edges) {
    valence[tm.edges[e].first]++;
    valence[tm.edges[e].second]++;
  }
  auto is_node = [&](int v) {
    return keep.count(v) > 0 || valence[v] >= 3;
  };

  // Reduced edges: maximal paths between nodes through valence-2 vertices.
  ReducedTree out;
  std::map<int, int> vmap;  // original vertex -> reduced index
  auto reduced_vertex = [&](int v) {
    auto it = vmap.find(v);
    if (it != vmap.end()) return it->second;
    int idx = static_cast<int>(out.tree.f_vertex.size());
    vmap.emplace(v, idx);
    out.tree.f_vertex.push_back(-1);
    out.tree.delta_v.push_back(tm.delta_v[v]);
    if (tm.marked.count(v)) out.tree.marked.insert(idx);
    return idx;
  };

  std::set<std::pair<int, int>> walked;  // directed original half-edges used
  for (int e : hull_edges) {
    for (int dir = 0; dir < 2; ++dir) {
      int u = dir == 0 ? tm.edges[e].first : tm.edges[e].second;
      int w = tm.edge_other(e, u);
      if (!is_node(u) || walked.count({u, w})) continue;
      // Walk from node u through valence-2 vertices to the next node.
      std::vector<int> chain{e};
      std::vector<int> verts{u, w};
      int cur = w;
      while (!is_node(cur)) {
        int next_edge = -1;
        for (int e2 : hull_edges) {
          if (e2 == chain.back()) continue;
          if (tm.edges[e2].first == cur || tm.edges[e2].second == cur) {
            next_edge = e2;
            break;
          }
        }
        if (next_edge < 0) break;  // dangling: cur becomes an endpoint
        chain.push_back(next_edge);
        cur = tm.edge_other(next_edge, cur);
        verts.push_back(cur);
      }
      walked.insert({u, w});
      walked.insert({verts[verts.size() - 1], verts[verts.size() - 2]});
      int ru = reduced_vertex(u);
      int rv = reduced_vertex(cur);
      // Uniform degree along the chain is required for a reduced degree.
      BigInt d = tm.delta_e[chain[0]];
      for (int ce : chain)
        if (tm.delta_e[ce] != d)
          throw Error(ErrorKind::DegreeMismatch, "mixed edge degrees along reduced edge");
      out.tree.edges.push_back({ru, rv});
      out.tree.delta_e.push_back(d);
      out.reduced_edges.push_back(chain);
    }
  }

  // Map: defined when F carries kept structure into the hull.
  for (auto& [orig, idx] : vmap) {
    int img = tm.f_vertex[orig];
    auto it = vmap.find(img);
    out.tree.f_vertex[idx] = it == vmap.end() ? -1 : it->second;
  }
  out.tree.tree_vertices.push_back({});
  for (auto& [orig, idx] : vmap) out.tree.tree_vertices[0].push_back(idx);
  out.vertex_map = vmap;

  // Reduced Markov/degree matrices via image paths of the original chains,
  // expressed in reduced edges.
  const size_t k = out.reduced_edges.size();
  out.matrices.markov.assign(k, RatVec(k, BigRat(0)));
  out.matrices.degree.assign(k, RatVec(k, BigRat(0)));
  for (size_t j = 0; j < k; ++j) {
    out.matrices.degree[j][j] = BigRat(out.tree.delta_e[j]);
    out.matrices.edge_order.push_back(static_cast<int>(j));
    // Image of reduced edge j: original path from F(tail) to F(head).
    int u = -1, v = -1;
    for (auto& [orig, idx] : vmap) {
      if (idx == out.tree.edges[j].first) u = orig;
      if (idx == out.tree.edges[j].second) v = orig;
    }
    int fu = tm.f_vertex[u], fv = tm.f_vertex[v];
    auto path = tm.vertex_path(fu, fv);
    std::set<int> img_edges;
    for (size_t p = 0; p + 1 < path.size(); ++p)
      img_edges.insert(tm.edge_between(path[p], path[p + 1]));
    for (size_t i = 0; i < k; ++i) {
      bool all = true;
      for (int ce : out.reduced_edges[i])
        if (!img_edges.count(ce)) all = false;
      if (all) out.matrices.markov[i][j] = 1;
    }
  }
  return out;
}

}  // namespace qpcf
