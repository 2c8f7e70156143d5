#pragma once

// Landing angles for ribbon tree maps: each side of each edge receives an
// angle in Q/Z so that multiplication by the tree degree intertwines the
// side map, the circular order matches the boundary circuit, and the anchor
// corner carries angle 0.

#include <functional>
#include <map>
#include <numeric>
#include <vector>

#include "qpcf/treedyn.hpp"

namespace qpcf {

namespace detail {

// A side of an edge, encoded 2*edge + dir; dir 0 traverses the edge as
// stored, dir 1 reversed.
struct ArcView {
  const RibbonTreeMap* tm;
  int tail(int arc) const {
    auto [u, v] = tm->edges[arc / 2];
    return arc % 2 == 0 ? u : v;
  }
  int head(int arc) const {
    auto [u, v] = tm->edges[arc / 2];
    return arc % 2 == 0 ? v : u;
  }
  int reverse(int arc) const { return arc ^ 1; }
  int make(int edge, int dir) const { return 2 * edge + dir; }
};

// Boundary circuit rule: after arriving at v along e, leave along the
// ribbon-successor of e at v.
inline int circuit_next(const RibbonTreeMap& tm, const ArcView& av, int arc) {
  int v = av.head(arc);
  int e = arc / 2;
  const auto& order = tm.ribbon[v];
  auto it = std::find(order.begin(), order.end(), e);
  if (it == order.end())
    throw Error(ErrorKind::ParseError, "ribbon at vertex misses an incident edge");
  int e2 = order[(static_cast<size_t>(it - order.begin()) + 1) % order.size()];
  int w = tm.edge_other(e2, v);
  int dir = tm.edges[e2].first == v ? 0 : 1;
  (void)w;
  return av.make(e2, dir);
}

}  // namespace detail

struct DualLamination {
  std::vector<std::vector<Leaf>> tree_leaves;   // per tree
  std::vector<BigInt> tree_degree;              // per tree
  std::map<int, Angle> side_angle;              // arc id -> angle
  // Critical cut chords per tree: the portrait that resolves pullbacks.
  std::vector<std::vector<CriticalPortrait::Chord>> tree_portrait;

  /// The single-tree case as a Lamination carrying its derived portrait.
  Lamination lamination(int t = 0) const {
    if (tree_degree[t] < 2)
      throw Error(ErrorKind::ItineraryInconsistent, "tree degree < 2 has no lamination");
    Lamination out(tree_degree[t]);
    for (const auto& l : tree_leaves[t]) out.insert(l, 0);
    if (BigInt(tree_portrait[t].size()) == tree_degree[t] - 1)
      out.set_portrait(CriticalPortrait(tree_portrait[t], tree_degree[t]));
    return out;
  }
};

/// Computes the finite dual lamination of a simplicial marked ribbon forest.
inline DualLamination dual_lamination(const RibbonTreeMap& tm) {
  detail::ArcView av{&tm};
  const size_t ntree = tm.tree_vertices.size();

  // Boundary circuits, anchored.
  std::vector<std::vector<int>> circuit(ntree);
  std::vector<int> tree_of_edge(tm.edge_count(), -1);
  for (size_t t = 0; t < ntree; ++t) {
    std::set<int> tv(tm.tree_vertices[t].begin(), tm.tree_vertices[t].end());
    std::vector<int> tree_edges;
    for (size_t e = 0; e < tm.edge_count(); ++e)
      if (tv.count(tm.edges[e].first)) {
        tree_edges.push_back(static_cast<int>(e));
        tree_of_edge[e] = static_cast<int>(t);
      }
    if (tree_edges.empty()) continue;
    const auto& anchor = tm.anchors[t];
    if (anchor.edge < 0 || tree_of_edge[anchor.edge] != static_cast<int>(t))
      throw Error(ErrorKind::AnchorUnreachable, "anchor edge not in its tree");
    int arc0 = av.make(anchor.edge, anchor.side);
    std::vector<int> circ{arc0};
    int cur = detail::circuit_next(tm, av, arc0);
    while (cur != arc0) {
      circ.push_back(cur);
      if (circ.size() > 2 * tm.edge_count() + 2)
        throw Error(ErrorKind::ItineraryInconsistent, "boundary circuit does not close");
      cur = detail::circuit_next(tm, av, cur);
    }
    if (circ.size() != 2 * tree_edges.size())
      throw Error(ErrorKind::ItineraryInconsistent, "circuit misses sides (tree not connected?)");
    circuit[t] = std::move(circ);
  }

  // Arc images under F.
  std::map<int, int> arc_image;
  for (size_t t = 0; t < ntree; ++t)
    for (int arc : circuit[t]) {
      int fu = tm.f_vertex[av.tail(arc)];
      int fv = tm.f_vertex[av.head(arc)];
      int e = tm.edge_between(fu, fv);
      if (e < 0)
        throw Error(ErrorKind::NotSimplicial,
                    "edge image is not a single edge; subdivide first");
      arc_image[arc] = av.make(e, tm.edges[e].first == fu ? 0 : 1);
    }

  // Positions within circuits and minimal forward jumps at corners.
  std::map<int, int> pos;
  for (size_t t = 0; t < ntree; ++t)
    for (size_t i = 0; i < circuit[t].size(); ++i) pos[circuit[t][i]] = static_cast<int>(i);

  struct Corner {
    int tree;
    int index;      // corner between circuit[i] and circuit[i+1 mod N]
    int vertex;
    long min_jump;
    bool critical;  // vertex of local degree >= 2
  };
  std::vector<Corner> corners;
  std::vector<long> deficit(ntree, 0);
  std::vector<long> degree_of_tree(ntree, 1);
  for (size_t t = 0; t < ntree; ++t) {
    degree_of_tree[t] = tm.tree_degree(static_cast<int>(t)).convert_to<long>();
    if (circuit[t].empty()) continue;
    int u = tm.tree_image(static_cast<int>(t));
    if (circuit[u].empty())
      throw Error(ErrorKind::ItineraryInconsistent, "tree maps onto an edgeless tree");
    const long M = static_cast<long>(circuit[u].size());
    long total = 0;
    const auto& circ = circuit[t];
    for (size_t i = 0; i < circ.size(); ++i) {
      int a = circ[i], b = circ[(i + 1) % circ.size()];
      long pa = pos[arc_image[a]], pb = pos[arc_image[b]];
      long jump = ((pb - pa) % M + M) % M;
      if (jump == 0)
        throw Error(ErrorKind::ItineraryInconsistent,
                    "two sides share an image side; F is not injective on edges");
      int v = av.head(a);
      corners.push_back({static_cast<int>(t), static_cast<int>(i), v, jump,
                         tm.delta_v[v] >= 2});
      total += jump;
    }
    if (total % M != 0)
      throw Error(ErrorKind::ItineraryInconsistent, "corner jumps do not close up");
    deficit[t] = degree_of_tree[t] - total / M;
    if (deficit[t] < 0)
      throw Error(ErrorKind::ItineraryInconsistent,
                  "circuit winds more than the tree degree allows");
  }

  // Distribute each tree's deficit over its critical corners; try all
  // distributions and keep the unique one passing validation.
  std::vector<std::vector<size_t>> tree_critical(ntree);
  for (size_t c = 0; c < corners.size(); ++c)
    if (corners[c].critical) tree_critical[corners[c].tree].push_back(c);
  for (size_t t = 0; t < ntree; ++t)
    if (deficit[t] > 0 && tree_critical[t].empty())
      throw Error(ErrorKind::ItineraryInconsistent,
                  "winding deficit with no critical vertex to absorb it");

  std::vector<std::vector<std::vector<long>>> per_tree_options(ntree);
  for (size_t t = 0; t < ntree; ++t) {
    std::vector<std::vector<long>> opts;
    std::vector<long> cur(tree_critical[t].size(), 0);
    std::function<void(size_t, long)> rec = [&](size_t i, long left) {
      if (i == cur.size()) {
        if (left == 0) opts.push_back(cur);
        return;
      }
      for (long x = 0; x <= left; ++x) {
        cur[i] = x;
        if (i + 1 == cur.size() && left - x != 0) continue;
        rec(i + 1, left - x);
      }
    };
    if (tree_critical[t].empty())
      opts.push_back({});
    else
      rec(0, deficit[t]);
    per_tree_options[t] = std::move(opts);
  }

  long combos = 1;
  for (const auto& o : per_tree_options) {
    combos *= static_cast<long>(std::max<size_t>(o.size(), 1));
    if (combos > 20000)
      throw Error(ErrorKind::ItineraryInconsistent, "too many winding distributions");
  }

  std::optional<DualLamination> solution;
  std::vector<size_t> choice(ntree, 0);
  auto corner_extra = [&](const std::vector<size_t>& ch) {
    std::map<size_t, long> extra;
    for (size_t t = 0; t < ntree; ++t) {
      if (per_tree_options[t].empty()) continue;
      const auto& opt = per_tree_options[t][ch[t]];
      for (size_t i = 0; i < tree_critical[t].size(); ++i)
        extra[tree_critical[t][i]] = opt[i];
    }
    return extra;
  };

  std::function<void(size_t)> try_all = [&](size_t t) {
    if (t == ntree) {
      auto extra = corner_extra(choice);
      // Digits from the lifted walk.
      std::map<int, long> digit;
      size_t corner_base = 0;
      for (size_t tt = 0; tt < ntree; ++tt) {
        const auto& circ = circuit[tt];
        if (circ.empty()) continue;
        int u = tm.tree_image(static_cast<int>(tt));
        const long M = static_cast<long>(circuit[u].size());
        long lift = pos[arc_image[circ[0]]];
        for (size_t i = 0; i < circ.size(); ++i) {
          digit[circ[i]] = lift / M;
          if (lift / M >= degree_of_tree[tt]) return;  // digit out of range
          size_t ci = corner_base + i;
          lift += corners[ci].min_jump + M * (extra.count(ci) ? extra[ci] : 0);
        }
        corner_base += circ.size();
      }

      // Solve the digit recursion exactly over the arc functional graph.
      std::map<int, Angle> angle;
      std::function<Angle(int)> solve = [&](int arc) -> Angle {
        auto it = angle.find(arc);
        if (it != angle.end()) return it->second;
        // Walk the orbit until a repeat.
        std::vector<int> orbit;
        std::map<int, size_t> where;
        int cur = arc;
        while (!angle.count(cur) && !where.count(cur)) {
          where[cur] = orbit.size();
          orbit.push_back(cur);
          cur = arc_image[cur];
        }
        BigRat t_cur;
        size_t resolved_from;
        if (angle.count(cur)) {
          t_cur = angle[cur].value();
          resolved_from = orbit.size();
        } else {
          // Cycle from where[cur] to the end of orbit.
          size_t c0 = where[cur];
          BigRat S(0), P(1);
          for (size_t k = c0; k < orbit.size(); ++k) {
            long deg = degree_of_tree[tree_of_edge[orbit[k] / 2]];
            P *= BigRat(BigInt(deg));
            S += BigRat(BigInt(digit[orbit[k]])) * (BigRat(1) / P);
          }
          if (P < 2)
            throw Error(ErrorKind::ItineraryInconsistent, "degree-1 side cycle");
          BigRat tc = S * P / (P - 1);
          t_cur = tc;
          // Assign along the cycle.
          BigRat val = tc;
          for (size_t k = c0; k < orbit.size(); ++k) {
            angle.emplace(orbit[k], Angle(val));
            long deg = degree_of_tree[tree_of_edge[orbit[k] / 2]];
            val = val * BigRat(BigInt(deg)) - BigRat(BigInt(digit[orbit[k]]));
          }
          resolved_from = c0;
        }
        // Back-substitute the pre-periodic prefix.
        for (size_t k = resolved_from; k-- > 0;) {
          long deg = degree_of_tree[tree_of_edge[orbit[k] / 2]];
          t_cur = (BigRat(BigInt(digit[orbit[k]])) + t_cur) / BigRat(BigInt(deg));
          angle.emplace(orbit[k], Angle(t_cur));
        }
        return angle[arc];
      };
      for (auto& [arc, img] : arc_image) solve(arc);

      // Validate: weak circuit monotonicity, exact equivariance, per-edge
      // distinct sides, non-crossing leaves.
      for (size_t tt = 0; tt < ntree; ++tt) {
        const auto& circ = circuit[tt];
        for (size_t i = 0; i + 1 < circ.size(); ++i)
          if (angle[circ[i + 1]] < angle[circ[i]]) return;
        BigInt deg(degree_of_tree[tt]);
        for (int arc : circ)
          if (map_angle(angle[arc], deg) != angle[arc_image[arc]]) return;
        for (int arc : circ)
          if (arc % 2 == 0 && angle[arc] == angle[av.reverse(arc)]) return;
      }
      DualLamination result;
      result.tree_leaves.resize(ntree);
      result.tree_degree.resize(ntree);
      result.tree_portrait.resize(ntree);
      result.side_angle = angle;
      for (size_t tt = 0; tt < ntree; ++tt) {
        result.tree_degree[tt] = BigInt(degree_of_tree[tt]);
        for (int arc : circuit[tt])
          if (arc % 2 == 0)
            result.tree_leaves[tt].push_back(Leaf(angle[arc], angle[av.reverse(arc)]));
      }
      // Leaves must be pairwise unlinked per tree.
      for (size_t tt = 0; tt < ntree; ++tt)
        for (size_t i = 0; i < result.tree_leaves[tt].size(); ++i)
          for (size_t j = i + 1; j < result.tree_leaves[tt].size(); ++j)
            if (leaves_linked(result.tree_leaves[tt][i], result.tree_leaves[tt][j])) return;

      // Critical cut chords: for each corner with extra windings, the fan of
      // preimages of the corner-end image angle, closed at the corner end.
      size_t base = 0;
      for (size_t tt = 0; tt < ntree; ++tt) {
        const auto& circ = circuit[tt];
        BigInt deg(degree_of_tree[tt]);
        for (size_t i = 0; i < circ.size(); ++i) {
          size_t ci = base + i;
          long e = extra.count(ci) ? extra[ci] : 0;
          if (e <= 0) continue;
          int a = circ[i], b = circ[(i + 1) % circ.size()];
          Angle ta = angle[a], tb = angle[b];
          Angle w = angle[arc_image[b]];
          std::vector<Angle> cuts;
          for (const auto& p : w.preimages(deg))
            if (in_open_arc(p, ta, tb)) cuts.push_back(p);
          if (static_cast<long>(cuts.size()) != e) return;  // distribution inconsistent
          // Sort counterclockwise starting from ta.
          std::sort(cuts.begin(), cuts.end(), [&](const Angle& x, const Angle& y) {
            return x.minus(ta) < y.minus(ta);
          });
          for (size_t c = 0; c + 1 < cuts.size(); ++c)
            result.tree_portrait[tt].push_back({cuts[c], cuts[c + 1]});
          result.tree_portrait[tt].push_back({cuts.back(), tb});
        }
        base += circ.size();
      }

      if (solution)
        throw Error(ErrorKind::ItineraryInconsistent,
                    "ribbon data admits multiple consistent angle assignments");
      solution = std::move(result);
      return;
    }
    for (size_t k = 0; k < std::max<size_t>(per_tree_options[t].size(), 1); ++k) {
      choice[t] = k;
      try_all(t + 1);
    }
  };
  try_all(0);

  if (!solution)
    throw Error(ErrorKind::ItineraryInconsistent,
                "no consistent angle assignment for the given ribbon data");
  return *solution;
}

}  // namespace qpcf
