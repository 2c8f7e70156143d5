#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "qpcf/angle.hpp"

namespace qpcf {

/// A chord of the circle with two distinct rational endpoints.
class Leaf {
public:
  Leaf(Angle a, Angle b) {
    if (a == b) throw Error(ErrorKind::ParseError, "degenerate leaf " + a.str());
    if (b < a) std::swap(a, b);
    a_ = std::move(a);
    b_ = std::move(b);
  }

  const Angle& a() const { return a_; }
  const Angle& b() const { return b_; }

  bool has_endpoint(const Angle& t) const { return t == a_ || t == b_; }

  auto operator<=>(const Leaf&) const = default;

  std::string str() const { return "{" + a_.str() + ", " + b_.str() + "}"; }

private:
  Angle a_, b_;
};

/// Chords cross iff exactly one endpoint of l2 lies strictly between the
/// endpoints of l1; a shared endpoint never counts as a crossing.
inline bool leaves_linked(const Leaf& l1, const Leaf& l2) {
  if (l1.has_endpoint(l2.a()) || l1.has_endpoint(l2.b())) return false;
  int inside = 0;
  if (in_open_arc(l2.a(), l1.a(), l1.b())) ++inside;
  if (in_open_arc(l2.b(), l1.a(), l1.b())) ++inside;
  return inside == 1;
}

/// d-1 pairwise unlinked chords that pin down the preimage pairing of the
/// pullback. Chords may be degenerate (a single angle); those separate
/// nothing and act only through endpoint coincidences.
class CriticalPortrait {
public:
  struct Chord {
    Angle a, b;  // a == b encodes a degenerate chord
    bool degenerate() const { return a == b; }
  };

  CriticalPortrait() = default;

  CriticalPortrait(std::vector<Chord> chords, const BigInt& degree) : chords_(std::move(chords)) {
    if (BigInt(chords_.size()) != degree - 1)
      throw Error(ErrorKind::PortraitIncompatible,
                  "portrait must carry degree-1 chords, got " + std::to_string(chords_.size()));
    for (auto& c : chords_) {
      if (c.b < c.a) std::swap(c.a, c.b);
      // A degree-2 separator whose endpoints have distinct images (a major
      // leaf rather than a critical chord) cannot pin down deep pullbacks by
      // itself. Replace it by the critical chord bounding the same inverse
      // branch: extend the short side counterclockwise to length exactly 1/2.
      if (degree == 2 && !c.degenerate() && c.a.times(2) != c.b.times(2)) {
        Angle half(BigInt(1), BigInt(2));
        Angle len_ab = c.b.minus(c.a);  // ccw arc a -> b
        Angle start = (len_ab < half) ? c.a : c.b;
        c.a = start;
        c.b = start.plus(half);
        if (c.b < c.a) std::swap(c.a, c.b);
      }
    }
    for (size_t i = 0; i < chords_.size(); ++i)
      for (size_t j = i + 1; j < chords_.size(); ++j) {
        if (chords_[i].degenerate() || chords_[j].degenerate()) continue;
        if (leaves_linked(Leaf(chords_[i].a, chords_[i].b), Leaf(chords_[j].a, chords_[j].b)))
          throw Error(ErrorKind::PortraitIncompatible, "portrait chords linked");
      }
  }

  const std::vector<Chord>& chords() const { return chords_; }

  /// Side index of t for every non-degenerate chord, with the half-open
  /// convention [a, b) / [b, a): chord endpoints belong to the side that
  /// starts at them.
  std::vector<int> side_vector(const Angle& t) const {
    std::vector<int> sides;
    sides.reserve(chords_.size());
    for (const auto& c : chords_) {
      if (c.degenerate()) {
        sides.push_back(0);
        continue;
      }
      sides.push_back(in_half_open_arc(t, c.a, c.b) ? 0 : 1);
    }
    return sides;
  }

  bool contains_chord(const Angle& x, const Angle& y) const {
    for (const auto& c : chords_)
      if ((c.a == x && c.b == y) || (c.a == y && c.b == x)) return true;
    return false;
  }

private:
  std::vector<Chord> chords_;
};

struct LaminationValidation {
  bool ok = true;
  std::vector<std::pair<Leaf, Leaf>> linked_pairs;
};

/// A finite set of pairwise unlinked leaves under the ambient map m_d,
/// with the pullback generation of each leaf recorded.
class Lamination {
public:
  explicit Lamination(BigInt degree) : degree_(std::move(degree)) {
    if (degree_ < 2) throw Error(ErrorKind::ParseError, "lamination degree must be >= 2");
  }

  Lamination(BigInt degree, const std::vector<Leaf>& leaves) : Lamination(std::move(degree)) {
    for (const auto& l : leaves) insert(l, 0);
  }

  const BigInt& degree() const { return degree_; }
  int depth() const { return depth_; }
  size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  struct Entry {
    Leaf leaf;
    int gen;
  };
  const std::vector<Entry>& entries() const { return entries_; }

  bool insert(const Leaf& leaf, int gen) {
    if (index_.count(leaf)) return false;
    index_.emplace(leaf, entries_.size());
    entries_.push_back({leaf, gen});
    depth_ = std::max(depth_, gen);
    return true;
  }

  bool contains(const Leaf& leaf) const { return index_.count(leaf) > 0; }

  std::vector<Leaf> leaves() const {
    std::vector<Leaf> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e.leaf);
    return out;
  }

  /// Leaves of generation <= gen.
  Lamination truncated(int gen) const {
    Lamination out(degree_);
    for (const auto& e : entries_)
      if (e.gen <= gen) out.insert(e.leaf, e.gen);
    return out;
  }

  Lamination reflected() const {
    Lamination out(degree_);
    for (const auto& e : entries_)
      out.insert(Leaf(e.leaf.a().reflected(), e.leaf.b().reflected()), e.gen);
    if (portrait_) {
      std::vector<CriticalPortrait::Chord> chords;
      for (const auto& c : portrait_->chords())
        chords.push_back({c.a.reflected(), c.b.reflected()});
      out.portrait_ = CriticalPortrait(std::move(chords), degree_);
    }
    return out;
  }

  std::set<Angle> support() const {
    std::set<Angle> s;
    for (const auto& e : entries_) {
      s.insert(e.leaf.a());
      s.insert(e.leaf.b());
    }
    return s;
  }

  const std::optional<CriticalPortrait>& portrait() const { return portrait_; }
  void set_portrait(CriticalPortrait p) { portrait_ = std::move(p); }

private:
  BigInt degree_;
  int depth_ = 0;
  std::vector<Entry> entries_;
  std::map<Leaf, size_t> index_;
  std::optional<CriticalPortrait> portrait_;
};

inline LaminationValidation validate_lamination(const Lamination& lam) {
  LaminationValidation v;
  const auto& es = lam.entries();
  for (size_t i = 0; i < es.size(); ++i)
    for (size_t j = i + 1; j < es.size(); ++j)
      if (leaves_linked(es[i].leaf, es[j].leaf)) {
        v.ok = false;
        v.linked_pairs.emplace_back(es[i].leaf, es[j].leaf);
      }
  return v;
}

namespace detail {

// All perfect matchings between the preimages of a and of b whose chords are
// compatible with the portrait sides and pairwise unlinked.
inline void enumerate_pullback_matchings(const std::vector<Angle>& pre_a,
                                         const std::vector<Angle>& pre_b,
                                         const std::vector<std::vector<bool>>& admissible,
                                         std::vector<int>& pick, std::vector<bool>& used,
                                         size_t i, std::vector<std::vector<int>>& found) {
  const size_t n = pre_a.size();
  if (found.size() > 8) return;  // enough to witness ambiguity
  if (i == n) {
    found.push_back(pick);
    return;
  }
  for (size_t j = 0; j < n; ++j) {
    if (used[j] || !admissible[i][j]) continue;
    bool crossing = false;
    Leaf cand(pre_a[i], pre_b[j]);
    for (size_t k = 0; k < i; ++k)
      if (leaves_linked(Leaf(pre_a[k], pre_b[pick[k]]), cand)) {
        crossing = true;
        break;
      }
    if (crossing) continue;
    used[j] = true;
    pick[i] = static_cast<int>(j);
    enumerate_pullback_matchings(pre_a, pre_b, admissible, pick, used, i + 1, found);
    used[j] = false;
  }
}

inline std::vector<Leaf> pull_back_leaf(const Leaf& leaf, const BigInt& d,
                                        const CriticalPortrait& portrait) {
  std::vector<Angle> pre_a = leaf.a().preimages(d);
  std::vector<Angle> pre_b = leaf.b().preimages(d);
  const size_t n = pre_a.size();

  std::vector<std::vector<int>> side_a, side_b;
  for (const auto& t : pre_a) side_a.push_back(portrait.side_vector(t));
  for (const auto& t : pre_b) side_b.push_back(portrait.side_vector(t));

  std::vector<std::vector<bool>> admissible(n, std::vector<bool>(n, false));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) {
      if (pre_a[i] == pre_b[j]) continue;  // preimages of distinct angles never collide
      admissible[i][j] =
          side_a[i] == side_b[j] || portrait.contains_chord(pre_a[i], pre_b[j]);
    }

  std::vector<int> pick(n, -1);
  std::vector<bool> used(n, false);
  std::vector<std::vector<int>> found;
  enumerate_pullback_matchings(pre_a, pre_b, admissible, pick, used, 0, found);

  // Distinct chord sets, not distinct assignments.
  std::set<std::set<Leaf>> chord_sets;
  for (const auto& m : found) {
    std::set<Leaf> s;
    for (size_t i = 0; i < n; ++i) s.insert(Leaf(pre_a[i], pre_b[m[i]]));
    chord_sets.insert(std::move(s));
  }
  if (chord_sets.empty())
    throw Error(ErrorKind::PortraitIncompatible,
                "no non-crossing matching avoids the portrait for leaf " + leaf.str());
  if (chord_sets.size() > 1)
    throw Error(ErrorKind::PortraitIncompatible,
                "portrait leaves the preimage pairing of " + leaf.str() + " ambiguous");
  return std::vector<Leaf>(chord_sets.begin()->begin(), chord_sets.begin()->end());
}

}  // namespace detail

/// L together with `depth` further generations of preimage leaves; the
/// pairing of each generation is resolved by the portrait.
inline Lamination pullback_lamination(const Lamination& lam, const CriticalPortrait& portrait,
                                      int depth) {
  Lamination out = lam;
  out.set_portrait(portrait);
  const BigInt& d = lam.degree();
  int base = out.depth();
  std::vector<Leaf> frontier;
  for (const auto& e : out.entries())
    if (e.gen == base) frontier.push_back(e.leaf);
  // If the lamination has mixed generations, pull back from every leaf of the
  // deepest generation; the older ones already carry their preimages.
  for (int g = 0; g < depth; ++g) {
    std::vector<Leaf> next;
    for (const auto& leaf : frontier)
      for (const auto& pre : detail::pull_back_leaf(leaf, d, portrait))
        if (out.insert(pre, base + g + 1)) next.push_back(pre);
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  auto check = validate_lamination(out);
  if (!check.ok)
    throw Error(ErrorKind::LinkedResult, "pullback produced linked leaves (invalid input data)");
  return out;
}

/// Partition of the leaf endpoints into connectivity classes of the leaf
/// chain graph.
class EquivClasses {
public:
  explicit EquivClasses(const Lamination& lam) {
    for (const auto& e : lam.entries()) {
      int ia = id(e.leaf.a());
      int ib = id(e.leaf.b());
      unite(ia, ib);
    }
    finalize();
  }

  size_t count() const { return classes_.size(); }
  const std::vector<std::set<Angle>>& classes() const { return classes_; }

  /// Class index of t, or -1 when t is not in the support.
  int class_of(const Angle& t) const {
    auto it = index_.find(t);
    if (it == index_.end()) return -1;
    return root_class_.at(find(it->second));
  }

  bool same_class(const Angle& a, const Angle& b) const {
    int ca = class_of(a), cb = class_of(b);
    if (ca < 0 || cb < 0) return a == b;
    return ca == cb;
  }

  /// The partitions agree when restricted to `angles`.
  bool restriction_equal(const EquivClasses& other, const std::set<Angle>& angles) const {
    std::vector<Angle> v(angles.begin(), angles.end());
    for (size_t i = 0; i < v.size(); ++i)
      for (size_t j = i + 1; j < v.size(); ++j)
        if (same_class(v[i], v[j]) != other.same_class(v[i], v[j])) return false;
    return true;
  }

private:
  int id(const Angle& t) {
    auto it = index_.find(t);
    if (it != index_.end()) return it->second;
    int n = static_cast<int>(parent_.size());
    index_.emplace(t, n);
    parent_.push_back(n);
    angles_.push_back(t);
    return n;
  }

  int find(int x) const {
    while (parent_[x] != x) x = parent_[x];
    return x;
  }

  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[a] = b;
  }

  void finalize() {
    std::map<int, int> root_to_class;
    for (size_t i = 0; i < parent_.size(); ++i) {
      int r = find(static_cast<int>(i));
      auto [it, fresh] = root_to_class.emplace(r, classes_.size());
      if (fresh) classes_.emplace_back();
      classes_[it->second].insert(angles_[i]);
    }
    root_class_ = std::move(root_to_class);
  }

  std::map<Angle, int> index_;
  std::vector<int> parent_;
  std::vector<Angle> angles_;
  std::vector<std::set<Angle>> classes_;
  std::map<int, int> root_class_;
};

inline EquivClasses equivalence_classes(const Lamination& lam) { return EquivClasses(lam); }

/// Alternating cycle a_0, b_0, ..., a_{k-1}, b_{k-1} witnessing parallelism:
/// a_i ~_{Lp} b_i and -b_i ~_{Lm} -a_{i+1}, indices mod k.
struct ParallelCertificate {
  std::vector<std::pair<Angle, Angle>> cycle;  // (a_i, b_i)

  bool validate(const Lamination& lp, const Lamination& lm) const {
    if (cycle.empty()) return false;
    EquivClasses cp(lp), cm(lm);
    const size_t k = cycle.size();
    for (size_t i = 0; i < k; ++i) {
      const auto& [ai, bi] = cycle[i];
      if (!cp.same_class(ai, bi)) return false;
      const Angle& anext = cycle[(i + 1) % k].first;
      if (!cm.same_class(bi.reflected(), anext.reflected())) return false;
    }
    // The loop must use nontrivial steps from both laminations.
    bool nontrivial_p = false, nontrivial_m = false;
    for (size_t i = 0; i < k; ++i) {
      if (cycle[i].first != cycle[i].second) nontrivial_p = true;
      if (cycle[i].second != cycle[(i + 1) % k].first) nontrivial_m = true;
    }
    if (k == 1) nontrivial_m = nontrivial_p;  // doubled edge: one pair serves both
    return nontrivial_p && nontrivial_m;
  }
};

struct StabilizationReport {
  bool stabilized = false;
  int depth_checked = 0;
  size_t classes_plus = 0;
  size_t classes_minus = 0;
};

struct ParallelResult {
  bool parallel = false;
  std::optional<ParallelCertificate> certificate;
  StabilizationReport report;
};

namespace detail {

// Incidence multigraph between the classes of Lp and of reflect(Lm), one edge
// per shared angle; a cycle (including a doubled edge) certifies parallelism.
inline std::optional<ParallelCertificate> incidence_cycle(const Lamination& lp,
                                                          const Lamination& lm) {
  EquivClasses cp(lp);
  Lamination lm_ref = lm.reflected();
  EquivClasses cm(lm_ref);

  std::vector<Angle> shared;
  {
    auto sp = lp.support();
    auto sm = lm_ref.support();
    std::set_intersection(sp.begin(), sp.end(), sm.begin(), sm.end(),
                          std::back_inserter(shared));
    // Simplest angles first, so certificates close on the lowest-denominator
    // cycle available.
    std::stable_sort(shared.begin(), shared.end(), [](const Angle& x, const Angle& y) {
      if (x.denominator() != y.denominator()) return x.denominator() < y.denominator();
      return x.numerator() < y.numerator();
    });
  }

  const size_t np = cp.count();
  const size_t total = np + cm.count();
  std::vector<int> parent(total);
  for (size_t i = 0; i < total; ++i) parent[i] = static_cast<int>(i);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };

  // Spanning forest edges remember the shared angle that created them.
  std::vector<std::vector<std::pair<int, Angle>>> adj(total);
  for (const Angle& x : shared) {
    int u = cp.class_of(x);
    int v = static_cast<int>(np) + cm.class_of(x);
    int ru = find(u), rv = find(v);
    if (ru != rv) {
      parent[ru] = rv;
      adj[u].push_back({v, x});
      adj[v].push_back({u, x});
      continue;
    }
    // Cycle found: recover the forest path from u to v and close it with x.
    std::map<int, std::pair<int, Angle>> prev;
    std::vector<int> queue{u};
    prev[u] = {u, x};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
      int w = queue[qi];
      if (w == v) break;
      for (const auto& [nb, via] : adj[w])
        if (!prev.count(nb)) {
          prev[nb] = {w, via};
          queue.push_back(nb);
        }
    }
    // Walk v -> u collecting the angles, then append the closing angle.
    std::vector<Angle> cyc;
    int w = v;
    while (w != u) {
      cyc.push_back(prev[w].second);
      w = prev[w].first;
    }
    cyc.push_back(x);
    // cyc is a closed alternating walk of shared angles; consecutive angles
    // share alternately an Lp class and a reflect(Lm) class. Orient so that
    // the first two share an Lp class.
    if (cyc.size() % 2 != 0) continue;  // cannot happen in a bipartite graph
    if (cp.class_of(cyc[0]) != cp.class_of(cyc[1])) {
      std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
    }
    ParallelCertificate cert;
    for (size_t i = 0; i + 1 < cyc.size(); i += 2) cert.cycle.push_back({cyc[i], cyc[i + 1]});
    if (cert.validate(lp, lm)) return cert;
    // An invalid reconstruction keeps scanning for another closing edge.
  }
  return std::nullopt;
}

}  // namespace detail

/// Parallel iff the class-incidence multigraph has a cycle. NonParallel
/// verdicts carry stabilization evidence comparing depth max_depth-1 with
/// max_depth; a changed class structure raises DepthInsufficient.
inline ParallelResult parallel_test(const Lamination& lp, const Lamination& lm, int max_depth) {
  ParallelResult res;
  auto cert = detail::incidence_cycle(lp, lm);
  if (cert) {
    res.parallel = true;
    res.certificate = std::move(cert);
    return res;
  }

  res.report.depth_checked = max_depth;
  res.report.classes_plus = EquivClasses(lp).count();
  res.report.classes_minus = EquivClasses(lm).count();

  if (max_depth > 0) {
    Lamination lp_prev = lp.truncated(max_depth - 1);
    Lamination lm_prev = lm.truncated(max_depth - 1);
    Lamination lp_now = lp.truncated(max_depth);
    Lamination lm_now = lm.truncated(max_depth);
    bool stable_p = EquivClasses(lp_now).restriction_equal(EquivClasses(lp_prev), lp_prev.support());
    bool stable_m = EquivClasses(lm_now).restriction_equal(EquivClasses(lm_prev), lm_prev.support());
    if (!stable_p || !stable_m)
      throw Error(ErrorKind::DepthInsufficient,
                  "class structure changed between depth " + std::to_string(max_depth - 1) +
                      " and " + std::to_string(max_depth));
    res.report.stabilized = true;
  } else {
    res.report.stabilized = lp.empty() && lm.empty();
  }
  return res;
}

}  // namespace qpcf
