#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qpcf/dual_lamination.hpp"
#include "qpcf/lamination.hpp"
#include "qpcf/treedyn.hpp"

namespace qpcf {

struct SimplicialDiagnostics {
  bool simplicial = true;
  std::vector<int> path_edges;  // edges mapping onto multi-edge paths
};

/// True iff every edge maps to a single edge; offenders are candidates for
/// subdivision.
inline SimplicialDiagnostics hubbard_is_simplicial(const RibbonTreeMap& h) {
  SimplicialDiagnostics out;
  for (size_t e = 0; e < h.edge_count(); ++e) {
    if (h.image_edge_path(static_cast<int>(e)).size() != 1) {
      out.simplicial = false;
      out.path_edges.push_back(static_cast<int>(e));
    }
  }
  return out;
}

/// Dual lamination of a simplicial Hubbard tree, pulled back `depth`
/// generations with the portrait cut from the critical corners. Strictly
/// pre-periodic path edges are subdivided automatically.
inline Lamination lamination_of(const RibbonTreeMap& h, int depth) {
  RibbonTreeMap tree = h;
  auto diag = hubbard_is_simplicial(tree);
  if (!diag.simplicial) {
    auto sub = subdivide_preperiodic(tree);
    if (!sub.fully_simplicial)
      throw Error(ErrorKind::NotSimplicial,
                  "Hubbard tree map sends a periodic edge onto a path; no simplicial structure");
  }
  auto dl = dual_lamination(tree);
  BigInt d = dl.tree_degree[0];
  if (d < 2) throw Error(ErrorKind::ItineraryInconsistent, "tree degree must be >= 2");
  Lamination base(d);
  for (const auto& l : dl.tree_leaves[0]) base.insert(l, 0);
  if (base.empty()) return base;  // edgeless tree: every pullback stays empty
  CriticalPortrait portrait(dl.tree_portrait[0], d);
  if (depth == 0) {
    base.set_portrait(portrait);
    return base;
  }
  return pullback_lamination(base, portrait, depth);
}

struct MatingVerdict {
  enum class Outcome { Mateable, Obstructed };
  Outcome outcome = Outcome::Mateable;
  std::optional<ParallelCertificate> certificate;  // when obstructed
  StabilizationReport report;                      // when mateable
  int depth_used = 0;
};

/// Mateability per the laminational criterion: pull both sides back to
/// increasing depths, Obstructed on the first Parallel outcome, Mateable
/// once classes stabilize across two consecutive depths without a cycle.
inline MatingVerdict mateability(const Lamination& lp, const Lamination& lm, int max_depth) {
  if (lp.degree() != lm.degree())
    throw Error(ErrorKind::DegreeMismatch, "laminations have different degrees");
  if (!lp.empty() && !lp.portrait())
    throw Error(ErrorKind::PortraitIncompatible, "plus lamination carries no portrait");
  if (!lm.empty() && !lm.portrait())
    throw Error(ErrorKind::PortraitIncompatible, "minus lamination carries no portrait");

  MatingVerdict out;
  for (int depth = 0; depth <= max_depth; ++depth) {
    Lamination cur_p = lp.empty() ? lp : pullback_lamination(lp, *lp.portrait(), depth);
    Lamination cur_m = lm.empty() ? lm : pullback_lamination(lm, *lm.portrait(), depth);
    ParallelResult res;
    bool stabilized = false;
    try {
      res = parallel_test(cur_p, cur_m, depth);
      stabilized = res.parallel ? false : res.report.stabilized;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::DepthInsufficient) throw;
      continue;  // classes still moving; escalate
    }
    if (res.parallel) {
      out.outcome = MatingVerdict::Outcome::Obstructed;
      out.certificate = res.certificate;
      out.depth_used = depth;
      return out;
    }
    if (stabilized && depth >= 1) {
      out.outcome = MatingVerdict::Outcome::Mateable;
      out.report = res.report;
      out.depth_used = depth;
      return out;
    }
    if (lp.empty() && lm.empty()) {
      // Power-map laminations: nothing will ever appear.
      out.outcome = MatingVerdict::Outcome::Mateable;
      out.report.stabilized = true;
      out.depth_used = depth;
      return out;
    }
  }
  throw Error(ErrorKind::DepthExhausted,
              "no verdict by depth " + std::to_string(max_depth));
}

}  // namespace qpcf
