// Command-line front end: file intake, pipelines, JSON reports, and SVG
// rendering of laminations and spines.
//
// Exit codes: 0 success; 1 negative domain verdict (obstructed / invalid /
// parallel); 2 bad input.

#include <CLI11.hpp>

#include <iostream>

#include "qpcf/dual_lamination.hpp"
#include "qpcf/io.hpp"
#include "qpcf/mating.hpp"
#include "qpcf/render.hpp"

using namespace qpcf;
using nlohmann::json;

namespace {

struct Options {
  std::string out;
  std::string render;
  int depth = 4;
  int max_depth = 8;
  double tol = 1e-9;
  double cluster_gap = 1.0;
  double attach_radius = 1.0;
};

void emit(const json& report, const Options& opt) {
  std::string text = report.dump(2) + "\n";
  if (opt.out.empty())
    std::cout << text;
  else
    io::write_file(opt.out, text);
}

void check_ranges(const Options& opt) {
  if (opt.depth < 0 || opt.depth > 64 || opt.max_depth < 0 || opt.max_depth > 64)
    throw Error(ErrorKind::ParseError, "depth must lie in [0, 64]");
  if (opt.tol <= 0 || opt.tol >= 1) throw Error(ErrorKind::ParseError, "tol must lie in (0, 1)");
  if (opt.cluster_gap <= 0 || opt.attach_radius <= 0)
    throw Error(ErrorKind::ParseError, "gaps and radii must be positive");
}

json matrix_json(const RatMat& m) {
  json rows = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v.convert_to<double>());
    rows.push_back(r);
  }
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quasi post-critically finite degeneration toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--out", opt.out, "write the JSON report here instead of stdout");
  app.add_option("--render", opt.render, "write an SVG rendering here");
  app.add_option("--depth", opt.depth, "pullback depth");
  app.add_option("--tol", opt.tol, "numeric tolerance");
  app.add_option("--cluster-gap", opt.cluster_gap, "single-linkage clustering threshold");
  app.add_option("--attach-radius", opt.attach_radius, "spine attachment radius");

  int exit_code = 0;

  // scheme validate
  auto* scheme = app.add_subcommand("scheme", "mapping scheme operations");
  std::string scheme_file;
  auto* scheme_validate = scheme->add_subcommand("validate", "check minimality/hyperbolicity");
  scheme_validate->add_option("file", scheme_file)->required();
  scheme_validate->callback([&] {
    auto s = io::scheme_from_json(io::parse_file(scheme_file));
    auto v = validate_scheme(s);
    json report;
    report["ok"] = v.ok;
    report["degree"] = v.degree.convert_to<long>();
    report["violations"] = v.violations;
    emit(report, opt);
    if (!v.ok) exit_code = 1;
  });

  // tree analyze
  auto* tree = app.add_subcommand("tree", "ribbon tree map operations");
  std::string tree_file;
  std::vector<int> keep;
  auto* tree_analyze = tree->add_subcommand("analyze", "matrices, Mv=Dv, spectral radius");
  tree_analyze->add_option("file", tree_file)->required();
  tree_analyze->add_option("--keep", keep, "reduce to the hull of these vertices first");
  tree_analyze->callback([&] {
    auto tm = io::ribbon_tree_from_json(io::parse_file(tree_file));
    json report;
    EdgeMatrices em;
    if (!keep.empty()) {
      auto red = convex_hull_subtree(tm, std::set<int>(keep.begin(), keep.end()));
      em = red.matrices;
      report["reduced_edges"] = red.reduced_edges;
    } else {
      em = markov_degree_matrices(tm);
    }
    report["markov"] = matrix_json(em.markov);
    report["degree_matrix"] = matrix_json(em.degree);
    auto v = solve_eigen_MD(em);
    if (v) {
      json vec = json::array();
      for (const auto& x : *v) vec.push_back(x.convert_to<double>());
      report["eigenvector"] = vec;
    } else {
      report["eigenvector"] = nullptr;
    }
    // Spectral radius of D^-1 M.
    RatMat dinvm = em.markov;
    for (size_t i = 0; i < dinvm.size(); ++i)
      for (auto& x : dinvm[i]) x /= em.degree[i][i];
    report["lambda"] = spectral_radius(to_double(dinvm));
    if (keep.empty() && !tm.anchors.empty() && tm.anchors[0].edge >= 0) {
      try {
        auto dl = dual_lamination(tm);
        json lams = json::array();
        for (size_t t = 0; t < dl.tree_leaves.size(); ++t) {
          json leaves = json::array();
          for (const auto& l : dl.tree_leaves[t]) leaves.push_back({l.a().str(), l.b().str()});
          lams.push_back(
              {{"degree", dl.tree_degree[t].convert_to<long>()}, {"leaves", leaves}});
        }
        report["dual_lamination"] = lams;
      } catch (const Error& e) {
        report["dual_lamination_error"] = e.what();
      }
    }
    emit(report, opt);
  });

  // lam pullback | classes | parallel
  auto* lam = app.add_subcommand("lam", "lamination operations");
  std::string lam_file, lam_file2;
  auto* lam_pullback = lam->add_subcommand("pullback", "pull a lamination back --depth times");
  lam_pullback->add_option("file", lam_file)->required();
  lam_pullback->callback([&] {
    check_ranges(opt);
    auto l = io::lamination_from_json(io::parse_file(lam_file));
    if (!l.portrait()) throw Error(ErrorKind::ParseError, "lamination file carries no portrait");
    auto out = pullback_lamination(l, *l.portrait(), opt.depth);
    emit(io::lamination_to_json(out), opt);
    if (!opt.render.empty()) io::write_file(opt.render, render::render_svg(out));
  });
  auto* lam_classes = lam->add_subcommand("classes", "equivalence classes of leaf endpoints");
  lam_classes->add_option("file", lam_file)->required();
  lam_classes->callback([&] {
    auto l = io::lamination_from_json(io::parse_file(lam_file));
    auto classes = equivalence_classes(l);
    json report;
    report["count"] = classes.count();
    report["classes"] = json::array();
    for (const auto& cls : classes.classes()) {
      json c = json::array();
      for (const auto& a : cls) c.push_back(a.str());
      report["classes"].push_back(c);
    }
    emit(report, opt);
  });
  auto* lam_parallel = lam->add_subcommand("parallel", "parallelism test of two laminations");
  lam_parallel->add_option("plus", lam_file)->required();
  lam_parallel->add_option("minus", lam_file2)->required();
  lam_parallel->callback([&] {
    check_ranges(opt);
    auto lp = io::lamination_from_json(io::parse_file(lam_file));
    auto lm = io::lamination_from_json(io::parse_file(lam_file2));
    if (lp.portrait()) lp = pullback_lamination(lp, *lp.portrait(), opt.depth);
    if (lm.portrait()) lm = pullback_lamination(lm, *lm.portrait(), opt.depth);
    auto res = parallel_test(lp, lm, opt.depth);
    json report;
    report["parallel"] = res.parallel;
    if (res.certificate) {
      report["certificate"] = json::array();
      for (const auto& [a, b] : res.certificate->cycle)
        report["certificate"].push_back({a.str(), b.str()});
    } else {
      report["stabilized"] = res.report.stabilized;
      report["classes_plus"] = res.report.classes_plus;
      report["classes_minus"] = res.report.classes_minus;
    }
    emit(report, opt);
    if (res.parallel) exit_code = 1;
  });

  // blaschke eval | mark | tree
  auto* bla = app.add_subcommand("blaschke", "Blaschke scheme operations");
  std::string bla_file;
  int bla_vertex = 0, bla_iters = 1;
  double z_re = 0.0, z_im = 0.0;
  std::string bla_angle = "0/1";
  double witness_K = 1.0;
  int max_preperiod = 16, max_period = 8;
  auto* bla_eval = bla->add_subcommand("eval", "iterate the scheme at a point");
  bla_eval->add_option("file", bla_file)->required();
  bla_eval->add_option("--vertex", bla_vertex);
  bla_eval->add_option("--re", z_re);
  bla_eval->add_option("--im", z_im);
  bla_eval->add_option("--iters", bla_iters);
  bla_eval->callback([&] {
    auto fs = io::blaschke_scheme_from_json(io::parse_file(bla_file));
    auto p = scheme_orbit(fs, bla_vertex, Complex(z_re, z_im), bla_iters);
    emit({{"vertex", p.vertex}, {"z", {p.z.real(), p.z.imag()}}}, opt);
  });
  auto* bla_mark = bla->add_subcommand("mark", "boundary marking eta at a rational angle");
  bla_mark->add_option("file", bla_file)->required();
  bla_mark->add_option("--vertex", bla_vertex);
  bla_mark->add_option("--angle", bla_angle);
  bla_mark->callback([&] {
    check_ranges(opt);
    auto fs = io::blaschke_scheme_from_json(io::parse_file(bla_file));
    CircleMarking m(fs.maps.at(bla_vertex));
    Complex z = m.eval(Angle::parse(bla_angle), std::max(opt.depth, 1) * 8);
    emit({{"eta", {z.real(), z.imag()}}, {"fixed_point_angle", m.fixed_point_angle()}}, opt);
  });
  auto* bla_tree = bla->add_subcommand("tree", "quasi-invariant forest extraction");
  bla_tree->add_option("file", bla_file)->required();
  bla_tree->add_option("--K", witness_K, "quasi post-critical gap bound");
  bla_tree->add_option("--max-preperiod", max_preperiod);
  bla_tree->add_option("--max-period", max_period);
  bla_tree->callback([&] {
    check_ranges(opt);
    auto fs = io::blaschke_scheme_from_json(io::parse_file(bla_file));
    auto witness = quasi_pcf_witness(fs, witness_K, max_preperiod, max_period);
    auto forest = extract_tree(fs, witness, opt.cluster_gap);
    json report;
    report["witness"] = json::array();
    for (const auto& c : witness.criticals)
      report["witness"].push_back({{"vertex", c.vertex},
                                   {"preperiod", c.preperiod},
                                   {"period", c.period},
                                   {"gap", c.gap}});
    report["spines"] = json::array();
    for (const auto& sp : forest.spines) report["spines"].push_back(io::spine_to_json(sp));
    report["report"] = {{"min_vertex_separation", forest.report.min_vertex_separation},
                        {"max_critical_distance", forest.report.max_critical_distance},
                        {"max_vertex_displacement", forest.report.max_vertex_displacement},
                        {"max_edge_displacement", forest.report.max_edge_displacement},
                        {"simplicial", forest.report.simplicial},
                        {"notes", forest.report.notes}};
    emit(report, opt);
    if (!opt.render.empty() && !forest.spines.empty())
      io::write_file(opt.render, render::render_svg(forest.spines[0]));
  });

  // spheres validate
  auto* spheres = app.add_subcommand("spheres", "tree-of-spheres operations");
  std::string sphere_file;
  auto* spheres_validate = spheres->add_subcommand("validate", "structural validation");
  spheres_validate->add_option("file", sphere_file)->required();
  spheres_validate->callback([&] {
    check_ranges(opt);
    auto ts = io::tree_of_spheres_from_json(io::parse_file(sphere_file));
    auto v = validate_tree_of_spheres(ts, opt.tol);
    json report;
    report["pass"] = v.pass;
    report["free_critical_count"] = v.free_critical_count;
    report["checks"] = json::array();
    for (const auto& c : v.checks)
      report["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    json degrees = json::array();
    for (auto [a, b] : ts.edges) {
      try {
        degrees.push_back({{"edge", {a, b}}, {"local_degree", edge_local_degree(ts, a, b)}});
      } catch (const Error& e) {
        degrees.push_back({{"edge", {a, b}}, {"error", e.what()}});
      }
    }
    report["edge_degrees"] = degrees;
    emit(report, opt);
    if (!v.pass) exit_code = 1;
  });

  // curves analyze (Thurston matrix of a curve cover)
  auto* curves = app.add_subcommand("curves", "curve system operations");
  std::string curve_file;
  auto* curves_analyze = curves->add_subcommand("analyze", "Thurston transition matrix");
  curves_analyze->add_option("file", curve_file)->required();
  curves_analyze->callback([&] {
    auto cover = io::curve_cover_from_json(io::parse_file(curve_file));
    auto res = thurston_matrix(cover);
    json report;
    report["matrix"] = matrix_json(res.matrix);
    report["lambda"] = res.lambda;
    report["obstructed"] = res.obstructed;
    report["exact_confirmed"] = res.exact_confirmed;
    emit(report, opt);
    if (res.obstructed) exit_code = 1;
  });

  // mate
  auto* mate = app.add_subcommand("mate", "polynomial mateability criterion");
  std::string plus_file, minus_file;
  mate->add_option("--plus", plus_file, "plus lamination or Hubbard tree JSON")->required();
  mate->add_option("--minus", minus_file)->required();
  mate->add_option("--max-depth", opt.max_depth);
  mate->callback([&] {
    check_ranges(opt);
    auto load_side = [&](const std::string& path) {
      json j = io::parse_file(path);
      if (j.contains("trees")) return lamination_of(io::ribbon_tree_from_json(j), 0);
      return io::lamination_from_json(j);
    };
    auto lp = load_side(plus_file);
    auto lm = load_side(minus_file);
    auto verdict = mateability(lp, lm, opt.max_depth);
    emit(io::verdict_to_json(verdict), opt);
    if (verdict.outcome == MatingVerdict::Outcome::Obstructed) exit_code = 1;
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == ErrorKind::ParseError || e.kind() == ErrorKind::IoError ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}
