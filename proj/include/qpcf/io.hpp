#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "qpcf/blaschke.hpp"
#include "qpcf/hypgeom.hpp"
#include "qpcf/lamination.hpp"
#include "qpcf/mating.hpp"
#include "qpcf/treedyn.hpp"
#include "qpcf/treesphere.hpp"

namespace qpcf::io {

using nlohmann::json;

inline json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::ParseError, path + ": " + e.what());
  }
  return j;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path);
  out << text;
}

// ---------------------------------------------------------------- lamination

inline Lamination lamination_from_json(const json& j) {
  try {
    Lamination lam(BigInt(j.at("degree").get<long>()));
    for (const auto& pair : j.value("leaves", json::array()))
      lam.insert(Leaf(Angle::parse(pair.at(0).get<std::string>()),
                      Angle::parse(pair.at(1).get<std::string>())),
                 0);
    if (j.contains("portrait")) {
      std::vector<CriticalPortrait::Chord> chords;
      for (const auto& pair : j.at("portrait"))
        chords.push_back({Angle::parse(pair.at(0).get<std::string>()),
                          Angle::parse(pair.at(1).get<std::string>())});
      lam.set_portrait(CriticalPortrait(std::move(chords), lam.degree()));
    }
    return lam;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("lamination: ") + e.what());
  }
}

inline json lamination_to_json(const Lamination& lam) {
  json j;
  j["degree"] = lam.degree().convert_to<long>();
  j["leaves"] = json::array();
  for (const auto& e : lam.entries()) j["leaves"].push_back({e.leaf.a().str(), e.leaf.b().str()});
  if (lam.portrait()) {
    j["portrait"] = json::array();
    for (const auto& c : lam.portrait()->chords()) j["portrait"].push_back({c.a.str(), c.b.str()});
  }
  return j;
}

// --------------------------------------------------------------------- spine

inline json spine_to_json(const MarkedSpine& s) {
  json j;
  j["model"] = s.model == Model::Disk ? "disk" : "ball";
  j["vertices"] = json::array();
  for (const auto& v : s.vertices) {
    if (s.model == Model::Disk)
      j["vertices"].push_back({v.x[0], v.x[1]});
    else
      j["vertices"].push_back({v.x[0], v.x[1], v.x[2]});
  }
  j["edges"] = json::array();
  for (auto [a, b] : s.edges) j["edges"].push_back({a, b});
  j["marked"] = json::array();
  for (int m : s.marked) j["marked"].push_back(m);
  return j;
}

inline MarkedSpine spine_from_json(const json& j) {
  try {
    MarkedSpine s;
    s.model = j.at("model").get<std::string>() == "ball" ? Model::Ball : Model::Disk;
    for (const auto& v : j.at("vertices")) {
      HPoint p;
      p.model = s.model;
      p.x[0] = v.at(0).get<double>();
      p.x[1] = v.at(1).get<double>();
      p.x[2] = v.size() > 2 ? v.at(2).get<double>() : 0.0;
      s.vertices.push_back(p);
      s.is_input.push_back(true);
    }
    for (const auto& e : j.value("edges", json::array()))
      s.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    for (const auto& m : j.value("marked", json::array())) s.marked.insert(m.get<int>());
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("spine: ") + e.what());
  }
}

// ------------------------------------------------------------------- schemes

inline MappingScheme scheme_from_json(const json& j) {
  try {
    MappingScheme s;
    for (const auto& v : j.at("phi")) s.phi.push_back(v.get<int>());
    for (const auto& v : j.at("delta")) s.delta.push_back(BigInt(v.get<long>()));
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("scheme: ") + e.what());
  }
}

inline BlaschkeScheme blaschke_scheme_from_json(const json& j) {
  try {
    BlaschkeScheme fs;
    fs.scheme = scheme_from_json(j.at("scheme"));
    fs.maps.resize(fs.scheme.size(), BlaschkeProduct());
    for (const auto& [key, val] : j.at("maps").items()) {
      int s = std::stoi(key);
      std::vector<Complex> zeros;
      for (const auto& z : val.at("zeros"))
        zeros.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
      fs.maps.at(s) = BlaschkeProduct(zeros);
    }
    fs.validate();
    return fs;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("blaschke scheme: ") + e.what());
  }
}

// ------------------------------------------------------------ ribbon forests

inline RibbonTreeMap ribbon_tree_from_json(const json& j) {
  try {
    RibbonTreeMap tm;
    size_t nv = 0;
    for (const auto& tree : j.at("trees"))
      for (const auto& v : tree.at("vertices")) nv = std::max<size_t>(nv, v.get<size_t>() + 1);
    tm.f_vertex.assign(nv, -1);
    tm.delta_v.assign(nv, BigInt(1));
    tm.ribbon.assign(nv, {});
    for (const auto& tree : j.at("trees")) {
      std::vector<int> verts;
      for (const auto& v : tree.at("vertices")) verts.push_back(v.get<int>());
      tm.tree_vertices.push_back(verts);
      for (const auto& e : tree.value("edges", json::array())) {
        tm.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
        tm.delta_e.push_back(BigInt(1));
      }
      for (const auto& m : tree.value("marked", json::array())) tm.marked.insert(m.get<int>());
      RibbonTreeMap::Anchor anchor;
      if (tree.contains("anchor")) {
        anchor.edge = tree.at("anchor").value("edge", -1);
        anchor.side = tree.at("anchor").value("side", 0);
      }
      tm.anchors.push_back(anchor);
    }
    for (const auto& [key, val] : j.at("F").at("vertex").items())
      tm.f_vertex.at(std::stoi(key)) = val.get<int>();
    if (j.contains("delta_v"))
      for (const auto& [key, val] : j.at("delta_v").items())
        tm.delta_v.at(std::stoi(key)) = BigInt(val.get<long>());
    if (j.contains("delta_e"))
      for (const auto& [key, val] : j.at("delta_e").items())
        tm.delta_e.at(std::stoi(key)) = BigInt(val.get<long>());
    if (j.contains("ribbon"))
      for (const auto& [key, val] : j.at("ribbon").items()) {
        std::vector<int> order;
        for (const auto& e : val) order.push_back(e.get<int>());
        tm.ribbon.at(std::stoi(key)) = order;
      }
    for (const auto& tree : j.at("trees"))
      if (tree.contains("ribbon"))
        for (const auto& [key, val] : tree.at("ribbon").items()) {
          std::vector<int> order;
          for (const auto& e : val) order.push_back(e.get<int>());
          tm.ribbon.at(std::stoi(key)) = order;
        }
    // Default ribbon: incident edges in index order.
    for (size_t v = 0; v < nv; ++v)
      if (tm.ribbon[v].empty())
        for (size_t e = 0; e < tm.edges.size(); ++e)
          if (tm.edges[e].first == static_cast<int>(v) ||
              tm.edges[e].second == static_cast<int>(v))
            tm.ribbon[v].push_back(static_cast<int>(e));
    for (int f : tm.f_vertex)
      if (f < 0) throw Error(ErrorKind::ParseError, "F.vertex incomplete");
    return tm;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("tree map: ") + e.what());
  }
}

// -------------------------------------------------------------- curve covers

inline CurveCover curve_cover_from_json(const json& j) {
  try {
    CurveCover cover;
    for (const auto& curve : j.at("curves")) {
      std::vector<CurveCover::Component> comps;
      for (const auto& c : curve) {
        CurveCover::Component comp;
        if (c.contains("isotopic_to") && !c.at("isotopic_to").is_null())
          comp.isotopic_to = c.at("isotopic_to").get<int>();
        comp.degree = BigInt(c.at("degree").get<long>());
        comps.push_back(comp);
      }
      cover.curves.push_back(comps);
    }
    return cover;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("curve cover: ") + e.what());
  }
}

// ----------------------------------------------------------- trees of spheres

inline TreeOfSpheres tree_of_spheres_from_json(const json& j) {
  try {
    TreeOfSpheres ts;
    size_t n = j.at("vertices").is_number() ? j.at("vertices").get<size_t>()
                                            : j.at("vertices").size();
    ts.f_vertex.assign(n, 0);
    ts.xi.resize(n);
    ts.maps.resize(n);
    for (const auto& e : j.value("edges", json::array()))
      ts.edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    for (const auto& [key, val] : j.at("F").items()) ts.f_vertex.at(std::stoi(key)) = val.get<int>();
    if (j.contains("xi"))
      for (const auto& [key, val] : j.at("xi").items()) {
        int a = std::stoi(key);
        for (const auto& [dir, pt] : val.items()) {
          SpherePoint p;
          if (pt.is_string() && pt.get<std::string>() == "inf")
            p = SpherePoint::infinity();
          else
            p = SpherePoint::at(Complex(pt.at(0).get<double>(), pt.at(1).get<double>()));
          ts.xi.at(a)[std::stoi(dir)] = p;
        }
      }
    auto read_poly = [](const json& arr) {
      Poly p;
      for (const auto& c : arr) p.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
      if (p.empty()) p.push_back(Complex(0));
      return p;
    };
    for (const auto& [key, val] : j.at("R").items()) {
      RatMap r;
      r.num = read_poly(val.at("num"));
      r.den = val.contains("den") ? read_poly(val.at("den")) : Poly{Complex(1)};
      ts.maps.at(std::stoi(key)) = r;
    }
    ts.degree = BigInt(j.at("degree").get<long>());
    return ts;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("tree of spheres: ") + e.what());
  }
}

// ------------------------------------------------------------------ verdicts

inline json verdict_to_json(const MatingVerdict& v) {
  json j;
  j["outcome"] = v.outcome == MatingVerdict::Outcome::Mateable ? "mateable" : "obstructed";
  j["depth"] = v.depth_used;
  if (v.certificate) {
    j["certificate"] = json::array();
    for (const auto& [a, b] : v.certificate->cycle) j["certificate"].push_back({a.str(), b.str()});
  } else {
    j["stabilized"] = v.report.stabilized;
    j["classes_plus"] = v.report.classes_plus;
    j["classes_minus"] = v.report.classes_minus;
  }
  return j;
}

}  // namespace qpcf::io
