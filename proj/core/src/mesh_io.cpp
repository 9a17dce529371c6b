#include "polydg/error.hpp"
#include "polydg/mesh.hpp"

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace polydg {

using nlohmann::json;

namespace {

const json& require(const json& obj, const char* key, const std::string& where) {
  POLYDG_THROW_IF(!obj.is_object() || !obj.contains(key), ValidationError,
                  fmt::format("{}: missing key '{}'", where, key));
  return obj.at(key);
}

}  // namespace

PolyMesh parse_mesh_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(fmt::format("mesh file is not valid JSON: {}", e.what()));
  }
  const auto& jv = require(doc, "vertices", "mesh");
  const auto& jc = require(doc, "cells", "mesh");
  POLYDG_THROW_IF(!jv.is_array() || !jc.is_array(), ValidationError, "mesh: 'vertices' and 'cells' must be arrays");

  std::vector<Vec2> vertices;
  vertices.reserve(jv.size());
  for (std::size_t i = 0; i < jv.size(); ++i) {
    const auto& p = jv[i];
    POLYDG_THROW_IF(!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number(), ValidationError,
                    fmt::format("vertex {}: expected [x, y]", i));
    vertices.emplace_back(p[0].get<double>(), p[1].get<double>());
  }

  std::vector<CellSpec> cells;
  std::vector<std::size_t> untagged;
  for (std::size_t i = 0; i < jc.size(); ++i) {
    const auto& c = jc[i];
    const auto& verts = require(c, "verts", fmt::format("cell {}", i));
    CellSpec spec;
    for (const auto& v : verts) {
      POLYDG_THROW_IF(!v.is_number_integer(), ValidationError, fmt::format("cell {}: vertex ids must be integers", i));
      spec.vertices.push_back(v.get<int>());
    }
    if (!c.contains("region")) {
      untagged.push_back(i);
    } else {
      const auto r = c.at("region").get<std::string>();
      POLYDG_THROW_IF(r != "p" && r != "f", ValidationError,
                      fmt::format("cell {}: region must be \"p\" or \"f\", got \"{}\"", i, r));
      spec.region = r == "p" ? Region::Poro : Region::Fluid;
    }
    cells.push_back(std::move(spec));
  }
  if (!untagged.empty()) {
    std::string list;
    for (std::size_t k = 0; k < untagged.size(); ++k) list += (k ? ", " : "") + std::to_string(untagged[k]);
    throw ValidationError(fmt::format("cells without region tag: {}", list));
  }

  std::map<std::pair<int, int>, FaceTag> tags;
  if (doc.contains("boundary_tags")) {
    for (const auto& t : doc.at("boundary_tags")) {
      const auto& e = require(t, "edge", "boundary_tags entry");
      POLYDG_THROW_IF(!e.is_array() || e.size() != 2, ValidationError, "boundary_tags entry: 'edge' must be [i, j]");
      const int a = e[0].get<int>();
      const int b = e[1].get<int>();
      tags[{std::min(a, b), std::max(a, b)}] = face_tag_from_string(require(t, "tag", "boundary_tags entry").get<std::string>());
    }
  }
  auto classify = [&tags](const Face& f, Region) {
    const int a = f.vertex_ids[0];
    const int b = f.vertex_ids[1];
    auto it = tags.find({std::min(a, b), std::max(a, b)});
    POLYDG_THROW_IF(it == tags.end(), ValidationError,
                    fmt::format("face ({},{}): no boundary tag (unclassifiable face)", a, b));
    return it->second;
  };
  return PolyMesh::build(std::move(vertices), std::move(cells), classify);
}

PolyMesh load_mesh(const std::filesystem::path& path) {
  std::ifstream in(path);
  POLYDG_THROW_IF(!in, ValidationError, fmt::format("cannot open mesh file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_mesh_json(ss.str());
}

std::string mesh_to_json(const PolyMesh& mesh) {
  // Hand-written so doubles always carry 17 significant digits.
  std::string out = "{\n  \"vertices\": [";
  const auto& vs = mesh.vertices();
  for (std::size_t i = 0; i < vs.size(); ++i)
    out += fmt::format("{}\n    [{:.17g}, {:.17g}]", i ? "," : "", vs[i].x(), vs[i].y());
  out += "\n  ],\n  \"cells\": [";
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& cell = mesh.cell(c);
    out += fmt::format("{}\n    {{\"verts\": [{}], \"region\": \"{}\"}}", c ? "," : "",
                       fmt::join(cell.vertices, ", "), to_string(cell.region));
  }
  out += "\n  ],\n  \"boundary_tags\": [";
  bool first = true;
  for (const auto& f : mesh.faces()) {
    if (!f.is_boundary()) continue;
    out += fmt::format("{}\n    {{\"edge\": [{}, {}], \"tag\": \"{}\"}}", first ? "" : ",", f.vertex_ids[0],
                       f.vertex_ids[1], to_string(f.tag));
    first = false;
  }
  out += "\n  ]\n}\n";
  return out;
}

void save_mesh(const PolyMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  POLYDG_THROW_IF(!out, Error, fmt::format("cannot write mesh file '{}'", path.string()));
  out << mesh_to_json(mesh);
}

}  // namespace polydg
