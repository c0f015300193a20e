// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#include "formgrad/io.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace formgrad {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string next_content_line(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    // Strip CR and surrounding whitespace.
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
      line.pop_back();
    std::size_t start = 0;
    while (start < line.size() && line[start] == ' ') ++start;
    if (start < line.size()) return line.substr(start);
  }
  throw IOError("MSH: unexpected end of file");
}

std::shared_ptr<Mesh> build_mesh(
    std::vector<Vec2> vertices, std::vector<std::array<int, 3>> cells,
    const std::vector<std::array<int, 3>>& facet_markers) {
  // Reorient clockwise triangles; the Mesh invariant is det(DF) > 0.
  for (auto& c : cells) {
    const Vec2 a = vertices[static_cast<std::size_t>(c[0])];
    const Vec2 b = vertices[static_cast<std::size_t>(c[1])];
    const Vec2 d = vertices[static_cast<std::size_t>(c[2])];
    const double det =
        (b[0] - a[0]) * (d[1] - a[1]) - (d[0] - a[0]) * (b[1] - a[1]);
    if (det < 0.0) std::swap(c[1], c[2]);
  }
  return Mesh::create(vertices, std::move(cells), facet_markers);
}

}  // namespace

std::shared_ptr<Mesh> read_msh(std::istream& in) {
  std::string line = next_content_line(in);
  if (line != "$MeshFormat") throw IOError("MSH: expected $MeshFormat");
  {
    std::istringstream fmt(next_content_line(in));
    double version = 0.0;
    int file_type = -1, data_size = 0;
    fmt >> version >> file_type >> data_size;
    if (!fmt || version < 2.0 || version >= 3.0 || file_type != 0)
      throw IOError("MSH: only ASCII MSH 2.x is supported");
  }
  if (next_content_line(in) != "$EndMeshFormat")
    throw IOError("MSH: expected $EndMeshFormat");

  std::vector<Vec2> vertices;
  std::map<long, int> node_index;
  std::vector<std::array<int, 3>> cells;
  std::vector<std::array<int, 3>> facet_markers;

  while (true) {
    std::string section;
    try {
      section = next_content_line(in);
    } catch (const IOError&) {
      break;  // end of file
    }
    if (section == "$Nodes") {
      const int n = std::stoi(next_content_line(in));
      for (int i = 0; i < n; ++i) {
        std::istringstream row(next_content_line(in));
        long id = 0;
        double x = 0, y = 0, z = 0;
        row >> id >> x >> y >> z;
        if (!row) throw IOError("MSH: malformed node line");
        if (std::abs(z) > 1e-12)
          throw IOError("MSH: node " + std::to_string(id) +
                        " has non-zero z coordinate " + format_double(z));
        node_index[id] = static_cast<int>(vertices.size());
        vertices.push_back({x, y});
      }
      if (next_content_line(in) != "$EndNodes")
        throw IOError("MSH: expected $EndNodes");
    } else if (section == "$Elements") {
      const int n = std::stoi(next_content_line(in));
      for (int i = 0; i < n; ++i) {
        std::istringstream row(next_content_line(in));
        long id = 0;
        int type = 0, ntags = 0;
        row >> id >> type >> ntags;
        if (!row) throw IOError("MSH: malformed element line");
        int physical = 0;
        for (int t = 0; t < ntags; ++t) {
          int tag = 0;
          row >> tag;
          if (t == 0) physical = tag;
        }
        const auto node = [&](long nid) {
          const auto it = node_index.find(nid);
          if (it == node_index.end())
            throw IOError("MSH: element references unknown node " +
                          std::to_string(nid));
          return it->second;
        };
        if (type == 1) {  // 2-node line: boundary marker
          long a = 0, b = 0;
          row >> a >> b;
          if (!row) throw IOError("MSH: malformed line element");
          facet_markers.push_back({node(a), node(b), physical});
        } else if (type == 2) {  // 3-node triangle
          long a = 0, b = 0, c = 0;
          row >> a >> b >> c;
          if (!row) throw IOError("MSH: malformed triangle element");
          cells.push_back({node(a), node(b), node(c)});
        } else if (type == 15) {  // point elements are ignored
          continue;
        } else {
          throw IOError("MSH: unsupported element type " +
                        std::to_string(type) +
                        " (only lines and triangles are supported)");
        }
      }
      if (next_content_line(in) != "$EndElements")
        throw IOError("MSH: expected $EndElements");
    } else if (section.rfind("$End", 0) == 0) {
      continue;
    } else if (!section.empty() && section[0] == '$') {
      // Skip unknown sections ($PhysicalNames and friends).
      const std::string end = "$End" + section.substr(1);
      while (next_content_line(in) != end) {
      }
    } else {
      throw IOError("MSH: unexpected content '" + section + "'");
    }
  }

  if (cells.empty()) throw IOError("MSH: no triangles found");
  try {
    return build_mesh(std::move(vertices), std::move(cells), facet_markers);
  } catch (const Error& e) {
    throw IOError(std::string("MSH: ") + e.what());
  }
}

std::shared_ptr<Mesh> read_json_mesh(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw IOError(std::string("JSON mesh: parse error: ") + e.what());
  }
  try {
    std::vector<Vec2> vertices;
    for (const auto& v : j.at("vertices"))
      vertices.push_back({v.at(0).get<double>(), v.at(1).get<double>()});
    std::vector<std::array<int, 3>> cells;
    for (const auto& c : j.at("cells"))
      cells.push_back(
          {c.at(0).get<int>(), c.at(1).get<int>(), c.at(2).get<int>()});
    std::vector<std::array<int, 3>> facets;
    if (j.contains("facets"))
      for (const auto& f : j.at("facets"))
        facets.push_back(
            {f.at(0).get<int>(), f.at(1).get<int>(), f.at(2).get<int>()});
    return build_mesh(std::move(vertices), std::move(cells), facets);
  } catch (const nlohmann::json::exception& e) {
    throw IOError(std::string("JSON mesh: ") + e.what());
  } catch (const Error& e) {
    throw IOError(std::string("JSON mesh: ") + e.what());
  }
}

std::shared_ptr<Mesh> read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IOError("cannot open mesh file '" + path + "'");
  if (path.size() >= 4 && path.substr(path.size() - 4) == ".msh")
    return read_msh(in);
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json")
    return read_json_mesh(in);
  throw IOError("unknown mesh format for '" + path +
                "' (expected .msh or .json)");
}

void write_json_mesh(std::ostream& out, const Mesh& mesh) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    const Vec2 x = mesh.vertex(v);
    j["vertices"].push_back({x[0], x[1]});
  }
  j["cells"] = nlohmann::json::array();
  for (const auto& c : mesh.cells()) j["cells"].push_back({c[0], c[1], c[2]});
  j["facets"] = nlohmann::json::array();
  for (const auto& f : mesh.exterior_facets())
    j["facets"].push_back({f.v0, f.v1, f.marker});
  out << j.dump(2) << "\n";
}

void write_json_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  write_json_mesh(out, mesh);
}

void write_vtk(const std::string& path, const Mesh& mesh,
               std::span<const std::pair<std::string, const Function*>> fields) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot open '" + path + "' for writing");

  const int nv = mesh.num_vertices();
  out << "# vtk DataFile Version 3.0\n";
  out << "formgrad output\n";
  out << "ASCII\n";
  out << "DATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << nv << " double\n";
  for (int v = 0; v < nv; ++v) {
    const Vec2 x = mesh.vertex(v);
    out << format_double(x[0]) << " " << format_double(x[1]) << " 0\n";
  }
  const int nc = mesh.num_cells();
  out << "CELLS " << nc << " " << 4 * nc << "\n";
  for (const auto& c : mesh.cells())
    out << "3 " << c[0] << " " << c[1] << " " << c[2] << "\n";
  out << "CELL_TYPES " << nc << "\n";
  for (int c = 0; c < nc; ++c) out << "5\n";

  if (fields.empty()) return;
  out << "POINT_DATA " << nv << "\n";
  for (const auto& [name, f] : fields) {
    const auto& space = f->space();
    if (&space.mesh() != &mesh)
      throw IOError("write_vtk: field '" + name +
                    "' lives on a different mesh");
    const auto& dofs = f->dofs();
    const int vs = space.value_size();
    // P2 fields down-sample to the vertex dof block.
    if (vs == 1) {
      out << "SCALARS " << name << " double 1\n";
      out << "LOOKUP_TABLE default\n";
      for (int v = 0; v < nv; ++v)
        out << format_double(dofs[static_cast<std::size_t>(v)]) << "\n";
    } else {
      out << "VECTORS " << name << " double\n";
      for (int v = 0; v < nv; ++v)
        out << format_double(dofs[static_cast<std::size_t>(2 * v)]) << " "
            << format_double(dofs[static_cast<std::size_t>(2 * v + 1)])
            << " 0\n";
    }
  }
}

void write_csv_vector(const std::string& path, const std::string& header,
                      std::span<const double> values) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out << header << "\n";
  for (double v : values) out << format_double(v) << "\n";
}

void write_csv_rows(const std::string& path, const std::string& header,
                    std::span<const std::vector<double>> rows) {
  std::ofstream out(path);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out << header << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out << (i ? "," : "") << format_double(row[i]);
    out << "\n";
  }
}

}  // namespace formgrad
