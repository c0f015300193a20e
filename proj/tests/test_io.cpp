// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "formgrad/assemble.hpp"
#include "formgrad/cases.hpp"
#include "formgrad/io.hpp"
#include "formgrad/space.hpp"

using namespace formgrad;

#ifndef FORMGRAD_FIXTURE_DIR
#define FORMGRAD_FIXTURE_DIR "."
#endif

namespace {
std::string fixture(const std::string& name) {
  return std::string(FORMGRAD_FIXTURE_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}
}  // namespace

TEST_CASE("MSH: two-triangle unit square fixture") {
  auto mesh = read_mesh(fixture("square_2tri.msh"));
  CHECK(mesh->num_vertices() == 4);
  CHECK(mesh->num_cells() == 2);
  CHECK(mesh->exterior_facets().size() == 4);
  CHECK(mesh->boundary_markers() == std::vector<int>{1, 2, 3, 4});
  CHECK(assemble_scalar(volume_form(mesh)) == doctest::Approx(1.0));
  CHECK(validate_mesh(*mesh) > 0.0);
}

TEST_CASE("MSH: clockwise triangles are reoriented") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
      "$Elements\n1\n1 2 2 10 1 1 3 2\n$EndElements\n");
  auto mesh = read_msh(in);
  CHECK(validate_mesh(*mesh) > 0.0);
}

TEST_CASE("MSH: unsupported element type is an error") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n4\n1 0 0 0\n2 1 0 0\n3 1 1 0\n4 0 1 0\n$EndNodes\n"
      "$Elements\n1\n1 3 2 10 1 1 2 3 4\n$EndElements\n");  // type 3 = quad
  CHECK_THROWS_AS(read_msh(in), IOError);
}

TEST_CASE("MSH: non-zero z coordinate is an error") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0.5\n$EndNodes\n"
      "$Elements\n1\n1 2 2 10 1 1 2 3\n$EndElements\n");
  CHECK_THROWS_AS(read_msh(in), IOError);
}

TEST_CASE("MSH: malformed section is an error") {
  std::istringstream in("$MeshFormat\n4.1 0 8\n$EndMeshFormat\n");
  CHECK_THROWS_AS(read_msh(in), IOError);
}

TEST_CASE("MSH: unknown sections are skipped") {
  std::istringstream in(
      "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n"
      "$PhysicalNames\n1\n1 1 \"wall\"\n$EndPhysicalNames\n"
      "$Nodes\n3\n1 0 0 0\n2 1 0 0\n3 0 1 0\n$EndNodes\n"
      "$Elements\n2\n1 15 2 1 1 1\n2 2 2 10 1 1 2 3\n$EndElements\n");
  auto mesh = read_msh(in);
  CHECK(mesh->num_cells() == 1);
  CHECK(mesh->num_vertices() == 3);
}

TEST_CASE("JSON mesh round trip is structurally identical") {
  auto mesh = annulus_sector_mesh(3, 4);
  std::ostringstream out;
  write_json_mesh(out, *mesh);
  std::istringstream in(out.str());
  auto back = read_json_mesh(in);

  CHECK(back->num_vertices() == mesh->num_vertices());
  CHECK(back->cells() == mesh->cells());
  CHECK(back->coordinates() == mesh->coordinates());
  REQUIRE(back->exterior_facets().size() == mesh->exterior_facets().size());
  for (std::size_t i = 0; i < mesh->exterior_facets().size(); ++i) {
    CHECK(back->exterior_facets()[i].marker ==
          mesh->exterior_facets()[i].marker);
    CHECK(back->exterior_facets()[i].v0 == mesh->exterior_facets()[i].v0);
    CHECK(back->exterior_facets()[i].v1 == mesh->exterior_facets()[i].v1);
  }
}

TEST_CASE("VTK writer") {
  auto mesh = unit_square_mesh(2);

  SUBCASE("geometry-only file") {
    write_vtk("io_test_geom.vtk", *mesh);
    const std::string text = slurp("io_test_geom.vtk");
    CHECK(text.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    CHECK(text.find("POINTS 9 double") != std::string::npos);
    CHECK(text.find("CELLS 8 32") != std::string::npos);
    CHECK(text.find("POINT_DATA") == std::string::npos);
  }

  SUBCASE("scalar P1 and vector fields") {
    auto space = FunctionSpace::create(mesh, 1, 1);
    Function u(space, "u");
    interpolate(component(spatial_coordinate(), 0), u);
    Function V(mesh->coordinate_space(), "V");
    interpolate(spatial_coordinate(), V);

    const std::vector<std::pair<std::string, const Function*>> fields{
        {"u", &u}, {"V", &V}};
    write_vtk("io_test_fields.vtk", *mesh, fields);
    const std::string text = slurp("io_test_fields.vtk");
    CHECK(text.find("POINT_DATA 9") != std::string::npos);
    CHECK(text.find("SCALARS u double 1") != std::string::npos);
    CHECK(text.find("VECTORS V double") != std::string::npos);
    // Vector lines carry a zero z component.
    CHECK(text.find("1 1 0") != std::string::npos);
  }

  SUBCASE("P2 fields are down-sampled to vertices") {
    auto space = FunctionSpace::create(mesh, 2, 1);
    Function u(space, "u");
    interpolate(component(spatial_coordinate(), 1), u);
    const std::vector<std::pair<std::string, const Function*>> fields{
        {"u", &u}};
    write_vtk("io_test_p2.vtk", *mesh, fields);
    const std::string text = slurp("io_test_p2.vtk");
    CHECK(text.find("POINT_DATA 9") != std::string::npos);
  }
}

TEST_CASE("CSV writers are deterministic") {
  const std::vector<double> values{1.0, -0.5, 1.0 / 3.0};
  write_csv_vector("io_test_a.csv", "dJ", values);
  write_csv_vector("io_test_b.csv", "dJ", values);
  CHECK(slurp("io_test_a.csv") == slurp("io_test_b.csv"));
  CHECK(slurp("io_test_a.csv").substr(0, 3) == "dJ\n");
}

TEST_CASE("read_mesh dispatches on extension") {
  CHECK_THROWS_AS(read_mesh("nonexistent.msh"), IOError);
  CHECK_THROWS_AS(read_mesh("bad_extension.xyz"), IOError);
}
