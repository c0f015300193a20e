// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

// Writes the structured fixture meshes (unit square, quarter annulus,
// channel) in the native JSON format.

#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include "formgrad/io.hpp"
#include "formgrad/mesh.hpp"

int main(int argc, char** argv) {
  CLI::App app{"formgrad-meshgen: structured mesh fixtures"};
  std::string kind = "unit-square";
  std::string out = "mesh.json";
  int n = 16, nx = 0, ny = 0;
  app.add_option("kind", kind, "unit-square | annulus | channel")
      ->check(CLI::IsMember({"unit-square", "annulus", "channel"}));
  app.add_option("--n", n, "Subdivisions (unit square: n x n)");
  app.add_option("--nx", nx, "First direction subdivisions");
  app.add_option("--ny", ny, "Second direction subdivisions");
  app.add_option("--out", out, "Output path (.json)");
  CLI11_PARSE(app, argc, argv);

  try {
    std::shared_ptr<formgrad::Mesh> mesh;
    if (kind == "unit-square")
      mesh = formgrad::unit_square_mesh(n);
    else if (kind == "annulus")
      mesh = formgrad::annulus_sector_mesh(nx > 0 ? nx : n, ny > 0 ? ny : n);
    else
      mesh = formgrad::channel_mesh(nx > 0 ? nx : 3 * n, ny > 0 ? ny : n);
    formgrad::write_json_mesh(out, *mesh);
    std::printf("wrote %s (%d vertices, %d cells)\n", out.c_str(),
                mesh->num_vertices(), mesh->num_cells());
    return 0;
  } catch (const formgrad::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
