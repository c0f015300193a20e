// Copyright (c) 2026 The formgrad authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "formgrad/mesh.hpp"
#include "formgrad/space.hpp"

namespace formgrad {

/// Reads a mesh from a Gmsh MSH 2.2 ASCII file (.msh) or the native JSON
/// format (.json), dispatching on the extension.
///
/// MSH subset: $MeshFormat/$Nodes/$Elements, element types 1 (line) and
/// 2 (triangle), physical tags as boundary markers; z coordinates must be
/// zero. Clockwise triangles are reoriented.
std::shared_ptr<Mesh> read_mesh(const std::string& path);

std::shared_ptr<Mesh> read_msh(std::istream& in);
std::shared_ptr<Mesh> read_json_mesh(std::istream& in);

/// Native JSON mesh: {"vertices":[[x,y],...], "cells":[[i,j,k],...],
/// "facets":[[i,j,marker],...]}.
void write_json_mesh(std::ostream& out, const Mesh& mesh);
void write_json_mesh(const std::string& path, const Mesh& mesh);

/// Legacy VTK ASCII writer (DATASET UNSTRUCTURED_GRID). Scalar fields
/// become SCALARS point data, vector fields VECTORS with z = 0. P2 fields
/// are down-sampled to their vertex dofs. Output is deterministic.
void write_vtk(const std::string& path, const Mesh& mesh,
               std::span<const std::pair<std::string, const Function*>>
                   fields = {});

/// One value per line under a header row, printed with %.17g.
void write_csv_vector(const std::string& path, const std::string& header,
                      std::span<const double> values);

void write_csv_rows(const std::string& path, const std::string& header,
                    std::span<const std::vector<double>> rows);

std::string format_double(double v);  // %.17g

}  // namespace formgrad
