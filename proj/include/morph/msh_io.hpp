#pragma once

#include <string>

#include "morph/mesh.hpp"

namespace morph {

// Reads an ASCII Gmsh MSH 2.2 file. Supported element types: 1 (line),
// 2 (triangle), 4 (tetrahedron); the first element tag is the physical
// marker. Cell orientation is normalized to positive signed volume and the
// marked lower-dimensional elements must cover the boundary exactly.
SimplicialMesh load_msh(const std::string& path);

// Writes the mesh back out in the same MSH 2.2 subset.
void write_msh(const SimplicialMesh& mesh, const std::string& path);

}  // namespace morph
