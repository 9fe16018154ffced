#pragma once

#include <string>
#include <vector>

#include "morph/mesh.hpp"

namespace morph {

// A named point-data field for VTK output. Exactly one of scalar/vector is used.
struct VtkField {
    std::string name;
    ScalarField scalar;
    VectorField vector;
    bool is_vector = false;

    static VtkField make_scalar(std::string name, ScalarField f) {
        VtkField v;
        v.name = std::move(name);
        v.scalar = std::move(f);
        return v;
    }
    static VtkField make_vector(std::string name, VectorField f) {
        VtkField v;
        v.name = std::move(name);
        v.vector = std::move(f);
        v.is_vector = true;
        return v;
    }
};

// Legacy ASCII VTK unstructured grid with POINT_DATA blocks in the given
// order. Coordinates and values are written with 17 significant digits.
void write_vtk(const SimplicialMesh& mesh, const std::vector<VtkField>& fields,
               const std::string& path);

}  // namespace morph
