#include "morph/vtk_io.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace morph {

void write_vtk(const SimplicialMesh& mesh, const std::vector<VtkField>& fields,
               const std::string& path) {
    const std::size_t nv = mesh.vertices.size();
    for (const VtkField& f : fields) {
        std::size_t n = f.is_vector ? f.vector.size() : f.scalar.size();
        if (n != nv)
            throw std::runtime_error("write_vtk: field '" + f.name + "' size does not match mesh");
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_vtk: cannot open '" + path + "'");
    out << std::setprecision(17);
    out << "# vtk DataFile Version 3.0\n";
    out << "morph mesh\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << nv << " double\n";
    for (const Vec& p : mesh.vertices) out << p.x << ' ' << p.y << ' ' << p.z << "\n";
    const int sz = mesh.cell_size();
    out << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * (sz + 1) << "\n";
    for (const auto& k : mesh.cells) {
        out << sz;
        for (int i = 0; i < sz; ++i) out << ' ' << k[i];
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.num_cells() << "\n";
    const int vtk_type = mesh.dim == 2 ? 5 : 10;  // triangle / tetra
    for (int c = 0; c < mesh.num_cells(); ++c) out << vtk_type << "\n";
    if (!fields.empty()) {
        out << "POINT_DATA " << nv << "\n";
        for (const VtkField& f : fields) {
            if (f.is_vector) {
                out << "VECTORS " << f.name << " double\n";
                for (const Vec& p : f.vector.v) out << p.x << ' ' << p.y << ' ' << p.z << "\n";
            } else {
                out << "SCALARS " << f.name << " double 1\n";
                out << "LOOKUP_TABLE default\n";
                for (double x : f.scalar.v) out << x << "\n";
            }
        }
    }
    if (!out) throw std::runtime_error("write_vtk: I/O failure writing '" + path + "'");
}

}  // namespace morph
