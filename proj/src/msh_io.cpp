#include "morph/msh_io.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace morph {

namespace {

struct LineReader {
    std::ifstream in;
    int lineno = 0;

    explicit LineReader(const std::string& path) : in(path) {}

    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++lineno;
            // tolerate CRLF
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("msh parse error line " + std::to_string(lineno) + ": " + msg);
    }
};

std::array<int, 3> sorted_key(const int* v, int n) {
    std::array<int, 3> k{-1, -1, -1};
    for (int i = 0; i < n; ++i) k[i] = v[i];
    std::sort(k.begin(), k.begin() + n);
    return k;
}

}  // namespace

SimplicialMesh load_msh(const std::string& path) {
    LineReader rd(path);
    if (!rd.in) throw std::runtime_error("load_msh: cannot open '" + path + "'");

    std::string line;
    std::vector<Vec> nodes;
    std::unordered_map<long long, int> node_index;  // gmsh id -> 0-based
    struct Elem {
        int type;
        int marker;
        std::array<int, 4> v;
    };
    std::vector<Elem> lines_e, tris_e, tets_e;
    bool saw_format = false, saw_nodes = false, saw_elems = false;

    while (rd.next(line)) {
        if (line == "$MeshFormat") {
            if (!rd.next(line)) rd.fail("unexpected end of file in $MeshFormat");
            std::istringstream ss(line);
            double version = 0.0;
            int file_type = -1, data_size = 0;
            if (!(ss >> version >> file_type >> data_size)) rd.fail("bad $MeshFormat header");
            if (version < 2.0 || version >= 3.0 || file_type != 0)
                rd.fail("unsupported MSH format (need ASCII 2.2)");
            if (!rd.next(line) || line != "$EndMeshFormat") rd.fail("missing $EndMeshFormat");
            saw_format = true;
        } else if (line == "$Nodes") {
            if (!rd.next(line)) rd.fail("unexpected end of file in $Nodes");
            long long n = 0;
            {
                std::istringstream ss(line);
                if (!(ss >> n) || n < 0) rd.fail("bad node count");
            }
            nodes.reserve(static_cast<std::size_t>(n));
            for (long long i = 0; i < n; ++i) {
                if (!rd.next(line)) rd.fail("unexpected end of file in $Nodes");
                std::istringstream ss(line);
                long long id;
                double x, y, z;
                if (!(ss >> id >> x >> y >> z)) rd.fail("bad node line");
                if (!node_index.emplace(id, static_cast<int>(nodes.size())).second)
                    rd.fail("duplicate node id " + std::to_string(id));
                nodes.push_back({x, y, z});
            }
            if (!rd.next(line) || line != "$EndNodes") rd.fail("missing $EndNodes");
            saw_nodes = true;
        } else if (line == "$Elements") {
            if (!rd.next(line)) rd.fail("unexpected end of file in $Elements");
            long long n = 0;
            {
                std::istringstream ss(line);
                if (!(ss >> n) || n < 0) rd.fail("bad element count");
            }
            for (long long i = 0; i < n; ++i) {
                if (!rd.next(line)) rd.fail("unexpected end of file in $Elements");
                std::istringstream ss(line);
                long long id;
                int type, ntags;
                if (!(ss >> id >> type >> ntags)) rd.fail("bad element line");
                int marker = 0;
                for (int t = 0; t < ntags; ++t) {
                    int tag;
                    if (!(ss >> tag)) rd.fail("bad element tags");
                    if (t == 0) marker = tag;
                }
                int nverts = type == 1 ? 2 : type == 2 ? 3 : type == 4 ? 4 : -1;
                if (nverts < 0) rd.fail("unsupported element type " + std::to_string(type));
                Elem e{type, marker, {-1, -1, -1, -1}};
                for (int k = 0; k < nverts; ++k) {
                    long long nid;
                    if (!(ss >> nid)) rd.fail("bad element connectivity");
                    auto it = node_index.find(nid);
                    if (it == node_index.end())
                        rd.fail("dangling vertex reference " + std::to_string(nid));
                    e.v[k] = it->second;
                }
                (type == 1 ? lines_e : type == 2 ? tris_e : tets_e).push_back(e);
            }
            if (!rd.next(line) || line != "$EndElements") rd.fail("missing $EndElements");
            saw_elems = true;
        } else if (!line.empty() && line[0] == '$') {
            // skip unknown section up to its matching end tag
            std::string end = "$End" + line.substr(1);
            while (rd.next(line) && line != end) {
            }
        }
    }
    if (!saw_format) throw std::runtime_error("load_msh: missing $MeshFormat");
    if (!saw_nodes || !saw_elems) throw std::runtime_error("load_msh: missing $Nodes or $Elements");

    SimplicialMesh mesh;
    mesh.vertices = std::move(nodes);
    const std::vector<Elem>* cell_src = nullptr;
    const std::vector<Elem>* facet_src = nullptr;
    if (!tets_e.empty()) {
        mesh.dim = 3;
        cell_src = &tets_e;
        facet_src = &tris_e;
    } else if (!tris_e.empty()) {
        mesh.dim = 2;
        cell_src = &tris_e;
        facet_src = &lines_e;
    } else {
        throw std::runtime_error("load_msh: no triangle or tetrahedron elements");
    }

    mesh.cells.reserve(cell_src->size());
    for (const Elem& e : *cell_src) mesh.cells.push_back(e.v);
    // Orientation normalization: external meshers disagree on winding.
    for (int c = 0; c < mesh.num_cells(); ++c)
        if (mesh.cell_volume(c) < 0.0) std::swap(mesh.cells[c][0], mesh.cells[c][1]);
    for (int c = 0; c < mesh.num_cells(); ++c)
        if (mesh.cell_volume(c) <= 0.0)
            throw std::runtime_error("load_msh: degenerate cell " + std::to_string(c));

    // Markers for the computed boundary come from the marked facet elements.
    std::map<std::array<int, 3>, int> marker_of;
    for (const Elem& e : *facet_src) {
        auto key = sorted_key(e.v.data(), mesh.facet_size());
        auto [it, fresh] = marker_of.emplace(key, e.marker);
        if (!fresh && it->second != e.marker)
            throw std::runtime_error("load_msh: boundary facet with conflicting markers");
    }

    // Reuse validate()'s facet machinery by building oriented boundary facets here.
    SimplicialMesh probe = mesh;  // boundary_facets still empty
    std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> count;
    auto add = [&](std::array<int, 3> f, int nfv) {
        auto key = sorted_key(f.data(), nfv);
        auto [it, fresh] = count.try_emplace(key, std::make_pair(0, f));
        it->second.first += 1;
        if (it->second.first > 2) throw std::runtime_error("load_msh: non-manifold boundary");
    };
    for (const auto& k : mesh.cells) {
        if (mesh.dim == 2) {
            add({k[0], k[1], -1}, 2);
            add({k[1], k[2], -1}, 2);
            add({k[2], k[0], -1}, 2);
        } else {
            add({k[1], k[2], k[3]}, 3);
            add({k[0], k[3], k[2]}, 3);
            add({k[0], k[1], k[3]}, 3);
            add({k[0], k[2], k[1]}, 3);
        }
    }
    for (const auto& [key, val] : count) {
        if (val.first != 1) continue;
        auto it = marker_of.find(key);
        if (it == marker_of.end())
            throw std::runtime_error("load_msh: boundary facet without marker element");
        Facet f;
        f.v = val.second;
        f.marker = it->second;
        mesh.boundary_facets.push_back(f);
        marker_of.erase(it);
    }
    if (!marker_of.empty())
        throw std::runtime_error("load_msh: marked facet element is not on the boundary");

    mesh.validate();
    return mesh;
}

void write_msh(const SimplicialMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_msh: cannot open '" + path + "'");
    out << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n";
    out << std::setprecision(17);
    out << "$Nodes\n" << mesh.num_vertices() << "\n";
    for (int i = 0; i < mesh.num_vertices(); ++i) {
        const Vec& p = mesh.vertices[i];
        out << (i + 1) << ' ' << p.x << ' ' << p.y << ' ' << p.z << "\n";
    }
    out << "$EndNodes\n$Elements\n";
    out << (mesh.boundary_facets.size() + mesh.cells.size()) << "\n";
    long long id = 1;
    int ftype = mesh.dim == 2 ? 1 : 2;
    for (const Facet& f : mesh.boundary_facets) {
        out << id++ << ' ' << ftype << " 2 " << f.marker << ' ' << f.marker;
        for (int i = 0; i < mesh.facet_size(); ++i) out << ' ' << (f.v[i] + 1);
        out << "\n";
    }
    int ctype = mesh.dim == 2 ? 2 : 4;
    for (const auto& k : mesh.cells) {
        out << id++ << ' ' << ctype << " 2 0 0";
        for (int i = 0; i < mesh.cell_size(); ++i) out << ' ' << (k[i] + 1);
        out << "\n";
    }
    out << "$EndElements\n";
    if (!out) throw std::runtime_error("write_msh: I/O failure writing '" + path + "'");
}

}  // namespace morph
