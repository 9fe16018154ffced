#include "morph/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace morph {

double SimplicialMesh::cell_volume(int c) const {
    const auto& k = cells[c];
    const Vec& a = vertices[k[0]];
    if (dim == 2) {
        return 0.5 * cross2(vertices[k[1]] - a, vertices[k[2]] - a);
    }
    return dot(cross(vertices[k[1]] - a, vertices[k[2]] - a), vertices[k[3]] - a) / 6.0;
}

Vec SimplicialMesh::cell_centroid(int c) const {
    const auto& k = cells[c];
    Vec s;
    for (int i = 0; i <= dim; ++i) s += vertices[k[i]];
    return s / static_cast<double>(dim + 1);
}

double SimplicialMesh::facet_measure(const Facet& f) const {
    if (dim == 2) return norm(vertices[f.v[1]] - vertices[f.v[0]]);
    return 0.5 * norm(cross(vertices[f.v[1]] - vertices[f.v[0]], vertices[f.v[2]] - vertices[f.v[0]]));
}

Vec SimplicialMesh::facet_centroid(const Facet& f) const {
    Vec s;
    for (int i = 0; i < dim; ++i) s += vertices[f.v[i]];
    return s / static_cast<double>(dim);
}

Vec SimplicialMesh::facet_normal(const Facet& f) const {
    if (dim == 2) return normalized(perp_cw(vertices[f.v[1]] - vertices[f.v[0]]));
    return normalized(cross(vertices[f.v[1]] - vertices[f.v[0]], vertices[f.v[2]] - vertices[f.v[0]]));
}

double SimplicialMesh::total_volume() const {
    double s = 0.0;
    for (int c = 0; c < num_cells(); ++c) s += cell_volume(c);
    return s;
}

Vec SimplicialMesh::centroid() const {
    Vec s;
    double vol = 0.0;
    for (int c = 0; c < num_cells(); ++c) {
        double w = cell_volume(c);
        s += cell_centroid(c) * w;
        vol += w;
    }
    return s / vol;
}

double SimplicialMesh::bbox_diagonal() const {
    Vec lo{std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
           std::numeric_limits<double>::max()};
    Vec hi = -lo;
    for (const Vec& p : vertices) {
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    }
    return norm(hi - lo);
}

namespace {

using FacetKey = std::array<int, 3>;

FacetKey facet_key(const int* v, int n) {
    FacetKey k{-1, -1, -1};
    for (int i = 0; i < n; ++i) k[i] = v[i];
    std::sort(k.begin(), k.begin() + n);
    return k;
}

// Facets of cell c in outward orientation. For a positively oriented 2D cell
// (a,b,c) these are the directed edges (a,b),(b,c),(c,a); for a positive tet
// the faces (1,2,3),(0,3,2),(0,1,3),(0,2,1).
void cell_facets(const SimplicialMesh& mesh, int c, std::vector<std::array<int, 3>>& out) {
    const auto& k = mesh.cells[c];
    out.clear();
    if (mesh.dim == 2) {
        out.push_back({k[0], k[1], -1});
        out.push_back({k[1], k[2], -1});
        out.push_back({k[2], k[0], -1});
    } else {
        out.push_back({k[1], k[2], k[3]});
        out.push_back({k[0], k[3], k[2]});
        out.push_back({k[0], k[1], k[3]});
        out.push_back({k[0], k[2], k[1]});
    }
}

// All facets incident to exactly one cell, outward-oriented, marker unset.
// Throws if any facet is shared by more than two cells.
std::vector<Facet> computed_boundary(const SimplicialMesh& mesh) {
    std::map<FacetKey, std::pair<int, std::array<int, 3>>> count;  // key -> (count, oriented)
    std::vector<std::array<int, 3>> fs;
    for (int c = 0; c < mesh.num_cells(); ++c) {
        cell_facets(mesh, c, fs);
        for (const auto& f : fs) {
            FacetKey key = facet_key(f.data(), mesh.facet_size());
            auto [it, fresh] = count.try_emplace(key, std::make_pair(0, f));
            it->second.first += 1;
            if (it->second.first > 2)
                throw std::runtime_error("mesh: facet shared by more than two cells (non-manifold)");
        }
    }
    std::vector<Facet> out;
    for (const auto& [key, val] : count) {
        if (val.first == 1) {
            Facet f;
            f.v = val.second;
            out.push_back(f);
        }
    }
    return out;
}

}  // namespace

void SimplicialMesh::validate() const {
    if (dim != 2 && dim != 3) throw std::runtime_error("mesh: dim must be 2 or 3");
    const int nv = num_vertices();
    for (const Vec& p : vertices)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
            throw std::runtime_error("mesh: non-finite vertex coordinate");
    for (int c = 0; c < num_cells(); ++c) {
        for (int i = 0; i <= dim; ++i) {
            int v = cells[c][i];
            if (v < 0 || v >= nv)
                throw std::runtime_error("mesh: cell " + std::to_string(c) + " references vertex " +
                                         std::to_string(v) + " out of range");
        }
        if (cell_volume(c) <= 0.0)
            throw std::runtime_error("mesh: cell " + std::to_string(c) + " has non-positive volume");
    }
    std::map<FacetKey, int> markers;
    for (const Facet& f : boundary_facets) {
        for (int i = 0; i < dim; ++i) {
            if (f.v[i] < 0 || f.v[i] >= nv) throw std::runtime_error("mesh: facet vertex out of range");
        }
        auto key = facet_key(f.v.data(), facet_size());
        if (!markers.emplace(key, f.marker).second)
            throw std::runtime_error("mesh: duplicate boundary facet");
    }
    std::vector<Facet> expect = computed_boundary(*this);
    if (expect.size() != boundary_facets.size())
        throw std::runtime_error("mesh: boundary facet list does not match facets incident to one cell");
    for (const Facet& f : expect) {
        if (markers.find(facet_key(f.v.data(), facet_size())) == markers.end())
            throw std::runtime_error("mesh: boundary facet without marker entry");
    }
}

bool BoundaryComplex::vertex_only_on_marker(int vid, int marker) const {
    int li = local_index[vid];
    if (li < 0) return false;
    for (int fi : patches[li])
        if (facets[fi].marker != marker) return false;
    return true;
}

void BoundaryComplex::refresh_normals() {
    for (int li = 0; li < num_boundary_vertices(); ++li)
        normals[li] = vertex_normal(*this, boundary_vertices[li]);
}

BoundaryComplex boundary_complex(const SimplicialMesh& mesh) {
    // Parity check: stored facets must be exactly the ones incident to one cell.
    std::vector<Facet> expect = computed_boundary(mesh);
    if (expect.size() != mesh.boundary_facets.size())
        throw std::runtime_error("boundary_complex: boundary not closed (facet parity violation)");

    BoundaryComplex bc;
    bc.mesh = &mesh;
    bc.facets = mesh.boundary_facets;
    bc.local_index.assign(mesh.num_vertices(), -1);
    for (const Facet& f : bc.facets)
        for (int i = 0; i < mesh.dim; ++i) bc.local_index[f.v[i]] = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (bc.local_index[v] == 0) {
            bc.local_index[v] = static_cast<int>(bc.boundary_vertices.size());
            bc.boundary_vertices.push_back(v);
        }
    bc.patches.resize(bc.boundary_vertices.size());
    for (int fi = 0; fi < static_cast<int>(bc.facets.size()); ++fi)
        for (int i = 0; i < mesh.dim; ++i) bc.patches[bc.local_index[bc.facets[fi].v[i]]].push_back(fi);
    for (const auto& p : bc.patches)
        if (p.empty()) throw std::runtime_error("boundary_complex: empty vertex patch");
    bc.normals.resize(bc.boundary_vertices.size());
    bc.refresh_normals();
    return bc;
}

Vec vertex_normal(const BoundaryComplex& boundary, int vid) {
    int li = boundary.local_index[vid];
    if (li < 0) throw std::runtime_error("vertex_normal: not a boundary vertex");
    const SimplicialMesh& mesh = *boundary.mesh;
    Vec acc;
    for (int fi : boundary.patches[li]) {
        const Facet& f = boundary.facets[fi];
        acc += mesh.facet_normal(f) * mesh.facet_measure(f);
    }
    double len = norm(acc);
    if (len < 1e-14) throw std::runtime_error("vertex_normal: degenerate (opposing facets average to zero)");
    return acc / len;
}

double discrete_curvature(const BoundaryComplex& boundary, int vid) {
    const SimplicialMesh& mesh = *boundary.mesh;
    if (mesh.dim != 2) throw std::runtime_error("discrete_curvature: 2D polylines only");
    int li = boundary.local_index[vid];
    if (li < 0) throw std::runtime_error("discrete_curvature: not a boundary vertex");
    const auto& patch = boundary.patches[li];
    if (patch.size() != 2) throw std::runtime_error("discrete_curvature: vertex is not on a simple polyline");
    // Incoming facet ends at vid, outgoing starts at vid (facets are oriented).
    const Facet* in = nullptr;
    const Facet* out = nullptr;
    for (int fi : patch) {
        const Facet& f = boundary.facets[fi];
        if (f.v[1] == vid) in = &f;
        if (f.v[0] == vid) out = &f;
    }
    if (!in || !out) throw std::runtime_error("discrete_curvature: inconsistent facet orientation at vertex");
    Vec d1 = mesh.vertices[vid] - mesh.vertices[in->v[0]];
    Vec d2 = mesh.vertices[out->v[1]] - mesh.vertices[vid];
    double l1 = norm(d1), l2 = norm(d2);
    if (l1 < 1e-300 || l2 < 1e-300) throw std::runtime_error("discrete_curvature: zero-length adjacent edge");
    double angle = std::atan2(cross2(d1, d2), dot(d1, d2));
    return angle / (0.5 * (l1 + l2));
}

SimplicialMesh apply_displacement(const SimplicialMesh& mesh, const VectorField& v) {
    if (v.size() != mesh.vertices.size())
        throw std::runtime_error("apply_displacement: field size does not match vertex count");
    SimplicialMesh out = mesh;
    for (std::size_t i = 0; i < out.vertices.size(); ++i) out.vertices[i] += v[i];
    return out;
}

namespace {

// Interior angles of a positive-volume cell, in degrees. For tets these are
// the face angles of all four triangular faces.
void cell_angles(const SimplicialMesh& mesh, int c, double& amin, double& amax) {
    amin = 360.0;
    amax = 0.0;
    const auto& k = mesh.cells[c];
    auto corner = [&](int a, int b, int d) {
        Vec u = mesh.vertices[b] - mesh.vertices[a];
        Vec w = mesh.vertices[d] - mesh.vertices[a];
        double cs = dot(u, w) / (norm(u) * norm(w));
        cs = std::clamp(cs, -1.0, 1.0);
        double ang = std::acos(cs) * 180.0 / M_PI;
        amin = std::min(amin, ang);
        amax = std::max(amax, ang);
    };
    if (mesh.dim == 2) {
        corner(k[0], k[1], k[2]);
        corner(k[1], k[2], k[0]);
        corner(k[2], k[0], k[1]);
    } else {
        const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
        for (const auto& f : faces) {
            corner(k[f[0]], k[f[1]], k[f[2]]);
            corner(k[f[1]], k[f[2]], k[f[0]]);
            corner(k[f[2]], k[f[0]], k[f[1]]);
        }
    }
}

// Longest edge over inradius, scaled so the regular simplex scores 1.
double cell_aspect(const SimplicialMesh& mesh, int c) {
    const auto& k = mesh.cells[c];
    double lmax = 0.0;
    for (int i = 0; i <= mesh.dim; ++i)
        for (int j = i + 1; j <= mesh.dim; ++j)
            lmax = std::max(lmax, norm(mesh.vertices[k[i]] - mesh.vertices[k[j]]));
    double vol = mesh.cell_volume(c);
    if (vol <= 0.0) return std::numeric_limits<double>::infinity();
    if (mesh.dim == 2) {
        double per = 0.0;
        const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
        for (const auto& ed : e) per += norm(mesh.vertices[k[ed[0]]] - mesh.vertices[k[ed[1]]]);
        double rin = 2.0 * vol / per;
        return lmax / (2.0 * std::sqrt(3.0) * rin);
    }
    double area = 0.0;
    const int faces[4][3] = {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}};
    for (const auto& f : faces)
        area += 0.5 * norm(cross(mesh.vertices[k[f[1]]] - mesh.vertices[k[f[0]]],
                                 mesh.vertices[k[f[2]]] - mesh.vertices[k[f[0]]]));
    double rin = 3.0 * vol / area;
    return lmax / (2.0 * std::sqrt(6.0) * rin);
}

}  // namespace

QualityReport quality_report(const SimplicialMesh& mesh, int threads) {
    const int nc = mesh.num_cells();
    std::vector<double> vol(nc), amin(nc), amax(nc), aspect(nc);
    (void)threads;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 1 ? threads : 1) if (threads > 1)
#endif
    for (int c = 0; c < nc; ++c) {
        vol[c] = mesh.cell_volume(c);
        if (vol[c] > 0.0) {
            cell_angles(mesh, c, amin[c], amax[c]);
            aspect[c] = cell_aspect(mesh, c);
        } else {
            amin[c] = 360.0;
            amax[c] = 0.0;
            aspect[c] = std::numeric_limits<double>::infinity();
        }
    }
    QualityReport q;
    q.min_signed_volume = std::numeric_limits<double>::max();
    q.max_signed_volume = -q.min_signed_volume;
    q.min_angle_deg = 360.0;
    for (int c = 0; c < nc; ++c) {
        q.min_signed_volume = std::min(q.min_signed_volume, vol[c]);
        q.max_signed_volume = std::max(q.max_signed_volume, vol[c]);
        if (vol[c] <= 0.0) {
            ++q.inverted_cells;
            continue;
        }
        q.min_angle_deg = std::min(q.min_angle_deg, amin[c]);
        q.max_angle_deg = std::max(q.max_angle_deg, amax[c]);
        q.worst_aspect_ratio = std::max(q.worst_aspect_ratio, aspect[c]);
    }

    // Boundary edge statistics. In 3D the unique edges of the boundary triangles.
    std::vector<double> lens;
    if (mesh.dim == 2) {
        for (const Facet& f : mesh.boundary_facets) lens.push_back(mesh.facet_measure(f));
    } else {
        std::map<std::pair<int, int>, bool> seen;
        for (const Facet& f : mesh.boundary_facets) {
            const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
            for (const auto& ed : e) {
                int a = f.v[ed[0]], b = f.v[ed[1]];
                if (a > b) std::swap(a, b);
                if (seen.emplace(std::make_pair(a, b), true).second)
                    lens.push_back(norm(mesh.vertices[a] - mesh.vertices[b]));
            }
        }
    }
    if (!lens.empty()) {
        EdgeStats& e = q.boundary_edges;
        e.min = std::numeric_limits<double>::max();
        for (double l : lens) {
            e.min = std::min(e.min, l);
            e.max = std::max(e.max, l);
            e.mean += l;
        }
        e.mean /= static_cast<double>(lens.size());
        double var = 0.0;
        for (double l : lens) var += (l - e.mean) * (l - e.mean);
        var /= static_cast<double>(lens.size());
        e.rel_stddev = std::sqrt(var) / e.mean;
    }
    return q;
}

}  // namespace morph
