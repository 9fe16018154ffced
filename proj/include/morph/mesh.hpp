#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "morph/geom.hpp"

namespace morph {

// Boundary region markers. Overridable per call site; these are the file
// conventions used by the generators and the CLI.
enum Marker : int {
    kMarkerDesign = 1,    // design surface (the shape being optimized)
    kMarkerFarField = 2,  // fixed outer boundary
    kMarkerSymmetry = 3,  // symmetry planes (3 and above)
};

struct Facet {
    std::array<int, 3> v{-1, -1, -1};  // v[2] unused in 2D
    int marker = 0;
};

// Simplicial mesh: triangles in 2D, tetrahedra in 3D. Cells are stored with
// positive signed volume under the global orientation convention; boundary
// facets are oriented so their normal points out of the domain.
struct SimplicialMesh {
    int dim = 2;
    std::vector<Vec> vertices;
    std::vector<std::array<int, 4>> cells;  // cells[c][3] == -1 in 2D
    std::vector<Facet> boundary_facets;

    int cell_size() const { return dim + 1; }
    int facet_size() const { return dim; }
    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_cells() const { return static_cast<int>(cells.size()); }

    // Signed volume (area in 2D) of cell c.
    double cell_volume(int c) const;
    Vec cell_centroid(int c) const;
    double facet_measure(const Facet& f) const;
    Vec facet_centroid(const Facet& f) const;
    // Unit normal of an oriented boundary facet, pointing out of the domain.
    Vec facet_normal(const Facet& f) const;

    double total_volume() const;
    Vec centroid() const;
    // Bounding box diagonal, used to scale default tolerances.
    double bbox_diagonal() const;

    // Throws std::runtime_error on any violated invariant (index ranges,
    // orientation, facet parity, marker coverage).
    void validate() const;
};

struct ScalarField {
    std::vector<double> v;

    ScalarField() = default;
    explicit ScalarField(std::size_t n, double fill = 0.0) : v(n, fill) {}
    double& operator[](std::size_t i) { return v[i]; }
    double operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

struct VectorField {
    std::vector<Vec> v;

    VectorField() = default;
    explicit VectorField(std::size_t n) : v(n) {}
    Vec& operator[](std::size_t i) { return v[i]; }
    const Vec& operator[](std::size_t i) const { return v[i]; }
    std::size_t size() const { return v.size(); }
};

// Extracted boundary of a mesh: facets with markers, per-vertex one-ring
// facet patches and outward unit normals.
struct BoundaryComplex {
    const SimplicialMesh* mesh = nullptr;
    std::vector<Facet> facets;            // same order as mesh->boundary_facets
    std::vector<int> boundary_vertices;   // sorted global vertex ids
    std::vector<int> local_index;         // global vertex id -> local id, -1 if interior
    std::vector<std::vector<int>> patches;  // local id -> incident facet ids
    std::vector<Vec> normals;               // local id -> outward unit normal

    int num_boundary_vertices() const { return static_cast<int>(boundary_vertices.size()); }
    bool is_boundary_vertex(int vid) const { return local_index[vid] >= 0; }
    const Vec& normal_of(int vid) const { return normals[local_index[vid]]; }
    // True if every facet incident to the vertex carries the given marker.
    bool vertex_only_on_marker(int vid, int marker) const;
    // Recompute all vertex normals from current vertex positions.
    void refresh_normals();
};

struct EdgeStats {
    double min = 0.0, max = 0.0, mean = 0.0, rel_stddev = 0.0;
};

struct QualityReport {
    double min_signed_volume = 0.0;
    double max_signed_volume = 0.0;
    double min_angle_deg = 0.0;  // over cells with positive volume
    double max_angle_deg = 0.0;
    double worst_aspect_ratio = 0.0;  // longest edge / inradius-scaled, >= 1 scaled to equilateral
    int inverted_cells = 0;
    EdgeStats boundary_edges;
};

BoundaryComplex boundary_complex(const SimplicialMesh& mesh);

// Outward unit normal at a boundary vertex: facet-measure-weighted average of
// incident facet normals, renormalized.
Vec vertex_normal(const BoundaryComplex& boundary, int vid);

// Signed curvature of a 2D boundary polyline at a vertex: turning angle
// divided by half the sum of the adjacent edge lengths. Positive where the
// domain is locally convex.
double discrete_curvature(const BoundaryComplex& boundary, int vid);

// New mesh with identical connectivity and vertices x + v(x). Validity of the
// result is the caller's problem (see quality_report).
SimplicialMesh apply_displacement(const SimplicialMesh& mesh, const VectorField& v);

QualityReport quality_report(const SimplicialMesh& mesh, int threads = 1);

}  // namespace morph
