#pragma once

#include <vector>

#include "morph/mesh.hpp"

namespace morph {

// Positive vertex density, interpolated linearly over cells/facets. Clustering
// is prescribed by larger values.
struct DensityField {
    enum class Mode { Uniform, UserSupplied, SpacingPreserving };
    Mode mode = Mode::Uniform;
    ScalarField rho;  // per mesh vertex

    static DensityField uniform(const SimplicialMesh& mesh);
    static DensityField user(const SimplicialMesh& mesh, ScalarField rho);
    // rho_i * |patch_i| constant over the current boundary, so repair keeps
    // the entry spacing profile instead of equalizing it.
    static DensityField spacing_preserving(const BoundaryComplex& boundary);
};

struct RepairConfig {
    double tol = -1.0;  // < 0: 1e-3 x mean movable boundary edge length
    int max_iter = 100;
    int design_marker = kMarkerDesign;
    int threads = 1;
};

struct RepairResult {
    VectorField tau;  // accumulated boundary displacement, full vertex indexing
    std::vector<double> badness_history;  // surface badness before sweep 1, then after each sweep
    int iterations = 0;
    bool converged = false;
    // max |<offset, n>| over all sweeps and vertices, offsets measured against
    // the normals of the sweep that produced them
    double max_tangency_defect = 0.0;
};

// Volume mesh badness: sum over vertices of the rho-weighted squared distance
// integral over the primal one-ring patch. Evaluated with degree-3 quadrature
// (exact: the integrand is cubic for linear rho).
double badness_volume(const SimplicialMesh& mesh, const DensityField& rho, int threads = 1);
double badness_volume_serial(const SimplicialMesh& mesh, const DensityField& rho);

// Offset of p relative to origin, projected into the tangent plane of unit
// normal n: (p - origin) - <p - origin, n> n.
Vec tangent_project(const Vec& p, const Vec& origin, const Vec& n);

// Surface badness: like badness_volume but over boundary vertex patches with
// tangent-plane-projected distances (normal held fixed per vertex).
double badness_surface(const BoundaryComplex& boundary, const DensityField& rho, int threads = 1);
double badness_surface_serial(const BoundaryComplex& boundary, const DensityField& rho);

// rho-weighted tangent-plane centroid of the vertex patch, returned as a
// point x_i + tangential offset.
Vec cvt_target(const BoundaryComplex& boundary, int vid, const DensityField& rho);

// Jacobi sweeps moving design-surface vertices to their tangent-plane patch
// centroids until the largest offset drops below tol. Normals are recomputed
// once per sweep and frozen within it; vertices touching non-design markers
// are held fixed; connectivity is never modified.
RepairResult repair_loop(SimplicialMesh& mesh, const DensityField& rho, RepairConfig config = {});

}  // namespace morph
