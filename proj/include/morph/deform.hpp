#pragma once

#include <array>
#include <vector>

#include "morph/fem.hpp"
#include "morph/mesh.hpp"

namespace morph {

struct DeformConfig {
    double alpha = 1.0;   // diffusivity weight
    double beta = -1.0;   // convection weight; < 0: 10 / bbox diagonal
    double floor = -1.0;  // minimum diffusivity; < 0: 1e-6 * alpha * diagonal^2
    bool supg = true;
    SolverConfig solver;
    int design_marker = kMarkerDesign;
    int threads = 1;
};

// Componentwise Dirichlet data: for each spatial component a set of
// (vertex, value) pairs; unconstrained components get natural conditions.
using ComponentDirichlet = std::array<DirichletSet, 2>;

// Dirichlet data for a displacement solve: d3 on design vertices, zero on all
// other boundaries, except that vertices only on symmetry facets are free to
// slide in-plane (only the plane-normal component is pinned to zero; planes
// must be axis-aligned).
ComponentDirichlet displacement_dirichlet(const SimplicialMesh& mesh, const VectorField& g,
                                          int design_marker);

// Shared componentwise scalar solve of
//   -div(D grad v_k) + div(v_k w) = 0
// with the given per-component Dirichlet sets. Components with identical
// constrained dof sets share one factorization.
VectorField solve_displacement_system(const SimplicialMesh& mesh,
                                      const std::vector<double>& diffusion_cells,
                                      const std::vector<Vec>& wind_cells,
                                      const ComponentDirichlet& dirichlet, bool supg,
                                      const SolverConfig& solver, int threads = 1);

// Eikonal-convection deformation: diffusivity max(alpha eps1^2, floor), wind
// beta grad(eps2), boundary displacement g on the design surface.
VectorField solve_displacement(const SimplicialMesh& mesh, const ScalarField& eps1,
                               const ScalarField& eps2, const VectorField& g,
                               const DeformConfig& config);

// Componentwise Laplacian baseline with the same boundary data.
VectorField laplace_displacement(const SimplicialMesh& mesh, const VectorField& g, double epsilon,
                                 const SolverConfig& solver = {},
                                 int design_marker = kMarkerDesign, int threads = 1);

}  // namespace morph
