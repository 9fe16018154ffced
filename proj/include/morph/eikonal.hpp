#pragma once

#include <vector>

#include "morph/fem.hpp"
#include "morph/mesh.hpp"

namespace morph {

struct EikonalConfig {
    double h = -1.0;  // regularization length; < 0: 0.05 x bbox diagonal
    int dirichlet_marker = kMarkerDesign;
    SolverConfig solver;
    enum class InitialGuess { GraphDistance, Zero };
    InitialGuess initial_guess = InitialGuess::GraphDistance;
    bool supg = true;
    int threads = 1;
};

// Dijkstra distance along mesh edges from the given source vertices. Also the
// test oracle bounding the regularized solution from above.
std::vector<double> graph_distance(const SimplicialMesh& mesh, const std::vector<int>& sources);

// Vertices lying on facets with the given marker.
std::vector<int> marker_vertices(const SimplicialMesh& mesh, int marker);

// Damped Newton solve of the regularized Eikonal equation
//   -h lap(eps) + |grad eps|^2 = 1,  eps = 0 on the marked region,
// natural conditions elsewhere, discretized with P1/SUPG elements. The sign
// convention makes eps a nonnegative travel time to the marked region.
ScalarField solve_eikonal(const SimplicialMesh& mesh, const EikonalConfig& config);

// Exact P1 gradient of a vertex field, one vector per cell.
std::vector<Vec> wind_field(const SimplicialMesh& mesh, const ScalarField& eps);

}  // namespace morph
