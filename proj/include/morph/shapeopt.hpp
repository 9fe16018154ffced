#pragma once

#include <functional>
#include <string>
#include <vector>

#include "morph/cvt.hpp"
#include "morph/deform.hpp"
#include "morph/eikonal.hpp"
#include "morph/fem.hpp"
#include "morph/mesh.hpp"

namespace morph {

struct Constraints {
    bool volume = false;
    bool centroid = false;
    bool symmetry = false;  // pin normal displacement at symmetry-marked vertices
    // mirror-pair symmetrization planes: (axis index, plane coordinate)
    std::vector<std::pair<int, double>> mirror_axes;
};

// One of the three generic shape functionals with analytic integrand data.
struct ObjectiveSpec {
    enum class Kind { VolumeIntegral, BoundaryIntegral, FluxIntegral };
    Kind kind = Kind::VolumeIntegral;
    std::function<double(const Vec&)> f;       // integrand for volume/boundary kinds
    std::function<Vec(const Vec&)> grad_f;     // spatial gradient of f (boundary kernel)
    std::function<Vec(const Vec&)> f3;         // flux integrand
    std::function<double(const Vec&)> div_f3;  // its analytic divergence
    Constraints constraints;
    int design_marker = kMarkerDesign;

    static ObjectiveSpec volume_integral(std::function<double(const Vec&)> f);
    static ObjectiveSpec boundary_integral(std::function<double(const Vec&)> f,
                                           std::function<Vec(const Vec&)> grad_f);
    static ObjectiveSpec flux_integral(std::function<Vec(const Vec&)> f3,
                                       std::function<double(const Vec&)> div_f3);
    static ObjectiveSpec perimeter();  // boundary integrand 1
};

struct IterationRecord {
    int iter = 0;
    double objective = 0.0;
    double volume = 0.0;
    double badness = 0.0;
    double min_angle = 0.0;
    int inverted = 0;
    double step_norm = 0.0;
    int repair_iters = 0;
};

struct RunHistory {
    std::vector<IterationRecord> records;
    bool converged = false;
};

struct DriverConfig {
    double delta = -1.0;  // Sobolev weight; < 0: 10 x (mean design edge)^2
    double step = 0.1;    // initial step scale per iteration
    double armijo_c = 1e-4;
    int max_backtracks = 20;
    double grad_tol_rel = 1e-4;  // vs the first iteration's gradient norm
    int max_iterations = 100;
    RepairConfig repair;
    EikonalConfig eikonal;
    DeformConfig deform;
    SolverConfig solver;
    int threads = 1;
    std::string history_csv;  // write per-iteration records when nonempty
    std::string vtk_prefix;   // write <prefix><iter>.vtk snapshots when nonempty
};

double eval_objective(const SimplicialMesh& mesh, const ObjectiveSpec& spec);

// Scalar Hadamard kernel g on boundary vertices (local indexing), zero off
// the design surface. J2 requires 2D (discrete curvature).
std::vector<double> hadamard_kernel(const BoundaryComplex& boundary, const ObjectiveSpec& spec);

// Boundary quadrature of <V, n> g with vertex normals, so tangential fields
// integrate to exactly zero.
double directional_derivative(const BoundaryComplex& boundary, const std::vector<double>& g,
                              const VectorField& V);

// Solve (delta lap_G + I) d2 = -d1 on the boundary.
std::vector<double> sobolev_smooth(const BoundaryComplex& boundary, const std::vector<double>& d1,
                                   double delta, const SolverConfig& solver = {});

// First-order constraint projection in the boundary mass inner product.
std::vector<double> project_constraints(const BoundaryComplex& boundary, std::vector<double> d2,
                                        const ObjectiveSpec& spec);

struct StepOutcome {
    SimplicialMesh mesh;
    IterationRecord record;
    double grad_norm = 0.0;
    bool at_optimum = false;
};

// One iteration: kernel, smoothing, projection, provisional normal update,
// CVT repair, Eikonal solves, convection deformation, quality-checked Armijo
// backtracking, exact volume rescale. volume_target is the V0 to restore;
// grad_stop is an absolute gradient norm below which the step is skipped.
StepOutcome optimize_step(const SimplicialMesh& mesh, const ObjectiveSpec& spec,
                          const DriverConfig& config, double volume_target, double grad_stop = 0.0);

struct OptimizeOutcome {
    SimplicialMesh mesh;
    RunHistory history;
};

OptimizeOutcome run_optimize(SimplicialMesh mesh, const ObjectiveSpec& spec,
                             const DriverConfig& config);

void write_history_csv(const RunHistory& history, const std::string& path);

}  // namespace morph
