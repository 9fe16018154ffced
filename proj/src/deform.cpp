#include "morph/deform.hpp"

#include <cmath>
#include <stdexcept>

namespace morph {

ComponentDirichlet displacement_dirichlet(const SimplicialMesh& mesh, const VectorField& g,
                                          int design_marker) {
    if (g.size() != mesh.vertices.size())
        throw std::runtime_error("displacement_dirichlet: field size mismatch");
    // Classify boundary vertices by the strongest condition they touch:
    // design > far-field/other > symmetry-only.
    const int nv = mesh.num_vertices();
    std::vector<char> on_design(nv, 0), on_fixed(nv, 0);
    std::vector<Vec> sym_normal(nv);
    for (const Facet& f : mesh.boundary_facets) {
        for (int i = 0; i < mesh.facet_size(); ++i) {
            int v = f.v[i];
            if (f.marker == design_marker) {
                on_design[v] = 1;
            } else if (f.marker >= kMarkerSymmetry) {
                sym_normal[v] += mesh.facet_normal(f);
            } else {
                on_fixed[v] = 1;
            }
        }
    }
    ComponentDirichlet out;
    for (int v = 0; v < nv; ++v) {
        if (on_design[v]) {
            out[0].push_back({v, g[v].x});
            out[1].push_back({v, g[v].y});
        } else if (on_fixed[v]) {
            out[0].push_back({v, 0.0});
            out[1].push_back({v, 0.0});
        } else if (norm(sym_normal[v]) > 0.0) {
            Vec n = normalized(sym_normal[v]);
            int axis = std::abs(n.x) >= std::abs(n.y) ? 0 : 1;
            if (std::abs(n[axis]) < 0.99)
                throw std::runtime_error("displacement_dirichlet: symmetry plane must be axis-aligned");
            out[axis].push_back({v, 0.0});
        }
    }
    return out;
}

VectorField solve_displacement_system(const SimplicialMesh& mesh,
                                      const std::vector<double>& diffusion_cells,
                                      const std::vector<Vec>& wind_cells,
                                      const ComponentDirichlet& dirichlet, bool supg,
                                      const SolverConfig& solver, int threads) {
    if (mesh.dim != 2) throw std::runtime_error("solve_displacement_system: 2D meshes only");
    SparseOperator op =
        assemble_operator(mesh, diffusion_cells, wind_cells, nullptr, supg, nullptr, threads);

    std::array<std::vector<int>, 2> dofs;
    std::array<std::vector<double>, 2> vals;
    for (int comp = 0; comp < 2; ++comp)
        for (const auto& [v, x] : dirichlet[comp]) {
            dofs[comp].push_back(v);
            vals[comp].push_back(x);
        }

    VectorField out(mesh.vertices.size());
    const bool same_pattern = dofs[0] == dofs[1];
    DirichletSystem sys0 = make_dirichlet_system(op.matrix, dofs[0]);
    LinearSolver solver0(sys0.eliminated, solver);
    for (int comp = 0; comp < 2; ++comp) {
        const DirichletSystem* sys = &sys0;
        LinearSolver* lin = &solver0;
        DirichletSystem sys1;
        std::unique_ptr<LinearSolver> solver1;
        if (comp == 1 && !same_pattern) {
            sys1 = make_dirichlet_system(op.matrix, dofs[1]);
            solver1 = std::make_unique<LinearSolver>(sys1.eliminated, solver);
            sys = &sys1;
            lin = solver1.get();
        }
        std::vector<double> ordered(sys->dir_rows.size());
        {
            // align values with the deduplicated dof order
            std::vector<double> lookup(mesh.num_vertices(), 0.0);
            for (std::size_t i = 0; i < dofs[comp].size(); ++i) lookup[dofs[comp][i]] = vals[comp][i];
            for (std::size_t i = 0; i < sys->dir_rows.size(); ++i) ordered[i] = lookup[sys->dir_rows[i]];
        }
        std::vector<double> x = lin->solve(sys->apply_rhs(op.rhs, ordered));
        for (std::size_t i = 0; i < sys->dir_rows.size(); ++i) x[sys->dir_rows[i]] = ordered[i];
        for (int v = 0; v < mesh.num_vertices(); ++v) out[v][comp] = x[v];
    }
    return out;
}

VectorField solve_displacement(const SimplicialMesh& mesh, const ScalarField& eps1,
                               const ScalarField& eps2, const VectorField& g,
                               const DeformConfig& config) {
    if (static_cast<int>(eps1.size()) != mesh.num_vertices() ||
        static_cast<int>(eps2.size()) != mesh.num_vertices())
        throw std::runtime_error("solve_displacement: missing or mis-sized distance fields");
    const double diag = mesh.bbox_diagonal();
    const double beta = config.beta >= 0.0 ? config.beta : 10.0 / diag;
    const double floor = config.floor > 0.0 ? config.floor : 1e-6 * config.alpha * diag * diag;
    if (!(config.alpha > 0.0)) throw std::runtime_error("solve_displacement: alpha must be > 0");

    std::vector<double> diffusion = cell_average(mesh, eps1);
    for (double& d : diffusion) d = std::max(config.alpha * d * d, floor);
    std::vector<Vec> wind = wind_field(mesh, eps2);
    for (Vec& w : wind) w *= beta;

    ComponentDirichlet bc = displacement_dirichlet(mesh, g, config.design_marker);
    return solve_displacement_system(mesh, diffusion, wind, bc, config.supg, config.solver,
                                     config.threads);
}

VectorField laplace_displacement(const SimplicialMesh& mesh, const VectorField& g, double epsilon,
                                 const SolverConfig& solver, int design_marker, int threads) {
    if (!(epsilon > 0.0)) throw std::runtime_error("laplace_displacement: epsilon must be > 0");
    std::vector<double> diffusion(mesh.num_cells(), epsilon);
    ComponentDirichlet bc = displacement_dirichlet(mesh, g, design_marker);
    return solve_displacement_system(mesh, diffusion, {}, bc, false, solver, threads);
}

}  // namespace morph
