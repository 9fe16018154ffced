#include "morph/fem.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace morph {

std::vector<double> cell_average(const SimplicialMesh& mesh, const ScalarField& f) {
    if (static_cast<int>(f.size()) != mesh.num_vertices())
        throw std::runtime_error("cell_average: field size mismatch");
    std::vector<double> out(mesh.num_cells());
    for (int c = 0; c < mesh.num_cells(); ++c) {
        double s = 0.0;
        for (int i = 0; i <= mesh.dim; ++i) s += f[mesh.cells[c][i]];
        out[c] = s / (mesh.dim + 1);
    }
    return out;
}

double supg_tau(double h, double wind_norm, double diffusion) {
    if (wind_norm <= 0.0) return diffusion > 0.0 ? h * h / (12.0 * diffusion) : 0.0;
    if (diffusion <= 0.0) return h / (2.0 * wind_norm);
    const double pe = wind_norm * h / (2.0 * diffusion);
    if (pe < 1e-6) return h * h / (12.0 * diffusion);
    double xi;
    if (pe < 0.02) {
        // series for coth(pe) - 1/pe, avoids cancellation
        xi = pe / 3.0 - pe * pe * pe / 45.0 + 2.0 * std::pow(pe, 5) / 945.0;
    } else {
        xi = 1.0 / std::tanh(pe) - 1.0 / pe;
    }
    return h / (2.0 * wind_norm) * xi;
}

namespace {

struct ElemContrib {
    double ke[3][3];
    double fe[3];
};

// P1 shape function gradients and area of triangle c.
void p1_gradients(const SimplicialMesh& mesh, int c, Vec grad[3], double& area) {
    const auto& k = mesh.cells[c];
    const Vec& p0 = mesh.vertices[k[0]];
    const Vec& p1 = mesh.vertices[k[1]];
    const Vec& p2 = mesh.vertices[k[2]];
    area = 0.5 * cross2(p1 - p0, p2 - p0);
    const double s = 1.0 / (2.0 * area);
    auto rot = [](const Vec& e) { return Vec{-e.y, e.x, 0.0}; };  // +90 degrees
    grad[0] = rot(p2 - p1) * s;
    grad[1] = rot(p0 - p2) * s;
    grad[2] = rot(p1 - p0) * s;
}

double cell_longest_edge(const SimplicialMesh& mesh, int c) {
    const auto& k = mesh.cells[c];
    double w = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            w = std::max(w, norm(mesh.vertices[k[i]] - mesh.vertices[k[j]]));
    return w;
}

}  // namespace

double supg_cell_length(const SimplicialMesh& mesh, int c, const Vec& unit_wind) {
    const auto& k = mesh.cells[c];
    double w = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j)
            w = std::max(w, std::abs(dot(mesh.vertices[k[i]] - mesh.vertices[k[j]], unit_wind)));
    if (w <= 0.0) w = cell_longest_edge(mesh, c);
    return w;
}

SparseOperator assemble_operator(const SimplicialMesh& mesh,
                                 const std::vector<double>& diffusion_cells,
                                 const std::vector<Vec>& wind_cells, const ScalarField* reaction,
                                 bool supg, const ScalarField* source, int threads) {
    if (mesh.dim != 2) throw std::runtime_error("assemble_operator: 2D triangle meshes only");
    const int nc = mesh.num_cells();
    const int nv = mesh.num_vertices();
    if (static_cast<int>(diffusion_cells.size()) != nc)
        throw std::runtime_error("assemble_operator: diffusion coefficient size mismatch");
    if (!wind_cells.empty() && static_cast<int>(wind_cells.size()) != nc)
        throw std::runtime_error("assemble_operator: wind size mismatch");
    if (reaction && static_cast<int>(reaction->size()) != nv)
        throw std::runtime_error("assemble_operator: reaction size mismatch");
    if (source && static_cast<int>(source->size()) != nv)
        throw std::runtime_error("assemble_operator: source size mismatch");

    std::vector<ElemContrib> elems(nc);
    std::vector<int> bad(nc, 0);
    (void)threads;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads > 1 ? threads : 1) if (threads > 1)
#endif
    for (int c = 0; c < nc; ++c) {
        ElemContrib& e = elems[c];
        Vec g[3];
        double area;
        p1_gradients(mesh, c, g, area);
        if (!(area > 0.0)) {
            bad[c] = 1;
            continue;
        }
        const double diff = diffusion_cells[c];
        if (diff < 0.0) {
            bad[c] = 2;
            continue;
        }
        const auto& k = mesh.cells[c];
        const Vec wind = wind_cells.empty() ? Vec{} : wind_cells[c];
        const double wn = norm(wind);
        double rcell = 0.0;
        if (reaction) rcell = ((*reaction)[k[0]] + (*reaction)[k[1]] + (*reaction)[k[2]]) / 3.0;
        double tau = 0.0;
        if (supg && wn > 0.0) tau = supg_tau(supg_cell_length(mesh, c, wind / wn), wn, diff);
        double wg[3];  // w . grad(phi_j)
        for (int j = 0; j < 3; ++j) wg[j] = dot(wind, g[j]);
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                double v = diff * area * dot(g[i], g[j]);           // diffusion
                v += wg[j] * area / 3.0;                            // convection, phi_i integrates to A/3
                v += rcell * area * (i == j ? 2.0 : 1.0) / 12.0;    // reaction mass
                if (tau > 0.0) v += tau * area * wg[i] * (wg[j] + rcell / 3.0);
                e.ke[i][j] = v;
            }
            e.fe[i] = 0.0;
        }
        if (source) {
            double fv[3] = {(*source)[k[0]], (*source)[k[1]], (*source)[k[2]]};
            double fbar = (fv[0] + fv[1] + fv[2]) / 3.0;
            for (int i = 0; i < 3; ++i) {
                double v = 0.0;
                for (int j = 0; j < 3; ++j) v += area * (i == j ? 2.0 : 1.0) / 12.0 * fv[j];
                if (tau > 0.0) v += tau * area * wg[i] * fbar;
                e.fe[i] = v;
            }
        }
    }
    for (int c = 0; c < nc; ++c) {
        if (bad[c] == 1) throw std::runtime_error("assemble_operator: degenerate cell " + std::to_string(c));
        if (bad[c] == 2) throw std::runtime_error("assemble_operator: negative diffusion in cell " + std::to_string(c));
    }

    CsrBuilder builder(nv);
    builder.reserve(static_cast<std::size_t>(nc) * 9);
    SparseOperator op;
    op.rhs.assign(nv, 0.0);
    for (int c = 0; c < nc; ++c) {
        const auto& k = mesh.cells[c];
        const ElemContrib& e = elems[c];
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) builder.add(k[i], k[j], e.ke[i][j]);
            op.rhs[k[i]] += e.fe[i];
        }
    }
    op.matrix = builder.finalize();
    return op;
}

SparseOperator assemble_boundary_operator(const BoundaryComplex& boundary, double delta) {
    if (delta < 0.0) throw std::runtime_error("assemble_boundary_operator: delta must be >= 0");
    const SimplicialMesh& mesh = *boundary.mesh;
    const int n = boundary.num_boundary_vertices();

    if (mesh.dim == 2) {
        for (const auto& patch : boundary.patches)
            if (patch.size() != 2)
                throw std::runtime_error("assemble_boundary_operator: open boundary component");
    } else {
        std::map<std::pair<int, int>, int> edge_count;
        for (const Facet& f : boundary.facets) {
            const int e[3][2] = {{0, 1}, {1, 2}, {2, 0}};
            for (const auto& ed : e) {
                int a = f.v[ed[0]], b = f.v[ed[1]];
                if (a > b) std::swap(a, b);
                edge_count[{a, b}] += 1;
            }
        }
        for (const auto& [edge, cnt] : edge_count)
            if (cnt != 2) throw std::runtime_error("assemble_boundary_operator: open boundary component");
    }

    CsrBuilder builder(n);
    for (const Facet& f : boundary.facets) {
        if (mesh.dim == 2) {
            int a = boundary.local_index[f.v[0]];
            int b = boundary.local_index[f.v[1]];
            double len = mesh.facet_measure(f);
            double kst = delta / len;
            // delta * 1D stiffness + segment mass
            builder.add(a, a, kst + len / 3.0);
            builder.add(b, b, kst + len / 3.0);
            builder.add(a, b, -kst + len / 6.0);
            builder.add(b, a, -kst + len / 6.0);
        } else {
            int li[3] = {boundary.local_index[f.v[0]], boundary.local_index[f.v[1]],
                         boundary.local_index[f.v[2]]};
            const Vec& p0 = mesh.vertices[f.v[0]];
            const Vec& p1 = mesh.vertices[f.v[1]];
            const Vec& p2 = mesh.vertices[f.v[2]];
            double area = mesh.facet_measure(f);
            // cotangent Laplace-Beltrami on the flat triangle
            auto cot = [](const Vec& u, const Vec& w) { return dot(u, w) / norm(cross(u, w)); };
            double c0 = cot(p1 - p0, p2 - p0);  // angle at p0, opposite edge (1,2)
            double c1 = cot(p0 - p1, p2 - p1);
            double c2 = cot(p0 - p2, p1 - p2);
            double off[3][3] = {};
            off[1][2] = off[2][1] = -0.5 * c0;
            off[0][2] = off[2][0] = -0.5 * c1;
            off[0][1] = off[1][0] = -0.5 * c2;
            for (int i = 0; i < 3; ++i) {
                double diag = 0.0;
                for (int j = 0; j < 3; ++j) {
                    if (i == j) continue;
                    builder.add(li[i], li[j], delta * off[i][j] + area / 12.0);
                    diag -= off[i][j];
                }
                builder.add(li[i], li[i], delta * diag + area / 6.0);
            }
        }
    }
    SparseOperator op;
    op.matrix = builder.finalize();
    op.rhs.assign(n, 0.0);
    return op;
}

// ---------------------------------------------------------------------------

using SpMat = Eigen::SparseMatrix<double>;

namespace {

SpMat to_eigen(const CsrMatrix& m) {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(m.vals.size());
    for (int i = 0; i < m.n; ++i)
        for (int k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k)
            trip.emplace_back(i, m.cols[k], m.vals[k]);
    SpMat a(m.n, m.n);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();
    return a;
}

}  // namespace

struct LinearSolver::Impl {
    SolverConfig config;
    SpMat a;
    Eigen::SparseLU<SpMat> lu;
    Eigen::BiCGSTAB<SpMat, Eigen::IncompleteLUT<double>> bicg;
};

LinearSolver::LinearSolver(const CsrMatrix& matrix, const SolverConfig& config)
    : impl_(std::make_unique<Impl>()) {
    impl_->config = config;
    impl_->a = to_eigen(matrix);
    if (config.method == SolverConfig::Method::DirectLU) {
        impl_->lu.compute(impl_->a);
        if (impl_->lu.info() != Eigen::Success)
            throw std::runtime_error("solve_linear: singular system (LU factorization failed)");
    } else {
        impl_->bicg.setTolerance(config.rel_tol);
        impl_->bicg.setMaxIterations(config.max_iterations);
        impl_->bicg.compute(impl_->a);
        if (impl_->bicg.info() != Eigen::Success)
            throw std::runtime_error("solve_linear: preconditioner setup failed");
    }
}

LinearSolver::~LinearSolver() = default;
LinearSolver::LinearSolver(LinearSolver&&) noexcept = default;
LinearSolver& LinearSolver::operator=(LinearSolver&&) noexcept = default;

std::vector<double> LinearSolver::solve(const std::vector<double>& rhs) const {
    Eigen::Map<const Eigen::VectorXd> b(rhs.data(), rhs.size());
    Eigen::VectorXd x;
    if (impl_->config.method == SolverConfig::Method::DirectLU) {
        x = impl_->lu.solve(b);
        if (impl_->lu.info() != Eigen::Success) throw std::runtime_error("solve_linear: LU solve failed");
    } else {
        x = impl_->bicg.solve(b);
        if (impl_->bicg.info() != Eigen::Success)
            throw std::runtime_error("solve_linear: iteration divergence (residual " +
                                     std::to_string(impl_->bicg.error()) + ")");
    }
    double bn = b.norm();
    double res = (impl_->a * x - b).norm();
    if (bn > 0.0 && res > std::max(impl_->config.rel_tol, 1e-9) * bn)
        throw std::runtime_error("solve_linear: residual too large (" + std::to_string(res / bn) + ")");
    return std::vector<double>(x.data(), x.data() + x.size());
}

std::vector<double> DirichletSystem::apply_rhs(const std::vector<double>& rhs,
                                               const std::vector<double>& values) const {
    if (values.size() != dir_rows.size())
        throw std::runtime_error("apply_rhs: value count does not match constrained dofs");
    std::vector<double> b = rhs;
    for (std::size_t d = 0; d < dir_rows.size(); ++d) {
        for (const auto& [i, aij] : col_entries[d]) b[i] -= aij * values[d];
    }
    for (std::size_t d = 0; d < dir_rows.size(); ++d) b[dir_rows[d]] = values[d];
    return b;
}

DirichletSystem make_dirichlet_system(const CsrMatrix& matrix, const std::vector<int>& dofs) {
    DirichletSystem sys;
    std::vector<int> which(matrix.n, -1);
    for (int idx : dofs) {
        if (idx < 0 || idx >= matrix.n) throw std::runtime_error("dirichlet index out of range");
        if (which[idx] >= 0) continue;
        which[idx] = static_cast<int>(sys.dir_rows.size());
        sys.dir_rows.push_back(idx);
    }
    sys.col_entries.resize(sys.dir_rows.size());
    CsrMatrix m = matrix;
    for (int i = 0; i < m.n; ++i) {
        const bool row_dir = which[i] >= 0;
        for (int k = m.row_offsets[i]; k < m.row_offsets[i + 1]; ++k) {
            int j = m.cols[k];
            if (row_dir) {
                m.vals[k] = (j == i) ? 1.0 : 0.0;
            } else if (which[j] >= 0) {
                sys.col_entries[which[j]].push_back({i, m.vals[k]});
                m.vals[k] = 0.0;
            }
        }
    }
    sys.eliminated = std::move(m);
    return sys;
}

ScalarField solve_linear(const SparseOperator& op, const DirichletSet& dirichlet,
                         const SolverConfig& config) {
    std::vector<int> dofs;
    dofs.reserve(dirichlet.size());
    std::vector<double> seen(op.matrix.n, 0.0);
    std::vector<char> has(op.matrix.n, 0);
    for (const auto& [idx, val] : dirichlet) {
        if (idx < 0 || idx >= op.matrix.n) throw std::runtime_error("dirichlet index out of range");
        if (has[idx]) {
            if (seen[idx] != val)
                throw std::runtime_error("conflicting dirichlet values at dof " + std::to_string(idx));
            continue;
        }
        has[idx] = 1;
        seen[idx] = val;
        dofs.push_back(idx);
    }
    DirichletSystem sys = make_dirichlet_system(op.matrix, dofs);
    std::vector<double> values(sys.dir_rows.size());
    for (std::size_t d = 0; d < sys.dir_rows.size(); ++d) values[d] = seen[sys.dir_rows[d]];
    LinearSolver solver(sys.eliminated, config);
    ScalarField out;
    out.v = solver.solve(sys.apply_rhs(op.rhs, values));
    for (std::size_t d = 0; d < sys.dir_rows.size(); ++d) out.v[sys.dir_rows[d]] = values[d];
    return out;
}

}  // namespace morph
