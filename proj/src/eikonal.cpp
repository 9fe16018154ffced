#include "morph/eikonal.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>

namespace morph {

std::vector<double> graph_distance(const SimplicialMesh& mesh, const std::vector<int>& sources) {
    const int nv = mesh.num_vertices();
    std::vector<std::vector<std::pair<int, double>>> adj(nv);
    std::set<std::pair<int, int>> seen;
    for (const auto& k : mesh.cells) {
        for (int i = 0; i <= mesh.dim; ++i)
            for (int j = i + 1; j <= mesh.dim; ++j) {
                int a = k[i], b = k[j];
                if (!seen.emplace(std::min(a, b), std::max(a, b)).second) continue;
                double w = norm(mesh.vertices[a] - mesh.vertices[b]);
                adj[a].push_back({b, w});
                adj[b].push_back({a, w});
            }
    }
    std::vector<double> dist(nv, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (int s : sources) {
        dist[s] = 0.0;
        heap.push({0.0, s});
    }
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (const auto& [u, w] : adj[v]) {
            if (d + w < dist[u]) {
                dist[u] = d + w;
                heap.push({dist[u], u});
            }
        }
    }
    return dist;
}

std::vector<int> marker_vertices(const SimplicialMesh& mesh, int marker) {
    std::vector<char> flag(mesh.num_vertices(), 0);
    for (const Facet& f : mesh.boundary_facets)
        if (f.marker == marker)
            for (int i = 0; i < mesh.facet_size(); ++i) flag[f.v[i]] = 1;
    std::vector<int> out;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (flag[v]) out.push_back(v);
    return out;
}

std::vector<Vec> wind_field(const SimplicialMesh& mesh, const ScalarField& eps) {
    if (mesh.dim != 2) throw std::runtime_error("wind_field: 2D meshes only");
    if (static_cast<int>(eps.size()) != mesh.num_vertices())
        throw std::runtime_error("wind_field: field size mismatch");
    const int nc = mesh.num_cells();
    std::vector<Vec> grad(nc);
    for (int c = 0; c < nc; ++c) {
        const auto& k = mesh.cells[c];
        const Vec& p0 = mesh.vertices[k[0]];
        const Vec& p1 = mesh.vertices[k[1]];
        const Vec& p2 = mesh.vertices[k[2]];
        double a2 = cross2(p1 - p0, p2 - p0);  // 2 * area
        auto rot = [](const Vec& e) { return Vec{-e.y, e.x, 0.0}; };
        grad[c] = (rot(p2 - p1) * eps[k[0]] + rot(p0 - p2) * eps[k[1]] + rot(p1 - p0) * eps[k[2]]) / a2;
    }
    return grad;
}

namespace {

// Residual of the regularized Eikonal weak form including the SUPG term; the
// rows of Dirichlet vertices are zeroed.
std::vector<double> eikonal_residual(const SimplicialMesh& mesh, const ScalarField& eps, double h,
                                     bool supg, const std::vector<char>& is_dirichlet) {
    const int nv = mesh.num_vertices();
    std::vector<double> r(nv, 0.0);
    std::vector<Vec> grad = wind_field(mesh, eps);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        const auto& k = mesh.cells[c];
        const Vec& p0 = mesh.vertices[k[0]];
        const Vec& p1 = mesh.vertices[k[1]];
        const Vec& p2 = mesh.vertices[k[2]];
        double area = 0.5 * cross2(p1 - p0, p2 - p0);
        auto rot = [](const Vec& e) { return Vec{-e.y, e.x, 0.0}; };
        const double s = 1.0 / (2.0 * area);
        Vec g[3] = {rot(p2 - p1) * s, rot(p0 - p2) * s, rot(p1 - p0) * s};
        const Vec ge = grad[c];
        const double strong = norm2(ge) - 1.0;  // P1: lap(eps) = 0 inside cells
        const Vec w = ge * 2.0;
        const double wn = norm(w);
        double tau = 0.0;
        if (supg && wn > 0.0) tau = supg_tau(supg_cell_length(mesh, c, w / wn), wn, h);
        for (int i = 0; i < 3; ++i) {
            double v = h * area * dot(ge, g[i]) + strong * area / 3.0;
            if (tau > 0.0) v += tau * area * dot(w, g[i]) * strong;
            r[k[i]] += v;
        }
    }
    for (int v = 0; v < nv; ++v)
        if (is_dirichlet[v]) r[v] = 0.0;
    return r;
}

double norm_l2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

ScalarField solve_eikonal(const SimplicialMesh& mesh, const EikonalConfig& config) {
    if (mesh.dim != 2) throw std::runtime_error("solve_eikonal: 2D meshes only");
    const int nv = mesh.num_vertices();
    double h = config.h > 0.0 ? config.h : 0.05 * mesh.bbox_diagonal();

    std::vector<int> sources = marker_vertices(mesh, config.dirichlet_marker);
    if (sources.empty()) throw std::runtime_error("solve_eikonal: empty Dirichlet set for marker " +
                                                  std::to_string(config.dirichlet_marker));
    std::vector<char> is_dir(nv, 0);
    for (int v : sources) is_dir[v] = 1;

    ScalarField eps(nv, 0.0);
    if (config.initial_guess == EikonalConfig::InitialGuess::GraphDistance) {
        std::vector<double> d = graph_distance(mesh, sources);
        for (int v = 0; v < nv; ++v) eps[v] = d[v];
    }
    for (int v : sources) eps[v] = 0.0;

    const auto& nw = config.solver.newton;
    std::vector<double> diffusion(mesh.num_cells(), h);
    double res_norm = norm_l2(eikonal_residual(mesh, eps, h, config.supg, is_dir));
    for (int step = 0; step < nw.max_steps; ++step) {
        if (res_norm <= nw.abs_tol) {
            ScalarField out = eps;
            for (double& x : out.v)
                if (x < 0.0 && x > -1e-8) x = 0.0;
            return out;
        }
        std::vector<double> r = eikonal_residual(mesh, eps, h, config.supg, is_dir);
        std::vector<Vec> wind = wind_field(mesh, eps);
        for (Vec& w : wind) w *= 2.0;
        SparseOperator jac =
            assemble_operator(mesh, diffusion, wind, nullptr, config.supg, nullptr, config.threads);
        for (double& x : r) x = -x;
        ScalarField delta = solve_linear({jac.matrix, r}, [&] {
            DirichletSet d;
            for (int v : sources) d.push_back({v, 0.0});
            return d;
        }(), config.solver);

        // Damped update: halve on residual increase.
        double lambda = 1.0;
        ScalarField trial = eps;
        double trial_norm = res_norm;
        for (int halving = 0; halving <= nw.max_halvings; ++halving) {
            for (int v = 0; v < nv; ++v) trial[v] = eps[v] + lambda * delta[v];
            trial_norm = norm_l2(eikonal_residual(mesh, trial, h, config.supg, is_dir));
            if (trial_norm < res_norm || halving == nw.max_halvings) break;
            lambda *= 0.5;
        }
        eps = trial;
        res_norm = trial_norm;
    }
    if (res_norm > nw.abs_tol)
        throw std::runtime_error("solve_eikonal: Newton did not converge (residual " +
                                 std::to_string(res_norm) + ")");
    ScalarField out = eps;
    for (double& x : out.v)
        if (x < 0.0 && x > -1e-8) x = 0.0;
    return out;
}

}  // namespace morph
