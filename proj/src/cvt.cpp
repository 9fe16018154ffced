#include "morph/cvt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "morph/quadrature.hpp"

namespace morph {

DensityField DensityField::uniform(const SimplicialMesh& mesh) {
    DensityField d;
    d.mode = Mode::Uniform;
    d.rho = ScalarField(mesh.vertices.size(), 1.0);
    return d;
}

DensityField DensityField::user(const SimplicialMesh& mesh, ScalarField rho) {
    if (rho.size() != mesh.vertices.size()) throw std::runtime_error("density: size mismatch");
    for (double r : rho.v)
        if (!(r > 0.0)) throw std::runtime_error("density: rho must be positive everywhere");
    DensityField d;
    d.mode = Mode::UserSupplied;
    d.rho = std::move(rho);
    return d;
}

DensityField DensityField::spacing_preserving(const BoundaryComplex& boundary) {
    const SimplicialMesh& mesh = *boundary.mesh;
    DensityField d;
    d.mode = Mode::SpacingPreserving;
    d.rho = ScalarField(mesh.vertices.size(), 1.0);
    std::vector<double> patch_measure(boundary.num_boundary_vertices(), 0.0);
    double mean = 0.0;
    for (int li = 0; li < boundary.num_boundary_vertices(); ++li) {
        for (int fi : boundary.patches[li]) patch_measure[li] += mesh.facet_measure(boundary.facets[fi]);
        mean += patch_measure[li];
    }
    mean /= boundary.num_boundary_vertices();
    for (int li = 0; li < boundary.num_boundary_vertices(); ++li) {
        if (patch_measure[li] <= 0.0) throw std::runtime_error("density: zero patch measure");
        d.rho[boundary.boundary_vertices[li]] = mean / patch_measure[li];
    }
    return d;
}

namespace {

// integral of rho(x) |x - y|^2 over cell c (degree-3 exact)
double cell_badness_term(const SimplicialMesh& mesh, int c, const ScalarField& rho, const Vec& y) {
    const auto& k = mesh.cells[c];
    double vol = mesh.cell_volume(c);
    double acc = 0.0;
    if (mesh.dim == 2) {
        for (const QPoint3& q : triangle_rule_deg3()) {
            Vec x = mesh.vertices[k[0]] * q.l0 + mesh.vertices[k[1]] * q.l1 + mesh.vertices[k[2]] * q.l2;
            double r = rho[k[0]] * q.l0 + rho[k[1]] * q.l1 + rho[k[2]] * q.l2;
            acc += q.w * r * norm2(x - y);
        }
    } else {
        for (const QPoint4& q : tet_rule_deg3()) {
            Vec x = mesh.vertices[k[0]] * q.l0 + mesh.vertices[k[1]] * q.l1 +
                    mesh.vertices[k[2]] * q.l2 + mesh.vertices[k[3]] * q.l3;
            double r = rho[k[0]] * q.l0 + rho[k[1]] * q.l1 + rho[k[2]] * q.l2 + rho[k[3]] * q.l3;
            acc += q.w * r * norm2(x - y);
        }
    }
    return vol * acc;
}

// integral of rho(s) |P_n(s - y)|^2 over facet f
double facet_badness_term(const SimplicialMesh& mesh, const Facet& f, const ScalarField& rho,
                          const Vec& y, const Vec& n) {
    double measure = mesh.facet_measure(f);
    double acc = 0.0;
    if (mesh.dim == 2) {
        for (const QPoint2& q : segment_rule_deg3()) {
            Vec s = mesh.vertices[f.v[0]] * q.l0 + mesh.vertices[f.v[1]] * q.l1;
            double r = rho[f.v[0]] * q.l0 + rho[f.v[1]] * q.l1;
            Vec d = s - y;
            acc += q.w * r * norm2(d - n * dot(d, n));
        }
    } else {
        for (const QPoint3& q : triangle_rule_deg3()) {
            Vec s = mesh.vertices[f.v[0]] * q.l0 + mesh.vertices[f.v[1]] * q.l1 +
                    mesh.vertices[f.v[2]] * q.l2;
            double r = rho[f.v[0]] * q.l0 + rho[f.v[1]] * q.l1 + rho[f.v[2]] * q.l2;
            Vec d = s - y;
            acc += q.w * r * norm2(d - n * dot(d, n));
        }
    }
    return measure * acc;
}

}  // namespace

double badness_volume_serial(const SimplicialMesh& mesh, const DensityField& rho) {
    double total = 0.0;
    for (int c = 0; c < mesh.num_cells(); ++c)
        for (int i = 0; i <= mesh.dim; ++i)
            total += cell_badness_term(mesh, c, rho.rho, mesh.vertices[mesh.cells[c][i]]);
    return total;
}

double badness_volume(const SimplicialMesh& mesh, const DensityField& rho, int threads) {
    if (threads <= 1) return badness_volume_serial(mesh, rho);
    const int nc = mesh.num_cells();
    std::vector<double> per_cell(nc, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (int c = 0; c < nc; ++c)
        for (int i = 0; i <= mesh.dim; ++i)
            per_cell[c] += cell_badness_term(mesh, c, rho.rho, mesh.vertices[mesh.cells[c][i]]);
    double total = 0.0;
    for (double t : per_cell) total += t;
    return total;
}

Vec tangent_project(const Vec& p, const Vec& origin, const Vec& n) {
    if (std::abs(norm(n) - 1.0) > 1e-8) throw std::runtime_error("tangent_project: non-unit normal");
    Vec d = p - origin;
    return d - n * dot(d, n);
}

double badness_surface_serial(const BoundaryComplex& boundary, const DensityField& rho) {
    const SimplicialMesh& mesh = *boundary.mesh;
    double total = 0.0;
    for (int li = 0; li < boundary.num_boundary_vertices(); ++li) {
        int vid = boundary.boundary_vertices[li];
        for (int fi : boundary.patches[li])
            total += facet_badness_term(mesh, boundary.facets[fi], rho.rho, mesh.vertices[vid],
                                        boundary.normals[li]);
    }
    return total;
}

double badness_surface(const BoundaryComplex& boundary, const DensityField& rho, int threads) {
    if (threads <= 1) return badness_surface_serial(boundary, rho);
    const SimplicialMesh& mesh = *boundary.mesh;
    const int n = boundary.num_boundary_vertices();
    std::vector<double> per_vertex(n, 0.0);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(threads)
#endif
    for (int li = 0; li < n; ++li) {
        int vid = boundary.boundary_vertices[li];
        for (int fi : boundary.patches[li])
            per_vertex[li] += facet_badness_term(mesh, boundary.facets[fi], rho.rho,
                                                 mesh.vertices[vid], boundary.normals[li]);
    }
    double total = 0.0;
    for (double t : per_vertex) total += t;
    return total;
}

namespace {

// Tangential offset from x_i to the rho-weighted tangent-plane patch centroid.
Vec cvt_offset(const BoundaryComplex& boundary, int li, const DensityField& rho) {
    const SimplicialMesh& mesh = *boundary.mesh;
    const int vid = boundary.boundary_vertices[li];
    const Vec& xi = mesh.vertices[vid];
    const Vec& n = boundary.normals[li];
    Vec num;
    double den = 0.0;
    for (int fi : boundary.patches[li]) {
        const Facet& f = boundary.facets[fi];
        double measure = mesh.facet_measure(f);
        if (mesh.dim == 2) {
            for (const QPoint2& q : segment_rule_deg3()) {
                Vec s = mesh.vertices[f.v[0]] * q.l0 + mesh.vertices[f.v[1]] * q.l1;
                double r = rho.rho[f.v[0]] * q.l0 + rho.rho[f.v[1]] * q.l1;
                Vec d = s - xi;
                num += (d - n * dot(d, n)) * (q.w * r * measure);
                den += q.w * r * measure;
            }
        } else {
            for (const QPoint3& q : triangle_rule_deg3()) {
                Vec s = mesh.vertices[f.v[0]] * q.l0 + mesh.vertices[f.v[1]] * q.l1 +
                        mesh.vertices[f.v[2]] * q.l2;
                double r = rho.rho[f.v[0]] * q.l0 + rho.rho[f.v[1]] * q.l1 + rho.rho[f.v[2]] * q.l2;
                Vec d = s - xi;
                num += (d - n * dot(d, n)) * (q.w * r * measure);
                den += q.w * r * measure;
            }
        }
    }
    if (!(den > 0.0)) throw std::runtime_error("cvt_target: zero patch measure");
    return num / den;
}

}  // namespace

Vec cvt_target(const BoundaryComplex& boundary, int vid, const DensityField& rho) {
    int li = boundary.local_index[vid];
    if (li < 0) throw std::runtime_error("cvt_target: not a boundary vertex");
    if (boundary.patches[li].empty()) throw std::runtime_error("cvt_target: empty patch");
    return boundary.mesh->vertices[vid] + cvt_offset(boundary, li, rho);
}

RepairResult repair_loop(SimplicialMesh& mesh, const DensityField& rho, RepairConfig config) {
    BoundaryComplex bc = boundary_complex(mesh);
    const int n = bc.num_boundary_vertices();

    std::vector<char> movable(n, 0);
    int n_movable = 0;
    for (int li = 0; li < n; ++li) {
        if (bc.vertex_only_on_marker(bc.boundary_vertices[li], config.design_marker)) {
            movable[li] = 1;
            ++n_movable;
        }
    }

    double tol = config.tol;
    if (tol <= 0.0) {
        double mean_edge = 0.0;
        int cnt = 0;
        for (const Facet& f : bc.facets)
            if (f.marker == config.design_marker) {
                mean_edge += mesh.facet_measure(f);
                ++cnt;
            }
        tol = 1e-3 * (cnt > 0 ? mean_edge / cnt : mesh.bbox_diagonal());
    }
    if (!(tol > 0.0)) throw std::runtime_error("repair_loop: tol must be positive");

    RepairResult result;
    result.tau = VectorField(mesh.vertices.size());
    result.badness_history.push_back(badness_surface(bc, rho, config.threads));
    if (n_movable == 0) {
        result.converged = true;
        return result;
    }

    std::vector<Vec> offsets(n);
    std::vector<Vec> old_dirs(bc.facets.size());
    for (int it = 0; it < config.max_iter; ++it) {
        // Jacobi: all targets from the current configuration and its normals.
        const int nt = config.threads;
        (void)nt;
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(nt > 1 ? nt : 1) if (nt > 1)
#endif
        for (int li = 0; li < n; ++li) offsets[li] = movable[li] ? cvt_offset(bc, li, rho) : Vec{};

        double max_off = 0.0;
        for (int li = 0; li < n; ++li) {
            if (!movable[li]) continue;
            max_off = std::max(max_off, norm(offsets[li]));
            result.max_tangency_defect =
                std::max(result.max_tangency_defect, std::abs(dot(offsets[li], bc.normals[li])));
        }
        if (max_off <= tol) {
            result.converged = true;
            break;
        }

        for (std::size_t fi = 0; fi < bc.facets.size(); ++fi) {
            const Facet& f = bc.facets[fi];
            old_dirs[fi] = mesh.dim == 2
                               ? mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]]
                               : cross(mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]],
                                       mesh.vertices[f.v[2]] - mesh.vertices[f.v[0]]);
        }
        for (int li = 0; li < n; ++li) {
            if (!movable[li]) continue;
            int vid = bc.boundary_vertices[li];
            mesh.vertices[vid] += offsets[li];
            result.tau[vid] += offsets[li];
        }
        ++result.iterations;
        for (std::size_t fi = 0; fi < bc.facets.size(); ++fi) {
            const Facet& f = bc.facets[fi];
            Vec now = mesh.dim == 2 ? mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]]
                                    : cross(mesh.vertices[f.v[1]] - mesh.vertices[f.v[0]],
                                            mesh.vertices[f.v[2]] - mesh.vertices[f.v[0]]);
            if (dot(now, old_dirs[fi]) <= 0.0)
                throw std::runtime_error("repair_loop: boundary facet inversion at sweep " +
                                         std::to_string(result.iterations));
        }
        bc.refresh_normals();
        result.badness_history.push_back(badness_surface(bc, rho, config.threads));
    }
    return result;
}

}  // namespace morph
