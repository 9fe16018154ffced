#include "morph/shapeopt.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "morph/quadrature.hpp"
#include "morph/vtk_io.hpp"

namespace morph {

ObjectiveSpec ObjectiveSpec::volume_integral(std::function<double(const Vec&)> f) {
    ObjectiveSpec s;
    s.kind = Kind::VolumeIntegral;
    s.f = std::move(f);
    return s;
}

ObjectiveSpec ObjectiveSpec::boundary_integral(std::function<double(const Vec&)> f,
                                               std::function<Vec(const Vec&)> grad_f) {
    ObjectiveSpec s;
    s.kind = Kind::BoundaryIntegral;
    s.f = std::move(f);
    s.grad_f = std::move(grad_f);
    return s;
}

ObjectiveSpec ObjectiveSpec::flux_integral(std::function<Vec(const Vec&)> f3,
                                           std::function<double(const Vec&)> div_f3) {
    ObjectiveSpec s;
    s.kind = Kind::FluxIntegral;
    s.f3 = std::move(f3);
    s.div_f3 = std::move(div_f3);
    return s;
}

ObjectiveSpec ObjectiveSpec::perimeter() {
    return boundary_integral([](const Vec&) { return 1.0; }, [](const Vec&) { return Vec{}; });
}

namespace {

double integrate_cell(const SimplicialMesh& mesh, int c,
                      const std::function<double(const Vec&)>& f) {
    const auto& k = mesh.cells[c];
    double acc = 0.0;
    if (mesh.dim == 2) {
        for (const QPoint3& q : triangle_rule_deg3())
            acc += q.w * f(mesh.vertices[k[0]] * q.l0 + mesh.vertices[k[1]] * q.l1 +
                           mesh.vertices[k[2]] * q.l2);
    } else {
        for (const QPoint4& q : tet_rule_deg3())
            acc += q.w * f(mesh.vertices[k[0]] * q.l0 + mesh.vertices[k[1]] * q.l1 +
                           mesh.vertices[k[2]] * q.l2 + mesh.vertices[k[3]] * q.l3);
    }
    return acc * mesh.cell_volume(c);
}

double integrate_facet(const SimplicialMesh& mesh, const Facet& f,
                       const std::function<double(const Vec&)>& fn) {
    double acc = 0.0;
    if (mesh.dim == 2) {
        for (const QPoint2& q : segment_rule_deg3())
            acc += q.w * fn(mesh.vertices[f.v[0]] * q.l0 + mesh.vertices[f.v[1]] * q.l1);
    } else {
        for (const QPoint3& q : triangle_rule_deg3())
            acc += q.w * fn(mesh.vertices[f.v[0]] * q.l0 + mesh.vertices[f.v[1]] * q.l1 +
                            mesh.vertices[f.v[2]] * q.l2);
    }
    return acc * mesh.facet_measure(f);
}

bool vertex_on_marker(const BoundaryComplex& bc, int li, int marker) {
    for (int fi : bc.patches[li])
        if (bc.facets[fi].marker == marker) return true;
    return false;
}

bool vertex_on_marker_at_least(const BoundaryComplex& bc, int li, int marker) {
    for (int fi : bc.patches[li])
        if (bc.facets[fi].marker >= marker) return true;
    return false;
}

double mass_norm(const CsrMatrix& mass, const std::vector<double>& d) {
    std::vector<double> md = mass.multiply(d);
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += d[i] * md[i];
    return std::sqrt(std::max(0.0, s));
}

}  // namespace

double eval_objective(const SimplicialMesh& mesh, const ObjectiveSpec& spec) {
    double total = 0.0;
    switch (spec.kind) {
        case ObjectiveSpec::Kind::VolumeIntegral:
            for (int c = 0; c < mesh.num_cells(); ++c) total += integrate_cell(mesh, c, spec.f);
            break;
        case ObjectiveSpec::Kind::BoundaryIntegral:
            for (const Facet& f : mesh.boundary_facets) total += integrate_facet(mesh, f, spec.f);
            break;
        case ObjectiveSpec::Kind::FluxIntegral:
            for (const Facet& f : mesh.boundary_facets) {
                Vec n = mesh.facet_normal(f);
                total += integrate_facet(mesh, f, [&](const Vec& x) { return dot(spec.f3(x), n); });
            }
            break;
    }
    return total;
}

std::vector<double> hadamard_kernel(const BoundaryComplex& boundary, const ObjectiveSpec& spec) {
    const SimplicialMesh& mesh = *boundary.mesh;
    if (spec.kind == ObjectiveSpec::Kind::BoundaryIntegral && mesh.dim != 2)
        throw std::runtime_error("hadamard_kernel: boundary-integral kernel needs 2D curvature");
    std::vector<double> g(boundary.num_boundary_vertices(), 0.0);
    for (int li = 0; li < boundary.num_boundary_vertices(); ++li) {
        if (!vertex_on_marker(boundary, li, spec.design_marker)) continue;
        int vid = boundary.boundary_vertices[li];
        const Vec& x = mesh.vertices[vid];
        switch (spec.kind) {
            case ObjectiveSpec::Kind::VolumeIntegral:
                g[li] = spec.f(x);
                break;
            case ObjectiveSpec::Kind::BoundaryIntegral:
                g[li] = dot(spec.grad_f(x), boundary.normals[li]) +
                        discrete_curvature(boundary, vid) * spec.f(x);
                break;
            case ObjectiveSpec::Kind::FluxIntegral:
                g[li] = spec.div_f3(x);
                break;
        }
    }
    return g;
}

double directional_derivative(const BoundaryComplex& boundary, const std::vector<double>& g,
                              const VectorField& V) {
    const SimplicialMesh& mesh = *boundary.mesh;
    double total = 0.0;
    for (const Facet& f : boundary.facets) {
        double s = 0.0;
        for (int i = 0; i < mesh.dim; ++i) {
            int li = boundary.local_index[f.v[i]];
            s += dot(V[f.v[i]], boundary.normals[li]) * g[li];
        }
        total += mesh.facet_measure(f) * s / mesh.dim;
    }
    return total;
}

std::vector<double> sobolev_smooth(const BoundaryComplex& boundary, const std::vector<double>& d1,
                                   double delta, const SolverConfig& solver) {
    if (static_cast<int>(d1.size()) != boundary.num_boundary_vertices())
        throw std::runtime_error("sobolev_smooth: field size mismatch");
    SparseOperator op = assemble_boundary_operator(boundary, delta);
    CsrMatrix mass = assemble_boundary_operator(boundary, 0.0).matrix;
    std::vector<double> rhs = mass.multiply(d1);
    for (double& x : rhs) x = -x;
    op.rhs = std::move(rhs);
    return solve_linear(op, {}, solver).v;
}

std::vector<double> project_constraints(const BoundaryComplex& boundary, std::vector<double> d2,
                                        const ObjectiveSpec& spec) {
    const int n = boundary.num_boundary_vertices();
    if (static_cast<int>(d2.size()) != n) throw std::runtime_error("project_constraints: size mismatch");
    const SimplicialMesh& mesh = *boundary.mesh;

    std::vector<char> fixed(n, 0);
    if (spec.constraints.symmetry) {
        for (int li = 0; li < n; ++li)
            if (vertex_on_marker_at_least(boundary, li, kMarkerSymmetry)) {
                fixed[li] = 1;
                d2[li] = 0.0;
            }
    }
    if (!spec.constraints.mirror_axes.empty()) {
        const double tol = 1e-9 * std::max(1.0, mesh.bbox_diagonal());
        for (const auto& [axis, coord] : spec.constraints.mirror_axes) {
            for (int li = 0; li < n; ++li) {
                Vec p = mesh.vertices[boundary.boundary_vertices[li]];
                if (p[axis] <= coord + tol) continue;  // handle each pair from one side
                Vec q = p;
                q[axis] = 2.0 * coord - p[axis];
                for (int lj = 0; lj < n; ++lj) {
                    if (norm(mesh.vertices[boundary.boundary_vertices[lj]] - q) <= tol) {
                        double avg = 0.5 * (d2[li] + d2[lj]);
                        d2[li] = d2[lj] = avg;
                        break;
                    }
                }
            }
        }
    }

    std::vector<std::vector<double>> dirs;
    if (spec.constraints.volume) dirs.emplace_back(n, 1.0);
    if (spec.constraints.centroid)
        for (int j = 0; j < mesh.dim; ++j) {
            std::vector<double> c(n);
            for (int li = 0; li < n; ++li) c[li] = boundary.normals[li][j];
            dirs.push_back(std::move(c));
        }
    if (dirs.empty()) return d2;
    for (auto& c : dirs)
        for (int li = 0; li < n; ++li)
            if (fixed[li]) c[li] = 0.0;

    CsrMatrix mass = assemble_boundary_operator(boundary, 0.0).matrix;
    const int k = static_cast<int>(dirs.size());
    Eigen::MatrixXd gram(k, k);
    Eigen::VectorXd rhs(k);
    std::vector<std::vector<double>> mc(k);
    for (int a = 0; a < k; ++a) mc[a] = mass.multiply(dirs[a]);
    for (int a = 0; a < k; ++a) {
        for (int b = 0; b < k; ++b) {
            double s = 0.0;
            for (int li = 0; li < n; ++li) s += dirs[a][li] * mc[b][li];
            gram(a, b) = s;
        }
        double s = 0.0;
        for (int li = 0; li < n; ++li) s += mc[a][li] * d2[li];
        rhs(a) = s;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    if (lu.rank() < k)
        throw std::runtime_error("project_constraints: degenerate constraint Gram matrix");
    Eigen::VectorXd lambda = lu.solve(rhs);
    for (int a = 0; a < k; ++a)
        for (int li = 0; li < n; ++li) d2[li] -= lambda(a) * dirs[a][li];
    return d2;
}

namespace {

double auto_delta(const BoundaryComplex& bc, int design_marker) {
    double mean = 0.0;
    int cnt = 0;
    for (const Facet& f : bc.facets)
        if (f.marker == design_marker) {
            mean += bc.mesh->facet_measure(f);
            ++cnt;
        }
    if (cnt == 0) return 0.0;
    mean /= cnt;
    return 10.0 * mean * mean;
}

struct LineSearchFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace

StepOutcome optimize_step(const SimplicialMesh& mesh, const ObjectiveSpec& spec,
                          const DriverConfig& config, double volume_target, double grad_stop) {
    BoundaryComplex bc = boundary_complex(mesh);
    const int n = bc.num_boundary_vertices();
    CsrMatrix mass = assemble_boundary_operator(bc, 0.0).matrix;

    std::vector<double> d1 = hadamard_kernel(bc, spec);
    double delta = config.delta >= 0.0 ? config.delta : auto_delta(bc, spec.design_marker);
    std::vector<double> d2 = sobolev_smooth(bc, d1, delta, config.solver);
    d2 = project_constraints(bc, d2, spec);
    for (int li = 0; li < n; ++li)
        if (!vertex_on_marker(bc, li, spec.design_marker)) d2[li] = 0.0;

    const double grad_norm = mass_norm(mass, d2);
    const double j0 = eval_objective(mesh, spec);

    StepOutcome out;
    out.grad_norm = grad_norm;
    out.record.objective = j0;
    out.record.volume = mesh.total_volume();

    if (grad_norm <= std::max(grad_stop, 1e-12 * (1.0 + std::abs(j0)))) {
        out.at_optimum = true;
        out.mesh = mesh;
        QualityReport q = quality_report(mesh, config.threads);
        out.record.min_angle = q.min_angle_deg;
        out.record.inverted = q.inverted_cells;
        out.record.badness = badness_surface(bc, DensityField::uniform(mesh), config.threads);
        return out;
    }

    VectorField direction(mesh.vertices.size());
    for (int li = 0; li < n; ++li) direction[bc.boundary_vertices[li]] = bc.normals[li] * d2[li];
    const double dd = directional_derivative(bc, d1, direction);

    // Eikonal fields live on the current domain; the line search reuses them.
    EikonalConfig ecfg = config.eikonal;
    ecfg.threads = config.threads;
    ecfg.dirichlet_marker = spec.design_marker;
    ScalarField eps2 = solve_eikonal(mesh, ecfg);
    ScalarField eps1(mesh.vertices.size(), 1.0);
    bool has_far_field = false;
    for (const Facet& f : mesh.boundary_facets)
        if (f.marker == kMarkerFarField) has_far_field = true;
    if (has_far_field) {
        EikonalConfig e1 = ecfg;
        e1.dirichlet_marker = kMarkerFarField;
        eps1 = solve_eikonal(mesh, e1);
    }
    DeformConfig dcfg = config.deform;
    dcfg.threads = config.threads;
    dcfg.design_marker = spec.design_marker;

    bool pure_design = true;
    for (const Facet& f : mesh.boundary_facets)
        if (f.marker != spec.design_marker) pure_design = false;

    double sigma = config.step;
    for (int trial = 0; trial <= config.max_backtracks; ++trial, sigma *= 0.5) {
        SimplicialMesh moved = mesh;
        for (int li = 0; li < n; ++li)
            moved.vertices[bc.boundary_vertices[li]] += bc.normals[li] * (sigma * d2[li]);

        RepairConfig rcfg = config.repair;
        rcfg.design_marker = spec.design_marker;
        rcfg.threads = config.threads;
        RepairResult rep;
        try {
            rep = repair_loop(moved, DensityField::uniform(moved), rcfg);
        } catch (const std::exception&) {
            continue;  // boundary tangled at this scale
        }

        VectorField g(mesh.vertices.size());
        for (int li = 0; li < n; ++li) {
            int vid = bc.boundary_vertices[li];
            g[vid] = moved.vertices[vid] - mesh.vertices[vid];
        }
        VectorField v;
        try {
            v = solve_displacement(mesh, eps1, eps2, g, dcfg);
        } catch (const std::exception&) {
            continue;
        }
        SimplicialMesh next = apply_displacement(mesh, v);
        QualityReport q = quality_report(next, config.threads);
        if (q.inverted_cells > 0) continue;

        if (spec.constraints.volume && pure_design) {
            // exact rescale about the centroid restores vol = V0
            double vol = next.total_volume();
            double s = std::pow(volume_target / vol, 1.0 / next.dim);
            Vec c = next.centroid();
            for (Vec& p : next.vertices) p = c + (p - c) * s;
            q = quality_report(next, config.threads);
        }
        double jn = eval_objective(next, spec);
        if (jn <= j0 + config.armijo_c * sigma * dd) {
            out.mesh = std::move(next);
            out.record.objective = jn;
            out.record.volume = out.mesh.total_volume();
            out.record.min_angle = q.min_angle_deg;
            out.record.inverted = q.inverted_cells;
            BoundaryComplex bco = boundary_complex(out.mesh);
            out.record.badness =
                badness_surface(bco, DensityField::uniform(out.mesh), config.threads);
            out.record.step_norm = sigma * grad_norm;
            out.record.repair_iters = rep.iterations;
            return out;
        }
    }
    throw LineSearchFailure("optimize_step: line search failed after " +
                            std::to_string(config.max_backtracks + 1) + " trials");
}

OptimizeOutcome run_optimize(SimplicialMesh mesh, const ObjectiveSpec& spec,
                             const DriverConfig& config) {
    OptimizeOutcome out;
    const double v0 = mesh.total_volume();
    double initial_grad = -1.0;
    for (int it = 0; it < config.max_iterations; ++it) {
        double stop = initial_grad > 0.0 ? config.grad_tol_rel * initial_grad : 0.0;
        StepOutcome step;
        try {
            step = optimize_step(mesh, spec, config, v0, stop);
        } catch (const LineSearchFailure&) {
            break;  // no further descent representable at this precision
        }
        if (initial_grad < 0.0) initial_grad = step.grad_norm;
        step.record.iter = it;
        out.history.records.push_back(step.record);
        mesh = std::move(step.mesh);
        if (!config.vtk_prefix.empty())
            write_vtk(mesh, {}, config.vtk_prefix + std::to_string(it) + ".vtk");
        if (step.at_optimum) {
            out.history.converged = true;
            break;
        }
    }
    if (!config.history_csv.empty()) write_history_csv(out.history, config.history_csv);
    out.mesh = std::move(mesh);
    return out;
}

void write_history_csv(const RunHistory& history, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("write_history_csv: cannot open '" + path + "'");
    f << "iter,J,vol,badness,min_angle,inverted,step,repair_iters\n";
    f << std::setprecision(17);
    for (const IterationRecord& r : history.records)
        f << r.iter << ',' << r.objective << ',' << r.volume << ',' << r.badness << ','
          << r.min_angle << ',' << r.inverted << ',' << r.step_norm << ',' << r.repair_iters
          << "\n";
    if (!f) throw std::runtime_error("write_history_csv: I/O failure '" + path + "'");
}

}  // namespace morph
