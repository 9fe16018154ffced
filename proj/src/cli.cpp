#include "morph/cli.hpp"

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "morph/cvt.hpp"
#include "morph/deform.hpp"
#include "morph/eikonal.hpp"
#include "morph/meshgen.hpp"
#include "morph/msh_io.hpp"
#include "morph/parallel.hpp"
#include "morph/shapeopt.hpp"
#include "morph/vtk_io.hpp"

namespace morph::cli {

namespace {

std::string json_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out.push_back(c);
    }
    return out;
}

void write_quality_csv(const QualityReport& q, std::ostream& out) {
    out << std::setprecision(17);
    out << "metric,value\n";
    out << "min_signed_volume," << q.min_signed_volume << "\n";
    out << "max_signed_volume," << q.max_signed_volume << "\n";
    out << "min_angle_deg," << q.min_angle_deg << "\n";
    out << "max_angle_deg," << q.max_angle_deg << "\n";
    out << "worst_aspect_ratio," << q.worst_aspect_ratio << "\n";
    out << "inverted_cells," << q.inverted_cells << "\n";
    out << "boundary_edge_min," << q.boundary_edges.min << "\n";
    out << "boundary_edge_max," << q.boundary_edges.max << "\n";
    out << "boundary_edge_mean," << q.boundary_edges.mean << "\n";
    out << "boundary_edge_rel_stddev," << q.boundary_edges.rel_stddev << "\n";
}

VectorField read_displacement_csv(const std::string& path, int nv) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open displacement file '" + path + "'");
    VectorField g(nv);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        for (char& c : line)
            if (c == ',') c = ' ';
        std::istringstream ss(line);
        long long id;
        double dx, dy;
        if (!(ss >> id)) continue;  // header line
        if (!(ss >> dx >> dy))
            throw std::runtime_error("bad displacement line " + std::to_string(lineno));
        if (id < 0 || id >= nv)
            throw std::runtime_error("displacement vertex id out of range at line " +
                                     std::to_string(lineno));
        g[static_cast<int>(id)] = {dx, dy, 0.0};
    }
    return g;
}

// vertex-averaged cell field for VTK output
VectorField average_to_vertices(const SimplicialMesh& mesh, const std::vector<Vec>& cell_field) {
    VectorField out(mesh.vertices.size());
    std::vector<double> w(mesh.vertices.size(), 0.0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        double vol = mesh.cell_volume(c);
        for (int i = 0; i <= mesh.dim; ++i) {
            out[mesh.cells[c][i]] += cell_field[c] * vol;
            w[mesh.cells[c][i]] += vol;
        }
    }
    for (std::size_t v = 0; v < out.size(); ++v)
        if (w[v] > 0.0) out[v] = out[v] / w[v];
    return out;
}

}  // namespace

int run(const std::vector<std::string>& args) {
    CLI::App app{"mesh deformation and nodal shape optimization toolkit"};
    app.require_subcommand(1);
    app.set_config("--config")->description("INI config with [repair]/[eikonal]/[deform]/[optimize] sections");
    app.allow_config_extras(CLI::config_extras_mode::error);
    int threads = 1;
    app.add_option("--threads", threads, "thread count for parallel kernels")->capture_default_str();

    // ---- quality ----
    auto* quality = app.add_subcommand("quality", "mesh quality report");
    std::string q_mesh, q_out;
    quality->add_option("--mesh", q_mesh, "input MSH 2.2 file")->required();
    quality->add_option("--out", q_out, "output CSV (default: stdout)");

    // ---- repair ----
    auto* repair = app.add_subcommand("repair", "tangential CVT boundary reparameterization");
    std::string r_mesh, r_out, r_density = "uniform", r_vtk;
    double r_tol = -1.0;
    int r_max_iter = 100, r_marker = kMarkerDesign;
    repair->add_option("--mesh", r_mesh, "input MSH 2.2 file")->required();
    repair->add_option("--out", r_out, "output MSH file")->required();
    repair->add_option("--tol", r_tol, "offset tolerance (default 1e-3 x mean design edge)");
    repair->add_option("--max-iter", r_max_iter, "sweep limit")->capture_default_str();
    repair->add_option("--marker", r_marker, "design surface marker")->capture_default_str();
    repair->add_option("--density", r_density, "uniform | spacing")
        ->check(CLI::IsMember({"uniform", "spacing"}))
        ->capture_default_str();
    repair->add_option("--out-vtk", r_vtk, "optional VTK dump of the repaired mesh");

    // ---- eikonal ----
    auto* eikonal = app.add_subcommand("eikonal", "regularized Eikonal distance field");
    std::string e_mesh, e_out;
    double e_h = -1.0;
    int e_marker = kMarkerDesign;
    bool e_no_supg = false;
    eikonal->add_option("--mesh", e_mesh, "input MSH 2.2 file")->required();
    eikonal->add_option("--marker", e_marker, "Dirichlet region marker")->capture_default_str();
    eikonal->add_option("--h", e_h, "regularization length (default 0.05 x bbox diagonal)");
    eikonal->add_option("--out", e_out, "output VTK with eps and grad_eps")->required();
    eikonal->add_flag("--no-supg", e_no_supg, "disable SUPG stabilization");

    // ---- deform ----
    auto* deform = app.add_subcommand("deform", "volume mesh deformation from boundary displacement");
    std::string d_mesh, d_disp, d_out, d_quality;
    double d_alpha = 1.0, d_beta = -1.0, d_floor = -1.0, d_h = -1.0, d_laplace_eps = 0.0;
    bool d_laplace = false;
    deform->add_option("--mesh", d_mesh, "input MSH 2.2 file")->required();
    deform->add_option("--displacement", d_disp, "CSV: vertex-id, dx, dy")->required();
    deform->add_option("--out", d_out, "output VTK of the deformed mesh")->required();
    deform->add_option("--out-quality", d_quality, "quality CSV of the deformed mesh");
    deform->add_option("--alpha", d_alpha, "diffusivity weight")->capture_default_str();
    deform->add_option("--beta", d_beta, "convection weight (default 10 / bbox diagonal)");
    deform->add_option("--floor", d_floor, "diffusivity floor (default 1e-6 alpha diag^2)");
    deform->add_option("--h", d_h, "Eikonal regularization length");
    deform->add_flag("--laplace", d_laplace, "use the componentwise Laplacian baseline");
    deform->add_option("--laplace-eps", d_laplace_eps, "baseline diffusivity (default 1)");

    // ---- optimize ----
    auto* optimize = app.add_subcommand("optimize", "nodal shape optimization driver");
    std::string o_mesh, o_objective = "perimeter", o_history, o_out_mesh, o_vtk_prefix;
    std::vector<std::string> o_constraints;
    double o_step = 0.1, o_delta = -1.0, o_grad_tol = 1e-4, o_target_radius = 1.0, o_h = -1.0;
    int o_max_iter = 100;
    optimize->add_option("--mesh", o_mesh, "input MSH 2.2 file")->required();
    optimize->add_option("--objective", o_objective, "perimeter | radial | flux")
        ->check(CLI::IsMember({"perimeter", "radial", "flux"}))
        ->capture_default_str();
    optimize->add_option("--target-radius", o_target_radius, "R in the radial integrand |x|^2 - R^2")
        ->capture_default_str();
    optimize->add_option("--constraint", o_constraints, "volume | centroid | symmetry (repeatable)");
    optimize->add_option("--step", o_step, "initial step scale")->capture_default_str();
    optimize->add_option("--delta", o_delta, "Sobolev smoothing weight (default 10 x mean-edge^2)");
    optimize->add_option("--grad-tol", o_grad_tol, "relative gradient norm tolerance")
        ->capture_default_str();
    optimize->add_option("--max-iter", o_max_iter, "iteration limit")->capture_default_str();
    optimize->add_option("--h", o_h, "Eikonal regularization length");
    optimize->add_option("--out-history", o_history, "history CSV path");
    optimize->add_option("--out-mesh", o_out_mesh, "final mesh MSH path");
    optimize->add_option("--vtk-prefix", o_vtk_prefix, "per-iteration VTK snapshot prefix");

    // ---- genmesh ----
    auto* genmesh = app.add_subcommand("genmesh", "built-in generators for the test geometries");
    std::string g_shape = "disk", g_out;
    int g_n = 64, g_rings = 10, g_nx = 32, g_ny = 32, g_subdiv = 2;
    double g_a = 1.0, g_b = 0.5, g_r0 = 0.5, g_r1 = 1.5, g_radius = 1.0, g_grading = 1.5;
    genmesh->add_option("--shape", g_shape,
                        "disk | ellipse | annulus | benchmark | benchmark-half | clustered-circle | "
                        "rectangle")
        ->check(CLI::IsMember({"disk", "ellipse", "annulus", "benchmark", "benchmark-half",
                               "clustered-circle", "rectangle"}))
        ->capture_default_str();
    genmesh->add_option("--out", g_out, "output MSH file")->required();
    genmesh->add_option("--n", g_n, "angular resolution")->capture_default_str();
    genmesh->add_option("--rings", g_rings, "radial resolution")->capture_default_str();
    genmesh->add_option("--nx", g_nx, "rectangle x resolution")->capture_default_str();
    genmesh->add_option("--ny", g_ny, "rectangle y resolution")->capture_default_str();
    genmesh->add_option("--a", g_a, "ellipse semi-axis a")->capture_default_str();
    genmesh->add_option("--b", g_b, "ellipse semi-axis b")->capture_default_str();
    genmesh->add_option("--r0", g_r0, "annulus inner radius")->capture_default_str();
    genmesh->add_option("--r1", g_r1, "annulus outer radius")->capture_default_str();
    genmesh->add_option("--radius", g_radius, "disk / clustered-circle radius")->capture_default_str();
    genmesh->add_option("--grading", g_grading, "benchmark radial grading exponent")
        ->capture_default_str();
    (void)g_subdiv;

    std::vector<char*> argv;
    std::vector<std::string> storage = args;
    storage.insert(storage.begin(), "morph");
    for (std::string& s : storage) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << "{\"error\":\"" << json_escape(e.what()) << "\"}\n";
        return 2;
    }
    set_threads(threads);

    try {
        if (*quality) {
            SimplicialMesh mesh = load_msh(q_mesh);
            QualityReport q = quality_report(mesh, threads);
            if (q_out.empty()) {
                write_quality_csv(q, std::cout);
            } else {
                std::ofstream f(q_out);
                if (!f) throw std::runtime_error("cannot open '" + q_out + "'");
                write_quality_csv(q, f);
            }
        } else if (*repair) {
            SimplicialMesh mesh = load_msh(r_mesh);
            DensityField rho = DensityField::uniform(mesh);
            if (r_density == "spacing") rho = DensityField::spacing_preserving(boundary_complex(mesh));
            RepairConfig cfg;
            cfg.tol = r_tol;
            cfg.max_iter = r_max_iter;
            cfg.design_marker = r_marker;
            cfg.threads = threads;
            RepairResult res = repair_loop(mesh, rho, cfg);
            write_msh(mesh, r_out);
            if (!r_vtk.empty())
                write_vtk(mesh, {VtkField::make_vector("tau", res.tau)}, r_vtk);
            std::cout << std::setprecision(17) << "iterations=" << res.iterations
                      << " converged=" << (res.converged ? 1 : 0)
                      << " badness_initial=" << res.badness_history.front()
                      << " badness_final=" << res.badness_history.back()
                      << " max_tangency_defect=" << res.max_tangency_defect << "\n";
        } else if (*eikonal) {
            SimplicialMesh mesh = load_msh(e_mesh);
            EikonalConfig cfg;
            cfg.h = e_h;
            cfg.dirichlet_marker = e_marker;
            cfg.supg = !e_no_supg;
            cfg.threads = threads;
            ScalarField eps = solve_eikonal(mesh, cfg);
            VectorField grad = average_to_vertices(mesh, wind_field(mesh, eps));
            write_vtk(mesh,
                      {VtkField::make_scalar("eps", eps), VtkField::make_vector("grad_eps", grad)},
                      e_out);
        } else if (*deform) {
            SimplicialMesh mesh = load_msh(d_mesh);
            VectorField g = read_displacement_csv(d_disp, mesh.num_vertices());
            VectorField v;
            if (d_laplace) {
                v = laplace_displacement(mesh, g, d_laplace_eps > 0.0 ? d_laplace_eps : 1.0);
            } else {
                EikonalConfig ecfg;
                ecfg.h = d_h;
                ecfg.threads = threads;
                ecfg.dirichlet_marker = kMarkerDesign;
                ScalarField eps2 = solve_eikonal(mesh, ecfg);
                ScalarField eps1(mesh.vertices.size(), 1.0);
                bool far = false;
                for (const Facet& f : mesh.boundary_facets)
                    if (f.marker == kMarkerFarField) far = true;
                if (far) {
                    EikonalConfig e1 = ecfg;
                    e1.dirichlet_marker = kMarkerFarField;
                    eps1 = solve_eikonal(mesh, e1);
                }
                DeformConfig cfg;
                cfg.alpha = d_alpha;
                cfg.beta = d_beta;
                cfg.floor = d_floor;
                cfg.threads = threads;
                v = solve_displacement(mesh, eps1, eps2, g, cfg);
            }
            SimplicialMesh out = apply_displacement(mesh, v);
            write_vtk(out, {VtkField::make_vector("displacement", v)}, d_out);
            QualityReport q = quality_report(out, threads);
            if (!d_quality.empty()) {
                std::ofstream f(d_quality);
                if (!f) throw std::runtime_error("cannot open '" + d_quality + "'");
                write_quality_csv(q, f);
            }
            std::cout << "inverted_cells=" << q.inverted_cells << "\n";
        } else if (*optimize) {
            SimplicialMesh mesh = load_msh(o_mesh);
            ObjectiveSpec spec;
            if (o_objective == "perimeter") {
                spec = ObjectiveSpec::perimeter();
            } else if (o_objective == "radial") {
                double r2 = o_target_radius * o_target_radius;
                spec = ObjectiveSpec::volume_integral(
                    [r2](const Vec& x) { return norm2(x) - r2; });
            } else {
                spec = ObjectiveSpec::flux_integral([](const Vec& x) { return x; },
                                                    [&mesh](const Vec&) { return double(mesh.dim); });
            }
            for (const std::string& c : o_constraints) {
                if (c == "volume")
                    spec.constraints.volume = true;
                else if (c == "centroid")
                    spec.constraints.centroid = true;
                else if (c == "symmetry")
                    spec.constraints.symmetry = true;
                else
                    throw std::runtime_error("unknown constraint '" + c + "'");
            }
            DriverConfig cfg;
            cfg.step = o_step;
            cfg.delta = o_delta;
            cfg.grad_tol_rel = o_grad_tol;
            cfg.max_iterations = o_max_iter;
            cfg.eikonal.h = o_h;
            cfg.threads = threads;
            cfg.history_csv = o_history;
            cfg.vtk_prefix = o_vtk_prefix;
            OptimizeOutcome out = run_optimize(std::move(mesh), spec, cfg);
            if (!o_out_mesh.empty()) write_msh(out.mesh, o_out_mesh);
            const IterationRecord& last = out.history.records.back();
            std::cout << std::setprecision(17) << "iterations=" << out.history.records.size()
                      << " converged=" << (out.history.converged ? 1 : 0) << " J=" << last.objective
                      << " vol=" << last.volume << "\n";
        } else if (*genmesh) {
            SimplicialMesh mesh;
            if (g_shape == "disk")
                mesh = gen::disk(g_n, g_rings, g_radius);
            else if (g_shape == "ellipse")
                mesh = gen::ellipse(g_n, g_rings, g_a, g_b);
            else if (g_shape == "annulus")
                mesh = gen::annulus(g_n, g_rings, g_r0, g_r1);
            else if (g_shape == "benchmark")
                mesh = gen::benchmark_full(g_n, g_rings, g_grading);
            else if (g_shape == "benchmark-half")
                mesh = gen::benchmark_half(g_n, g_rings, g_grading);
            else if (g_shape == "clustered-circle")
                mesh = gen::clustered_circle(g_n, g_radius);
            else
                mesh = gen::rectangle(g_nx, g_ny, 0.0, 0.0, 1.0, 1.0,
                                      {kMarkerDesign, kMarkerDesign, kMarkerDesign, kMarkerDesign});
            mesh.validate();
            write_msh(mesh, g_out);
        }
    } catch (const std::exception& e) {
        std::cerr << "{\"error\":\"" << json_escape(e.what()) << "\"}\n";
        return 1;
    }
    return 0;
}

}  // namespace morph::cli
