// Timing comparison of the serial reference kernels against their OpenMP
// variants: badness evaluation, operator assembly, quality metrics, and one
// CVT repair sweep. Build and run:
//   cmake --build build --target bench_kernels && ./build/bench/bench_kernels [threads]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include "morph/cvt.hpp"
#include "morph/fem.hpp"
#include "morph/meshgen.hpp"
#include "morph/parallel.hpp"

using namespace morph;

namespace {

template <class F>
double time_ms(F&& fn, int repeats) {
    // warm-up
    fn();
    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < repeats; ++r) fn();
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms, int threads) {
    std::printf("%-24s %10.3f ms %10.3f ms   x%.2f (%d threads)\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, threads);
}

}  // namespace

int main(int argc, char** argv) {
    int threads = argc > 1 ? std::atoi(argv[1]) : 4;
    if (!openmp_enabled()) std::printf("note: built without OpenMP, parallel path runs serial\n");

    SimplicialMesh mesh = gen::benchmark_full(256, 96);
    std::printf("mesh: %d vertices, %d cells\n", mesh.num_vertices(), mesh.num_cells());
    DensityField rho = DensityField::uniform(mesh);
    BoundaryComplex bc = boundary_complex(mesh);
    std::vector<double> diffusion(mesh.num_cells(), 1.0);
    std::vector<Vec> wind(mesh.num_cells(), Vec{1.0, 0.5, 0.0});

    const int rep = 5;
    double s, p;

    s = time_ms([&] { badness_volume_serial(mesh, rho); }, rep);
    p = time_ms([&] { badness_volume(mesh, rho, threads); }, rep);
    report("badness_volume", s, p, threads);

    s = time_ms([&] { badness_surface_serial(bc, rho); }, rep);
    p = time_ms([&] { badness_surface(bc, rho, threads); }, rep);
    report("badness_surface", s, p, threads);

    s = time_ms([&] { assemble_operator(mesh, diffusion, wind, nullptr, true, nullptr, 1); }, rep);
    p = time_ms([&] { assemble_operator(mesh, diffusion, wind, nullptr, true, nullptr, threads); },
                rep);
    report("assemble_operator", s, p, threads);

    s = time_ms([&] { quality_report(mesh, 1); }, rep);
    p = time_ms([&] { quality_report(mesh, threads); }, rep);
    report("quality_report", s, p, threads);

    {
        RepairConfig serial_cfg;
        serial_cfg.max_iter = 1;
        serial_cfg.tol = 1e-300;  // force exactly one sweep
        RepairConfig par_cfg = serial_cfg;
        par_cfg.threads = threads;
        s = time_ms(
            [&] {
                SimplicialMesh m = mesh;
                repair_loop(m, rho, serial_cfg);
            },
            rep);
        p = time_ms(
            [&] {
                SimplicialMesh m = mesh;
                repair_loop(m, rho, par_cfg);
            },
            rep);
        report("repair sweep", s, p, threads);
    }
    return 0;
}
