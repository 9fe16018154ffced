#pragma once

// Shared test helpers: an independent exact-integration oracle (barycentric
// factorial formula, a different route than the production quadrature rules),
// a minimal legacy-VTK reader, and small numeric utilities.

#include <array>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "morph/geom.hpp"
#include "morph/mesh.hpp"

namespace testsupport {

using morph::Vec;

// Integral of a product of barycentric coordinates over a d-simplex of unit
// measure: d! * prod(a_i!) / (sum(a_i) + d)!.
inline double bary_monomial_integral(const std::vector<int>& powers, int d) {
    auto fact = [](int n) {
        double f = 1.0;
        for (int i = 2; i <= n; ++i) f *= i;
        return f;
    };
    int total = 0;
    double num = fact(d);
    for (int a : powers) {
        num *= fact(a);
        total += a;
    }
    return num / fact(total + d);
}

// Exact integral of rho(x) |P(x - y)|^2 over a simplex with P1 rho, where P
// optionally projects out the component along unit normal n. Works for
// segments (2 vertices), triangles (3, possibly embedded in 3D), tets (4).
inline double oracle_weighted_dist2(const std::vector<Vec>& verts, const std::vector<double>& rho,
                                    const Vec& y, double measure, const Vec* n = nullptr) {
    const int nv = static_cast<int>(verts.size());
    const int d = nv - 1;
    std::vector<Vec> w(nv);
    for (int k = 0; k < nv; ++k) {
        Vec diff = verts[k] - y;
        w[k] = n ? diff - (*n) * morph::dot(diff, *n) : diff;
    }
    double total = 0.0;
    for (int k = 0; k < nv; ++k)
        for (int l = 0; l < nv; ++l)
            for (int m = 0; m < nv; ++m) {
                std::vector<int> powers(nv, 0);
                powers[k] += 1;
                powers[l] += 1;
                powers[m] += 1;
                total += morph::dot(w[k], w[l]) * rho[m] * bary_monomial_integral(powers, d);
            }
    return total * measure;
}

// Least squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Amplitude of discrete Fourier mode k of samples around a closed loop.
inline double dft_amplitude(const std::vector<double>& f, int k) {
    const int n = static_cast<int>(f.size());
    std::complex<double> acc(0.0, 0.0);
    for (int j = 0; j < n; ++j)
        acc += f[j] * std::exp(std::complex<double>(0.0, -2.0 * M_PI * j * k / n));
    return std::abs(acc) / n;
}

struct VtkData {
    std::vector<Vec> points;
    std::vector<std::pair<std::string, std::vector<double>>> scalars;
    std::vector<std::pair<std::string, std::vector<Vec>>> vectors;
};

inline VtkData read_vtk(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_vtk: cannot open " + path);
    VtkData data;
    std::string token;
    std::size_t npoints = 0;
    while (in >> token) {
        if (token == "POINTS") {
            std::string type;
            in >> npoints >> type;
            data.points.resize(npoints);
            for (auto& p : data.points) in >> p.x >> p.y >> p.z;
        } else if (token == "SCALARS") {
            std::string name, type;
            int comps;
            in >> name >> type >> comps;
            std::string lut, dflt;
            in >> lut >> dflt;
            std::vector<double> vals(npoints);
            for (auto& v : vals) in >> v;
            data.scalars.emplace_back(name, std::move(vals));
        } else if (token == "VECTORS") {
            std::string name, type;
            in >> name >> type;
            std::vector<Vec> vals(npoints);
            for (auto& v : vals) in >> v.x >> v.y >> v.z;
            data.vectors.emplace_back(name, std::move(vals));
        }
    }
    return data;
}

inline std::string write_temp(const std::string& name, const std::string& content) {
    std::string path = name;
    std::ofstream f(path);
    f << content;
    return path;
}

}  // namespace testsupport
