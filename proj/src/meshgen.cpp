#include "morph/meshgen.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace morph::gen {

namespace {

void push_tri(SimplicialMesh& m, int a, int b, int c) {
    m.cells.push_back({a, b, c, -1});
    if (m.cell_volume(m.num_cells() - 1) < 0.0) std::swap(m.cells.back()[0], m.cells.back()[1]);
}

void push_facet(SimplicialMesh& m, int a, int b, int marker) {
    Facet f;
    f.v = {a, b, -1};
    f.marker = marker;
    m.boundary_facets.push_back(f);
}

}  // namespace

SimplicialMesh rectangle(int nx, int ny, double x0, double y0, double x1, double y1,
                         std::array<int, 4> side_markers) {
    if (nx < 1 || ny < 1) throw std::runtime_error("rectangle: need nx, ny >= 1");
    SimplicialMesh m;
    m.dim = 2;
    auto vid = [&](int i, int j) { return j * (nx + 1) + i; };
    for (int j = 0; j <= ny; ++j)
        for (int i = 0; i <= nx; ++i)
            m.vertices.push_back({x0 + (x1 - x0) * i / nx, y0 + (y1 - y0) * j / ny, 0.0});
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
            if ((i + j) % 2 == 0) {
                push_tri(m, a, b, c);
                push_tri(m, a, c, d);
            } else {
                push_tri(m, a, b, d);
                push_tri(m, b, c, d);
            }
        }
    for (int j = 0; j < ny; ++j) {
        push_facet(m, vid(0, j + 1), vid(0, j), side_markers[0]);
        push_facet(m, vid(nx, j), vid(nx, j + 1), side_markers[1]);
    }
    for (int i = 0; i < nx; ++i) {
        push_facet(m, vid(i, 0), vid(i + 1, 0), side_markers[2]);
        push_facet(m, vid(i + 1, ny), vid(i, ny), side_markers[3]);
    }
    return m;
}

SimplicialMesh disk(int n_theta, int n_rings, double radius, int marker) {
    if (n_theta < 3 || n_rings < 1) throw std::runtime_error("disk: need n_theta >= 3, n_rings >= 1");
    SimplicialMesh m;
    m.dim = 2;
    m.vertices.push_back({0.0, 0.0, 0.0});
    auto vid = [&](int ring, int j) { return 1 + (ring - 1) * n_theta + (j % n_theta); };
    for (int k = 1; k <= n_rings; ++k) {
        double r = radius * k / n_rings;
        for (int j = 0; j < n_theta; ++j) {
            double th = 2.0 * M_PI * j / n_theta;
            m.vertices.push_back({r * std::cos(th), r * std::sin(th), 0.0});
        }
    }
    for (int j = 0; j < n_theta; ++j) push_tri(m, 0, vid(1, j), vid(1, j + 1));
    for (int k = 1; k < n_rings; ++k)
        for (int j = 0; j < n_theta; ++j) {
            push_tri(m, vid(k, j), vid(k + 1, j), vid(k + 1, j + 1));
            push_tri(m, vid(k, j), vid(k + 1, j + 1), vid(k, j + 1));
        }
    for (int j = 0; j < n_theta; ++j) push_facet(m, vid(n_rings, j), vid(n_rings, j + 1), marker);
    return m;
}

SimplicialMesh ellipse(int n_theta, int n_rings, double a, double b, int marker) {
    SimplicialMesh m = disk(n_theta, n_rings, 1.0, marker);
    for (Vec& p : m.vertices) {
        p.x *= a;
        p.y *= b;
    }
    return m;
}

SimplicialMesh clustered_circle(int n, double radius, int marker) {
    if (n < 4) throw std::runtime_error("clustered_circle: need n >= 4");
    SimplicialMesh m;
    m.dim = 2;
    Vec centroid;
    std::vector<Vec> ring(n);
    for (int j = 0; j < n; ++j) {
        double th = 0.5 * M_PI * j / (n - 1);  // all on the first-quadrant arc
        ring[j] = {radius * std::cos(th), radius * std::sin(th), 0.0};
        centroid += ring[j];
    }
    centroid = centroid / n;
    m.vertices.push_back(centroid);
    for (const Vec& p : ring) m.vertices.push_back(p);
    // Counter-clockwise polygon: up the arc, back along the closing chord.
    for (int j = 0; j < n; ++j) push_tri(m, 0, 1 + j, 1 + (j + 1) % n);
    for (int j = 0; j < n; ++j) push_facet(m, 1 + j, 1 + (j + 1) % n, marker);
    return m;
}

SimplicialMesh annulus(int n_theta, int n_r, double r0, double r1, int inner_marker,
                       int outer_marker) {
    if (n_theta < 3 || n_r < 1) throw std::runtime_error("annulus: need n_theta >= 3, n_r >= 1");
    SimplicialMesh m;
    m.dim = 2;
    auto vid = [&](int k, int j) { return k * n_theta + (j % n_theta); };
    for (int k = 0; k <= n_r; ++k) {
        double r = r0 + (r1 - r0) * k / n_r;
        for (int j = 0; j < n_theta; ++j) {
            double th = 2.0 * M_PI * j / n_theta;
            m.vertices.push_back({r * std::cos(th), r * std::sin(th), 0.0});
        }
    }
    for (int k = 0; k < n_r; ++k)
        for (int j = 0; j < n_theta; ++j) {
            push_tri(m, vid(k, j), vid(k + 1, j), vid(k + 1, j + 1));
            push_tri(m, vid(k, j), vid(k + 1, j + 1), vid(k, j + 1));
        }
    for (int j = 0; j < n_theta; ++j) {
        push_facet(m, vid(0, j + 1), vid(0, j), inner_marker);  // inward-facing: domain outside
        push_facet(m, vid(n_r, j), vid(n_r, j + 1), outer_marker);
    }
    return m;
}

SimplicialMesh benchmark_half(int n_theta, int n_r, double grading) {
    int nt = ((n_theta + 3) / 4) * 4;
    if (nt < 8) nt = 8;
    if (n_r < 2) n_r = 2;
    const double r_in = 0.5, half_axis = 1.5;
    SimplicialMesh m;
    m.dim = 2;
    auto vid = [&](int j, int i) { return j * (n_r + 1) + i; };
    for (int j = 0; j <= nt; ++j) {
        double th = M_PI * j / nt;
        double c = std::cos(th), s = std::sin(th);
        // distance from origin to the rectangle along (c, s)
        double r_out = half_axis / std::max(std::abs(c), s);
        for (int i = 0; i <= n_r; ++i) {
            double t = std::pow(static_cast<double>(i) / n_r, grading);
            double r = r_in + t * (r_out - r_in);
            double x = r * c, y = r * s;
            if (std::abs(y) < 1e-13) y = 0.0;
            if (std::abs(x) < 1e-13) x = 0.0;
            m.vertices.push_back({x, y, 0.0});
        }
    }
    for (int j = 0; j < nt; ++j)
        for (int i = 0; i < n_r; ++i) {
            int a = vid(j, i), b = vid(j, i + 1), c = vid(j + 1, i + 1), d = vid(j + 1, i);
            if ((i + j) % 2 == 0) {
                push_tri(m, a, b, c);
                push_tri(m, a, c, d);
            } else {
                push_tri(m, a, b, d);
                push_tri(m, b, c, d);
            }
        }
    for (int j = 0; j < nt; ++j) {
        push_facet(m, vid(j + 1, 0), vid(j, 0), kMarkerDesign);        // circle: domain outside it
        push_facet(m, vid(j, n_r), vid(j + 1, n_r), kMarkerFarField);  // outer rectangle
    }
    for (int i = 0; i < n_r; ++i) {
        push_facet(m, vid(0, i), vid(0, i + 1), kMarkerSymmetry);    // y = 0, x > 0
        push_facet(m, vid(nt, i + 1), vid(nt, i), kMarkerSymmetry);  // y = 0, x < 0
    }
    return m;
}

SimplicialMesh mirror_y(const SimplicialMesh& mesh, double y_plane, int drop_marker) {
    if (mesh.dim != 2) throw std::runtime_error("mirror_y: 2D meshes only");
    const double tol = 1e-12 * std::max(1.0, mesh.bbox_diagonal());
    SimplicialMesh m = mesh;
    std::vector<int> mirrored(mesh.num_vertices(), -1);
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (std::abs(mesh.vertices[v].y - y_plane) <= tol) {
            mirrored[v] = v;
        } else {
            mirrored[v] = m.num_vertices();
            Vec p = mesh.vertices[v];
            p.y = 2.0 * y_plane - p.y;
            m.vertices.push_back(p);
        }
    }
    for (const auto& k : mesh.cells)
        push_tri(m, mirrored[k[0]], mirrored[k[2]], mirrored[k[1]]);  // reflection flips orientation
    std::vector<Facet> keep;
    for (const Facet& f : mesh.boundary_facets) {
        if (f.marker == drop_marker) continue;
        keep.push_back(f);
        Facet g;
        g.v = {mirrored[f.v[1]], mirrored[f.v[0]], -1};
        g.marker = f.marker;
        if (g.v[0] != f.v[0] || g.v[1] != f.v[1]) keep.push_back(g);
    }
    m.boundary_facets = std::move(keep);
    return m;
}

SimplicialMesh benchmark_full(int n_theta, int n_r, double grading) {
    return mirror_y(benchmark_half(n_theta, n_r, grading), 0.0, kMarkerSymmetry);
}

SimplicialMesh ball(int subdivisions, double radius, int marker) {
    if (subdivisions < 0) throw std::runtime_error("ball: subdivisions >= 0");
    // Icosahedron
    const double p = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec> verts = {{-1, p, 0}, {1, p, 0},   {-1, -p, 0}, {1, -p, 0},
                              {0, -1, p}, {0, 1, p},   {0, -1, -p}, {0, 1, -p},
                              {p, 0, -1}, {p, 0, 1},   {-p, 0, -1}, {-p, 0, 1}};
    for (Vec& v : verts) v = normalized(v) * radius;
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},   {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},   {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            int id = static_cast<int>(verts.size());
            verts.push_back(normalized(verts[a] + verts[b]) * radius);
            midpoint.emplace(key, id);
            return id;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    SimplicialMesh m;
    m.dim = 3;
    m.vertices = verts;
    m.vertices.push_back({0.0, 0.0, 0.0});
    int center = m.num_vertices() - 1;
    for (auto& f : faces) {
        // outward orientation relative to the origin
        if (dot(cross(verts[f[1]] - verts[f[0]], verts[f[2]] - verts[f[0]]), verts[f[0]]) < 0.0)
            std::swap(f[1], f[2]);
        m.cells.push_back({center, f[0], f[1], f[2]});
        Facet bf;
        bf.v = f;
        bf.marker = marker;
        m.boundary_facets.push_back(bf);
    }
    for (int c = 0; c < m.num_cells(); ++c)
        if (m.cell_volume(c) <= 0.0) throw std::runtime_error("ball: orientation bug");
    return m;
}

}  // namespace morph::gen
