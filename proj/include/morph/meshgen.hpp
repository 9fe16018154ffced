#pragma once

#include <array>

#include "morph/mesh.hpp"

namespace morph::gen {

// Structured triangle mesh of [x0,x1] x [y0,y1] with nx*ny quads split along
// alternating diagonals. side_markers = {left, right, bottom, top}.
SimplicialMesh rectangle(int nx, int ny, double x0, double y0, double x1, double y1,
                         std::array<int, 4> side_markers);

// Polar disk: center fan plus n_rings concentric rings of n_theta vertices.
SimplicialMesh disk(int n_theta, int n_rings, double radius = 1.0, int marker = kMarkerDesign);

// Disk scaled to semi-axes (a, b).
SimplicialMesh ellipse(int n_theta, int n_rings, double a, double b, int marker = kMarkerDesign);

// Single-ring fan disk whose n boundary vertices all sit on the first-quadrant
// arc of the circle; the fan center is the vertex centroid.
SimplicialMesh clustered_circle(int n, double radius = 1.0, int marker = kMarkerDesign);

// Structured polar annulus r0 <= r <= r1.
SimplicialMesh annulus(int n_theta, int n_r, double r0, double r1,
                       int inner_marker = kMarkerDesign, int outer_marker = kMarkerFarField);

// The benchmark geometry: a rectangle of half-axis 1.5 around a half-circle of
// radius 0.5 at the origin (upper half plane), meshed with a transfinite
// O-grid graded toward the circle. Markers: circle = design, outer rectangle =
// far-field, the two segments on y = 0 = symmetry. n_theta is rounded up to a
// multiple of 4 so the grid hits the rectangle corners.
SimplicialMesh benchmark_half(int n_theta, int n_r, double grading = 1.5);

// Full benchmark domain obtained by mirroring the half mesh across y = 0.
SimplicialMesh benchmark_full(int n_theta, int n_r, double grading = 1.5);

// Mirror a mesh across the plane y = y_plane, dropping facets that carry
// drop_marker (they become interior).
SimplicialMesh mirror_y(const SimplicialMesh& mesh, double y_plane, int drop_marker);

// Tetrahedral ball: icosphere surface (subdivided icosahedron projected to the
// sphere) coned to the center vertex. Boundary triangles carry the marker.
SimplicialMesh ball(int subdivisions, double radius = 1.0, int marker = kMarkerDesign);

}  // namespace morph::gen
