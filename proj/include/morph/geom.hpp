#pragma once

#include <array>
#include <cmath>

namespace morph {

// Small geometry vector used for both 2D (z = 0) and 3D points.
struct Vec {
    double x = 0.0, y = 0.0, z = 0.0;

    Vec() = default;
    Vec(double x_, double y_, double z_ = 0.0) : x(x_), y(y_), z(z_) {}

    Vec operator+(const Vec& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec operator-(const Vec& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec operator*(double s) const { return {x * s, y * s, z * s}; }
    Vec operator/(double s) const { return {x / s, y / s, z / s}; }
    Vec operator-() const { return {-x, -y, -z}; }
    Vec& operator+=(const Vec& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        x -= o.x;
        y -= o.y;
        z -= o.z;
        return *this;
    }
    Vec& operator*=(double s) {
        x *= s;
        y *= s;
        z *= s;
        return *this;
    }
    double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
    double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec operator*(double s, const Vec& v) { return v * s; }

inline double dot(const Vec& a, const Vec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline Vec cross(const Vec& a, const Vec& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm2(const Vec& a) { return dot(a, a); }
inline double norm(const Vec& a) { return std::sqrt(norm2(a)); }

inline Vec normalized(const Vec& a) {
    double n = norm(a);
    return n > 0.0 ? a / n : Vec{};
}

// z-component of the 2D cross product (a.x*b.y - a.y*b.x).
inline double cross2(const Vec& a, const Vec& b) { return a.x * b.y - a.y * b.x; }

// Rotate a 2D vector by -90 degrees: maps edge direction to right-hand normal.
inline Vec perp_cw(const Vec& a) { return {a.y, -a.x, 0.0}; }

}  // namespace morph
