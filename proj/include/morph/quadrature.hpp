#pragma once

#include <array>
#include <cstddef>

namespace morph {

// Barycentric quadrature rules on simplices, exact for polynomials up to
// degree 3. Weights sum to one; multiply by the simplex measure.

struct QPoint2 {
    double l0, l1;  // segment barycentric coordinates
    double w;
};

struct QPoint3 {
    double l0, l1, l2;  // triangle barycentric coordinates
    double w;
};

struct QPoint4 {
    double l0, l1, l2, l3;  // tetrahedron barycentric coordinates
    double w;
};

// Two point Gauss-Legendre on the unit segment.
inline const std::array<QPoint2, 2>& segment_rule_deg3() {
    static const double g = 0.5773502691896257645091488;  // 1/sqrt(3)
    static const std::array<QPoint2, 2> rule = {{
        {0.5 * (1.0 + g), 0.5 * (1.0 - g), 0.5},
        {0.5 * (1.0 - g), 0.5 * (1.0 + g), 0.5},
    }};
    return rule;
}

// Classical 4-point rule with negative centroid weight.
inline const std::array<QPoint3, 4>& triangle_rule_deg3() {
    static const std::array<QPoint3, 4> rule = {{
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, -27.0 / 48.0},
        {0.6, 0.2, 0.2, 25.0 / 48.0},
        {0.2, 0.6, 0.2, 25.0 / 48.0},
        {0.2, 0.2, 0.6, 25.0 / 48.0},
    }};
    return rule;
}

// 5-point Keast rule, degree 3.
inline const std::array<QPoint4, 5>& tet_rule_deg3() {
    static const std::array<QPoint4, 5> rule = {{
        {0.25, 0.25, 0.25, 0.25, -0.8},
        {0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.45},
        {1.0 / 6.0, 0.5, 1.0 / 6.0, 1.0 / 6.0, 0.45},
        {1.0 / 6.0, 1.0 / 6.0, 0.5, 1.0 / 6.0, 0.45},
        {1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0, 0.5, 0.45},
    }};
    return rule;
}

}  // namespace morph
