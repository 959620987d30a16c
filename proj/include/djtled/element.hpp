#pragma once

#include <string>

#include "djtled/core.hpp"

namespace djtled {

enum class ElementKind { T4, H8 };

constexpr int nodes_per_element(ElementKind kind) { return kind == ElementKind::T4 ? 4 : 8; }

inline const char* to_string(ElementKind kind) { return kind == ElementKind::T4 ? "T4" : "H8"; }

// Natural coordinates of the H8 corners; node a sits at
// (corner_sign[a][0], corner_sign[a][1], corner_sign[a][2]).
inline constexpr int h8_corner_sign[8][3] = {
    {-1, -1, -1}, {+1, -1, -1}, {+1, +1, -1}, {-1, +1, -1},
    {-1, -1, +1}, {+1, -1, +1}, {+1, +1, +1}, {-1, +1, +1},
};

// Shape function derivatives with respect to the natural coordinates at the
// single integration point: d[i][a] = dh_a/dxi_i. Constant per element kind.
template <class Real>
struct ShapeDerivatives {
    ElementKind kind;
    int n;
    Real d[3][8];
};

template <class Real>
inline ShapeDerivatives<Real> shape_derivatives(ElementKind kind) {
    ShapeDerivatives<Real> s{};
    s.kind = kind;
    s.n = nodes_per_element(kind);
    if (kind == ElementKind::T4) {
        // h1 = 1-xi-eta-zeta, h2 = xi, h3 = eta, h4 = zeta
        const Real t4[3][4] = {{-1, 1, 0, 0}, {-1, 0, 1, 0}, {-1, 0, 0, 1}};
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 4; ++a) s.d[i][a] = t4[i][a];
    } else {
        // Trilinear derivatives evaluated at the element centre.
        for (int a = 0; a < 8; ++a)
            for (int i = 0; i < 3; ++i) s.d[i][a] = Real(h8_corner_sign[a][i]) / Real(8);
    }
    return s;
}

// Jacobian of the natural-to-physical map, J[i][j] = dx_j/dxi_i.
template <class Real>
struct Jacobian {
    Mat3<Real> J;
    Mat3<Real> Jinv;
    Real det{};
};

// Reference Jacobian of an element: J = D * X with X the n x 3 matrix of
// node coordinates. Throws MeshError for singular or inverted elements.
template <class Real>
inline Jacobian<Real> jacobian0(const Vec3<Real>* coords, const ShapeDerivatives<Real>& D,
                                long element_id = -1) {
    Jacobian<Real> j{};
    for (int i = 0; i < 3; ++i) {
        Vec3<Real> r{};
        for (int a = 0; a < D.n; ++a) r = r + D.d[i][a] * coords[a];
        j.J.m[i][0] = r.x;
        j.J.m[i][1] = r.y;
        j.J.m[i][2] = r.z;
    }
    j.det = det(j.J);
    if (!(j.det > Real(0)))
        throw MeshError("non-positive reference Jacobian determinant (det = " +
                            std::to_string(double(j.det)) + ")",
                        element_id);
    j.Jinv = inverse(j.J, j.det);
    return j;
}

// Initial element volume from the reference Jacobian under 1-point quadrature.
template <class Real>
inline Real volume0(const Jacobian<Real>& j0, ElementKind kind) {
    const Real v = kind == ElementKind::T4 ? j0.det / Real(6) : Real(8) * j0.det;
    if (!(v > Real(0))) throw MeshError("non-positive element volume");
    return v;
}

} // namespace djtled
