#pragma once

#include <array>
#include <cmath>
#include <type_traits>
#include <vector>

#include "djtled/mesh.hpp"

namespace djtled {

// Preferred fibre directions of an anisotropic material together with the
// derived structural matrices A = a a^T and B = b b^T.
template <class Real>
struct FibreDirections {
    Vec3<Real> a{};
    Vec3<Real> b{};
    bool has_b = false;
    SymMat3<Real> A{};
    SymMat3<Real> B{};

    static FibreDirections from(Vec3<Real> a, const Vec3<Real>* b = nullptr) {
        FibreDirections f;
        f.a = normalise(a, "fibre direction a");
        f.A = outer(f.a);
        if (b) {
            f.b = normalise(*b, "fibre direction b");
            f.B = outer(f.b);
            f.has_b = true;
        }
        return f;
    }

private:
    static Vec3<Real> normalise(Vec3<Real> v, const char* what) {
        const Real n = norm(v);
        if (!(n > Real(0))) throw ConfigError(std::string(what) + " must be a nonzero vector");
        return (Real(1) / n) * v;
    }
};

// The six constant matrices G_kl = J0inv E_kl J0inv^T, where E_kk = e_k e_k^T
// and E_kl = e_k e_l^T + e_l e_k^T. Component order (11,22,33,12,13,23)
// throughout, matching the order of the g vector.
template <class Real>
inline std::array<SymMat3<Real>, 6> g_matrices(const Mat3<Real>& j0inv) {
    const Vec3<Real> q0 = j0inv.col(0), q1 = j0inv.col(1), q2 = j0inv.col(2);
    return {outer(q0),         outer(q1),         outer(q2),
            sym_outer(q0, q1), sym_outer(q0, q2), sym_outer(q1, q2)};
}

// m1[k] = tr(G_k); with a structural matrix S, m[k] = tr(S G_k).
template <class Real>
inline std::array<Real, 6> trace_vector(const std::array<SymMat3<Real>, 6>& G) {
    std::array<Real, 6> m;
    for (int k = 0; k < 6; ++k) m[k] = trace(G[k]);
    return m;
}

template <class Real>
inline std::array<Real, 6> trace_vector(const std::array<SymMat3<Real>, 6>& G, const SymMat3<Real>& S) {
    std::array<Real, 6> m;
    for (int k = 0; k < 6; ++k) m[k] = ddot(S, G[k]);
    return m;
}

// W[p][q] = tr(G_p^T G_q), used to assemble M2 = (m1 m1^T - W) / 2.
template <class Real>
inline Sym6<Real> trace_matrix_w(const std::array<SymMat3<Real>, 6>& G) {
    Sym6<Real> w;
    for (int p = 0; p < 6; ++p)
        for (int q = p; q < 6; ++q) w(p, q) = ddot(G[p], G[q]);
    return w;
}

template <class Real>
inline Sym6<Real> second_invariant_matrix(const std::array<Real, 6>& m1,
                                          const std::array<SymMat3<Real>, 6>& G) {
    const Sym6<Real> w = trace_matrix_w(G);
    Sym6<Real> m2;
    for (int p = 0; p < 6; ++p)
        for (int q = p; q < 6; ++q) m2(p, q) = (m1[p] * m1[q] - w(p, q)) / 2;
    return m2;
}

// M[p][q] = tr(S G_p^T G_q) = (G_p s) . (G_q s) for S = s s^T.
template <class Real>
inline Sym6<Real> trace_matrix(const std::array<SymMat3<Real>, 6>& G, Vec3<Real> s) {
    std::array<Vec3<Real>, 6> gs;
    for (int k = 0; k < 6; ++k) gs[k] = mul(G[k].full(), s);
    Sym6<Real> m;
    for (int p = 0; p < 6; ++p)
        for (int q = p; q < 6; ++q) m(p, q) = dot(gs[p], gs[q]);
    return m;
}

// First-order force tensor 2 V0 J0inv^T K J0inv for a symmetric kernel K.
template <class Real>
inline SymMat3<Real> first_order_tensor(const Mat3<Real>& j0inv, Real v0, const SymMat3<Real>& kernel) {
    return (2 * v0) * congruence_tn(j0inv, kernel);
}

// Second-order force tensors, one per g component:
// 2 V0 J0inv^T (tr(G_k) I - G_k) J0inv.
template <class Real>
inline std::array<SymMat3<Real>, 6> second_order_tensors(const Mat3<Real>& j0inv, Real v0,
                                                         const std::array<SymMat3<Real>, 6>& G) {
    std::array<SymMat3<Real>, 6> t;
    for (int k = 0; k < 6; ++k) {
        const Real tr = trace(G[k]);
        SymMat3<Real> kernel{tr - G[k].xx, tr - G[k].yy, tr - G[k].zz, -G[k].xy, -G[k].xz, -G[k].yz};
        t[k] = (2 * v0) * congruence_tn(j0inv, kernel);
    }
    return t;
}

// Fibre analogues 2 V0 J0inv^T (S G_k + G_k S) J0inv.
template <class Real>
inline std::array<SymMat3<Real>, 6> second_order_tensors(const Mat3<Real>& j0inv, Real v0,
                                                         const std::array<SymMat3<Real>, 6>& G,
                                                         const SymMat3<Real>& S) {
    std::array<SymMat3<Real>, 6> t;
    const Mat3<Real> sf = S.full();
    for (int k = 0; k < 6; ++k) {
        const Mat3<Real> sg = mul(sf, G[k].full());
        SymMat3<Real> kernel{2 * sg.m[0][0], 2 * sg.m[1][1], 2 * sg.m[2][2],
                             sg.m[0][1] + sg.m[1][0], sg.m[0][2] + sg.m[2][0], sg.m[1][2] + sg.m[2][1]};
        t[k] = (2 * v0) * congruence_tn(j0inv, kernel);
    }
    return t;
}

// Hourglass shape vectors of the 1-point hexahedron. gamma[a] is the a-th
// base vector orthogonalised against all affine fields of the element's
// reference geometry.
template <class Real>
inline std::array<std::array<Real, 8>, 4> hourglass_vectors(const Vec3<Real>* coords,
                                                            const ShapeDerivatives<Real>& D,
                                                            const Mat3<Real>& j0inv) {
    // Base vectors: the eta*zeta, xi*zeta, xi*eta and xi*eta*zeta sign
    // patterns of the corner ordering.
    std::array<std::array<Real, 8>, 4> base;
    for (int a = 0; a < 8; ++a) {
        const int xi = h8_corner_sign[a][0], eta = h8_corner_sign[a][1], zeta = h8_corner_sign[a][2];
        base[0][a] = Real(eta * zeta);
        base[1][a] = Real(xi * zeta);
        base[2][a] = Real(xi * eta);
        base[3][a] = Real(xi * eta * zeta);
    }
    // Gradient operator rows b_j[a] = dh_a/dx_j; exact for affine fields.
    Real b[3][8];
    for (int j = 0; j < 3; ++j)
        for (int a = 0; a < 8; ++a)
            b[j][a] = j0inv.m[j][0] * D.d[0][a] + j0inv.m[j][1] * D.d[1][a] + j0inv.m[j][2] * D.d[2][a];

    std::array<std::array<Real, 8>, 4> gamma;
    for (int m = 0; m < 4; ++m) {
        Real hx[3] = {0, 0, 0};
        for (int j = 0; j < 3; ++j)
            for (int a = 0; a < 8; ++a) hx[j] += base[m][a] * coords[a][j];
        for (int a = 0; a < 8; ++a)
            gamma[m][a] = base[m][a] - (hx[0] * b[0][a] + hx[1] * b[1][a] + hx[2] * b[2][a]);
    }
    return gamma;
}

// All time-invariant per-element quantities. Optional blocks are populated
// only when `present` says the configured material needs them; hot fields
// sit at the front of the struct.
template <class Real>
struct ElementConstants {
    Mat3<Real> J0{};
    Real det_J0 = 0;
    Real V0 = 0;
    std::array<Real, 6> m1{};
    SymMat3<Real> I1m{};

    InvariantSet present{};

    Sym6<Real> M2{};
    std::array<SymMat3<Real>, 6> I2m{};

    std::array<Real, 6> m4{};
    SymMat3<Real> I4m{};
    std::array<Real, 6> m6{};
    SymMat3<Real> I6m{};

    Sym6<Real> M5{};
    std::array<SymMat3<Real>, 6> I5m{};
    Sym6<Real> M7{};
    std::array<SymMat3<Real>, 6> I7m{};

    // Hourglass control, H8 only.
    bool has_hourglass = false;
    Real k_hg = 0;
    std::array<std::array<Real, 8>, 4> hg_gamma{};

    // Cold reference data kept for diagnostics and testing.
    Mat3<Real> J0inv{};
    std::array<SymMat3<Real>, 6> G{};
};

// Default hourglass stiffness coefficient in k_hg = c_hg * kappa * V0^(1/3).
inline constexpr double default_hourglass_coefficient = 0.1;

template <class Real>
inline ElementConstants<Real> build_element_constants(
    const Vec3<Real>* coords, const ShapeDerivatives<Real>& D, const InvariantSet& need,
    std::type_identity_t<const FibreDirections<Real>*> fibres = nullptr,
    std::type_identity_t<Real> kappa = 0,
    std::type_identity_t<Real> c_hg = Real(default_hourglass_coefficient), long element_id = -1) {
    if ((need.any_fibre_a() || need.any_fibre_b()) && !fibres)
        throw ConfigError("material depends on fibre invariants but no fibre directions were given");
    if (need.any_fibre_b() && !fibres->has_b)
        throw ConfigError("material depends on the second fibre family but direction b is missing");

    ElementConstants<Real> ec;
    const Jacobian<Real> j0 = jacobian0(coords, D, element_id);
    ec.J0 = j0.J;
    ec.J0inv = j0.Jinv;
    ec.det_J0 = j0.det;
    ec.V0 = volume0(j0, D.kind);
    ec.G = g_matrices(j0.Jinv);
    ec.m1 = trace_vector(ec.G);
    ec.I1m = first_order_tensor(j0.Jinv, ec.V0, SymMat3<Real>::identity());
    ec.present = need;
    ec.present.i1 = true;

    if (need.i2) {
        ec.M2 = second_invariant_matrix(ec.m1, ec.G);
        ec.I2m = second_order_tensors(j0.Jinv, ec.V0, ec.G);
    }
    if (need.i4) {
        ec.m4 = trace_vector(ec.G, fibres->A);
        ec.I4m = first_order_tensor(j0.Jinv, ec.V0, fibres->A);
    }
    if (need.i5) {
        ec.M5 = trace_matrix(ec.G, fibres->a);
        ec.I5m = second_order_tensors(j0.Jinv, ec.V0, ec.G, fibres->A);
    }
    if (need.i6) {
        ec.m6 = trace_vector(ec.G, fibres->B);
        ec.I6m = first_order_tensor(j0.Jinv, ec.V0, fibres->B);
    }
    if (need.i7) {
        ec.M7 = trace_matrix(ec.G, fibres->b);
        ec.I7m = second_order_tensors(j0.Jinv, ec.V0, ec.G, fibres->B);
    }
    if (D.kind == ElementKind::H8) {
        ec.has_hourglass = true;
        ec.hg_gamma = hourglass_vectors(coords, D, j0.Jinv);
        ec.k_hg = c_hg * kappa * std::cbrt(ec.V0);
    }
    return ec;
}

// Per-element constants for a whole mesh; embarrassingly parallel build.
template <class Real>
inline std::vector<ElementConstants<Real>> build_constants(
    const Mesh<Real>& mesh, const InvariantSet& need,
    std::type_identity_t<const FibreDirections<Real>*> fibres = nullptr,
    std::type_identity_t<Real> kappa = 0,
    std::type_identity_t<Real> c_hg = Real(default_hourglass_coefficient), int threads = 1) {
    const auto D = shape_derivatives<Real>(mesh.kind);
    std::vector<ElementConstants<Real>> out(size_t(mesh.num_elements()));
    parallel_for(mesh.num_elements(), threads, [&](long e) {
        Vec3<Real> coords[8];
        mesh.gather_coords(e, coords);
        out[size_t(e)] = build_element_constants(coords, D, need, fibres, kappa, c_hg, e);
    });
    return out;
}

// Lumped nodal masses: each element spreads rho*V0 equally over its nodes.
template <class Real>
inline std::vector<Real> lump_mass(const Mesh<Real>& mesh, Real rho,
                                   const std::vector<ElementConstants<Real>>& constants) {
    if (!(rho > Real(0))) throw ConfigError("density must be positive");
    std::vector<Real> mass(size_t(mesh.num_nodes()), Real(0));
    const int npe = mesh.npe();
    for (long e = 0; e < mesh.num_elements(); ++e) {
        const Real share = rho * constants[size_t(e)].V0 / Real(npe);
        const int* c = mesh.element(e);
        for (int a = 0; a < npe; ++a) mass[c[a]] += share;
    }
    return mass;
}

namespace detail {

template <class Real>
inline Real triangle_area(Vec3<Real> a, Vec3<Real> b, Vec3<Real> c) {
    return norm(cross(b - a, c - a)) / 2;
}

template <class Real>
inline Real quad_area(Vec3<Real> a, Vec3<Real> b, Vec3<Real> c, Vec3<Real> d) {
    return triangle_area(a, b, c) + triangle_area(a, c, d);
}

} // namespace detail

// Characteristic element length: minimum altitude 3 V0 / A_max for T4,
// V0 / A_max for H8.
template <class Real>
inline Real characteristic_length(const Mesh<Real>& mesh, long e, Real v0) {
    Vec3<Real> x[8];
    mesh.gather_coords(e, x);
    Real a_max = 0;
    if (mesh.kind == ElementKind::T4) {
        static constexpr int faces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
        for (auto f : faces) a_max = std::max(a_max, detail::triangle_area(x[f[0]], x[f[1]], x[f[2]]));
        return 3 * v0 / a_max;
    }
    static constexpr int faces[6][4] = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4},
                                        {1, 2, 6, 5}, {2, 3, 7, 6}, {3, 0, 4, 7}};
    for (auto f : faces) a_max = std::max(a_max, detail::quad_area(x[f[0]], x[f[1]], x[f[2]], x[f[3]]));
    return v0 / a_max;
}

// Largest stable explicit time step: min characteristic length over the
// dilatational wave speed c.
template <class Real>
inline Real critical_dt(const Mesh<Real>& mesh, const std::vector<ElementConstants<Real>>& constants,
                        Real wave_speed) {
    Real l_min = std::numeric_limits<Real>::max();
    for (long e = 0; e < mesh.num_elements(); ++e)
        l_min = std::min(l_min, characteristic_length(mesh, e, constants[size_t(e)].V0));
    if (!(l_min > Real(0))) throw MeshError("degenerate element with zero characteristic length");
    return l_min / wave_speed;
}

} // namespace djtled
