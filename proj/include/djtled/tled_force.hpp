#pragma once

#include "djtled/djtled_force.hpp"

namespace djtled {

// Strain-displacement data of the conventional total Lagrangian force path.
// B0[a][j] = dh_a/dx_j at the reference configuration.
template <class Real>
struct TledElementConstants {
    Real B0[8][3]{};
    Real V0 = 0;
    bool has_hourglass = false;
    Real k_hg = 0;
    std::array<std::array<Real, 8>, 4> hg_gamma{};
};

// Deformation measures computed explicitly at run time by the reference path.
template <class Real>
struct DeformationState {
    Mat3<Real> X = Mat3<Real>::identity();
    SymMat3<Real> C = SymMat3<Real>::identity();
    SymMat3<Real> Cinv = SymMat3<Real>::identity();
    Real J = 1;
};

// X = I + sum_a u_a (grad h_a)^T.
template <class Real>
inline Mat3<Real> deformation_gradient(const Vec3<Real>* u_elem, const TledElementConstants<Real>& tc,
                                       int n) {
    Mat3<Real> x = Mat3<Real>::identity();
    for (int a = 0; a < n; ++a)
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) x.m[i][j] += u_elem[a][i] * tc.B0[a][j];
    return x;
}

// Fills C, Cinv and J from X; returns false when the element is inverted.
template <class Real>
inline bool deformation_state(const Mat3<Real>& x, DeformationState<Real>& state) {
    state.X = x;
    state.J = det(x);
    if (!(state.J > Real(0))) return false;
    state.C = sym_part(mul_tn(x, x));  // exactly symmetric by construction
    const Mat3<Real> cfull = state.C.full();
    state.Cinv = sym_part(inverse(cfull, det(cfull)));
    return true;
}

// Invariants evaluated the conventional way, straight from C.
template <class Real>
inline InvariantRecord<Real> conventional_invariants(const DeformationState<Real>& state,
                                                     const FibreDirections<Real>* fibres,
                                                     const InvariantSet& need) {
    InvariantRecord<Real> r;
    r.J = state.J;
    const Real cbrt_j = std::cbrt(state.J);
    r.j_m23 = Real(1) / (cbrt_j * cbrt_j);
    r.j_m43 = r.j_m23 * r.j_m23;
    r.valid = need;
    r.valid.i1 = true;

    const SymMat3<Real>& c = state.C;
    r.I1 = trace(c);
    r.Ib1 = r.j_m23 * r.I1;
    r.I3 = state.J * state.J;
    if (need.i2) {
        r.I2 = (r.I1 * r.I1 - ddot(c, c)) / 2;
        r.Ib2 = r.j_m43 * r.I2;
    }
    if (need.i4 || need.i5) {
        const Vec3<Real> ca = mul(c.full(), fibres->a);
        if (need.i4) {
            r.I4 = dot(fibres->a, ca);
            r.Ib4 = r.j_m23 * r.I4;
        }
        if (need.i5) {
            r.I5 = dot(ca, ca);
            r.Ib5 = r.j_m43 * r.I5;
        }
    }
    if (need.i6 || need.i7) {
        const Vec3<Real> cb = mul(c.full(), fibres->b);
        if (need.i6) {
            r.I6 = dot(fibres->b, cb);
            r.Ib6 = r.j_m23 * r.I6;
        }
        if (need.i7) {
            r.I7 = dot(cb, cb);
            r.Ib7 = r.j_m43 * r.I7;
        }
    }
    return r;
}

// Second Piola-Kirchhoff stress assembled from the uncoupled energy:
//   S = 2 J^(-2/3) (dI1 I + dI4 A + dI6 B)
//     + 2 J^(-4/3) (dI2 (I1 I - C) + dI5 (A C + C A) + dI7 (B C + C B))
//     + (-2/3 (dI1 Ib1 + dI4 Ib4 + dI6 Ib6 + 2 (dI2 Ib2 + dI5 Ib5 + dI7 Ib7))
//        + J dJ) C^(-1).
template <class Real>
inline SymMat3<Real> second_pk_stress(const EnergyDerivatives<Real>& d, const InvariantSet& need,
                                      const DeformationState<Real>& state,
                                      const InvariantRecord<Real>& inv,
                                      const FibreDirections<Real>* fibres) {
    SymMat3<Real> iso = d.dI1 * SymMat3<Real>::identity();
    Real dev = d.dI1 * inv.Ib1;
    if (need.i4) {
        iso = iso + d.dI4 * fibres->A;
        dev += d.dI4 * inv.Ib4;
    }
    if (need.i6) {
        iso = iso + d.dI6 * fibres->B;
        dev += d.dI6 * inv.Ib6;
    }
    SymMat3<Real> s = (2 * inv.j_m23) * iso;
    if (need.i2) {
        SymMat3<Real> kernel{inv.I1 - state.C.xx, inv.I1 - state.C.yy, inv.I1 - state.C.zz,
                             -state.C.xy,         -state.C.xz,         -state.C.yz};
        s = s + (2 * inv.j_m43 * d.dI2) * kernel;
        dev += 2 * d.dI2 * inv.Ib2;
    }
    if (need.i5) {
        const Mat3<Real> ac = mul(fibres->A.full(), state.C.full());
        s = s + (2 * inv.j_m43 * d.dI5) * sym_part(ac + transpose(ac));
        dev += 2 * d.dI5 * inv.Ib5;
    }
    if (need.i7) {
        const Mat3<Real> bc = mul(fibres->B.full(), state.C.full());
        s = s + (2 * inv.j_m43 * d.dI7) * sym_part(bc + transpose(bc));
        dev += 2 * d.dI7 * inv.Ib7;
    }
    const Real c = -Real(2) / Real(3) * dev + inv.J * d.dJ;
    return s + c * state.Cinv;
}

template <class Real>
inline SymMat3<Real> second_pk_stress(const Material<Real>& material,
                                      const DeformationState<Real>& state,
                                      const FibreDirections<Real>* fibres = nullptr) {
    const InvariantSet need = material.needs();
    const InvariantRecord<Real> inv = conventional_invariants(state, fibres, need);
    return second_pk_stress(energy_derivatives(material, inv), need, state, inv, fibres);
}

// F = X S B0 V0, all four (or eight) rows computed in full.
template <class Real>
inline ElementForces<Real> tled_element_force(const Mat3<Real>& x, const SymMat3<Real>& s,
                                              const TledElementConstants<Real>& tc, int n) {
    const Mat3<Real> p = mul(x, s.full());
    ElementForces<Real> out;
    out.n = n;
    for (int a = 0; a < n; ++a)
        out.f[a] = tc.V0 * (tc.B0[a][0] * p.col(0) + tc.B0[a][1] * p.col(1) + tc.B0[a][2] * p.col(2));
    return out;
}

// Precomputed model for the conventional reference path.
template <class Real>
struct TledModel {
    ShapeDerivatives<Real> D{};
    InvariantSet need{};
    bool has_fibres = false;
    FibreDirections<Real> fibres{};
    std::vector<TledElementConstants<Real>> elems;

    static TledModel build(const Mesh<Real>& mesh, const Material<Real>& material,
                           Real c_hg = Real(default_hourglass_coefficient), int threads = 1) {
        TledModel m;
        m.D = shape_derivatives<Real>(mesh.kind);
        m.need = material.needs();
        if (m.need.any_fibre_a() || m.need.any_fibre_b()) {
            m.fibres = material.fibres();
            m.has_fibres = true;
        }
        m.elems.resize(size_t(mesh.num_elements()));
        const auto D = m.D;
        parallel_for(mesh.num_elements(), threads, [&](long e) {
            Vec3<Real> coords[8];
            mesh.gather_coords(e, coords);
            const Jacobian<Real> j0 = jacobian0(coords, D, e);
            TledElementConstants<Real>& tc = m.elems[size_t(e)];
            tc.V0 = volume0(j0, D.kind);
            for (int a = 0; a < D.n; ++a)
                for (int j = 0; j < 3; ++j)
                    tc.B0[a][j] = j0.Jinv.m[j][0] * D.d[0][a] + j0.Jinv.m[j][1] * D.d[1][a] +
                                  j0.Jinv.m[j][2] * D.d[2][a];
            if (D.kind == ElementKind::H8) {
                tc.has_hourglass = true;
                tc.hg_gamma = hourglass_vectors(coords, D, j0.Jinv);
                tc.k_hg = c_hg * material.kappa * std::cbrt(tc.V0);
            }
        });
        return m;
    }
};

template <class Real>
inline AssembleStats tled_assemble_internal(const Mesh<Real>& mesh, const TledModel<Real>& model,
                                            const Material<Real>& material, const std::vector<Real>& u,
                                            const NodeElementAdjacency& adj, std::vector<Real>& elem_f,
                                            std::vector<Real>& f_out, int threads,
                                            InversionPolicy policy = InversionPolicy::Abort) {
    const int npe = mesh.npe();
    const long m = mesh.num_elements();
    elem_f.resize(size_t(m) * npe * 3);
    f_out.resize(size_t(mesh.num_dofs()));

    std::atomic<long> first_inverted{-1};
    std::atomic<long> inverted_count{0};
    const FibreDirections<Real>* fibres = model.has_fibres ? &model.fibres : nullptr;

    parallel_for(m, threads, [&](long e) {
        const TledElementConstants<Real>& tc = model.elems[size_t(e)];
        const int* c = mesh.element(e);
        Vec3<Real> u_elem[8];
        for (int a = 0; a < npe; ++a) {
            const Real* src = u.data() + size_t(c[a]) * 3;
            u_elem[a] = {src[0], src[1], src[2]};
        }
        Real* dst = elem_f.data() + size_t(e) * npe * 3;
        DeformationState<Real> state;
        if (!deformation_state(deformation_gradient(u_elem, tc, npe), state)) {
            detail::record_inversion(first_inverted, inverted_count, e);
            for (int i = 0; i < npe * 3; ++i) dst[i] = Real(0);
            return;
        }
        const InvariantRecord<Real> inv = conventional_invariants(state, fibres, model.need);
        const EnergyDerivatives<Real> derivs = energy_derivatives(material, inv);
        const SymMat3<Real> s = second_pk_stress(derivs, model.need, state, inv, fibres);
        ElementForces<Real> ef = tled_element_force(state.X, s, tc, npe);
        if (tc.has_hourglass) hourglass_force(tc.hg_gamma, tc.k_hg, u_elem, ef);
        for (int a = 0; a < npe; ++a) {
            dst[a * 3 + 0] = ef.f[a].x;
            dst[a * 3 + 1] = ef.f[a].y;
            dst[a * 3 + 2] = ef.f[a].z;
        }
    });

    AssembleStats stats;
    stats.inverted_count = inverted_count.load();
    const long first = first_inverted.load();
    if (first >= 0 && policy == InversionPolicy::Abort) {
        stats.first_inverted = first;
        return stats;
    }
    detail::gather_nodal_forces(adj, npe, elem_f, f_out, threads);
    return stats;
}

} // namespace djtled
