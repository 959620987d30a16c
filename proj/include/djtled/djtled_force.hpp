#pragma once

#include <atomic>
#include <limits>

#include "djtled/material.hpp"

namespace djtled {

// Nodal force contributions of one element, rows in connectivity order.
template <class Real>
struct ElementForces {
    int n = 0;
    std::array<Vec3<Real>, 8> f{};
};

// Weighted sum g11*M[0] + g22*M[1] + g33*M[2] + g12*M[3] + g13*M[4] + g23*M[5].
template <class Real>
inline SymMat3<Real> contract_ghat(const std::array<Real, 6>& ghat,
                                   const std::array<SymMat3<Real>, 6>& sixpack) {
    SymMat3<Real> r = ghat[0] * sixpack[0];
    for (int k = 1; k < 6; ++k) r = r + ghat[k] * sixpack[k];
    return r;
}

// Internal nodal forces of one element from the Jacobian operator alone.
// The 3x3 bracket is
//   K = J^(-2/3) Jt^T S + c Jt^(-1),
//   S = dI1 I1m + dI4 I4m + dI6 I6m
//       + J^(-2/3) (dI2 (g.I2m) + dI5 (g.I5m) + dI7 (g.I7m)),
//   c = (-2/3 (dI1 Ib1 + dI4 Ib4 + dI6 Ib6 + 2 (dI2 Ib2 + dI5 Ib5 + dI7 Ib7))
//        + J dJ) V0,
// and the nodal rows are K contracted with the shape derivative columns. For
// T4 the first three derivative columns are unit vectors, so rows 1..3 are
// columns of K and row 0 is their negated sum.
template <class Real>
inline ElementForces<Real> element_force(const ElementConstants<Real>& ec,
                                         const ElementKinematics<Real>& kin,
                                         const EnergyDerivatives<Real>& derivs,
                                         const InvariantSet& need,
                                         const ShapeDerivatives<Real>& D) {
    const InvariantRecord<Real>& inv = kin.inv;

    SymMat3<Real> s = derivs.dI1 * ec.I1m;
    Real dev = derivs.dI1 * inv.Ib1;
    if (need.i4) {
        s = s + derivs.dI4 * ec.I4m;
        dev += derivs.dI4 * inv.Ib4;
    }
    if (need.i6) {
        s = s + derivs.dI6 * ec.I6m;
        dev += derivs.dI6 * inv.Ib6;
    }
    if (need.i2) {
        s = s + (inv.j_m23 * derivs.dI2) * contract_ghat(kin.ghat, ec.I2m);
        dev += 2 * derivs.dI2 * inv.Ib2;
    }
    if (need.i5) {
        s = s + (inv.j_m23 * derivs.dI5) * contract_ghat(kin.ghat, ec.I5m);
        dev += 2 * derivs.dI5 * inv.Ib5;
    }
    if (need.i7) {
        s = s + (inv.j_m23 * derivs.dI7) * contract_ghat(kin.ghat, ec.I7m);
        dev += 2 * derivs.dI7 * inv.Ib7;
    }
    const Real c = (-Real(2) / Real(3) * dev + inv.J * derivs.dJ) * ec.V0;

    const Mat3<Real> k = inv.j_m23 * mul_tn(kin.Jt, s.full()) + c * kin.Jt_inv;

    ElementForces<Real> out;
    out.n = D.n;
    if (D.kind == ElementKind::T4) {
        out.f[1] = k.col(0);
        out.f[2] = k.col(1);
        out.f[3] = k.col(2);
        out.f[0] = Real(-1) * (out.f[1] + out.f[2] + out.f[3]);
    } else {
        for (int a = 0; a < D.n; ++a)
            out.f[a] = D.d[0][a] * k.col(0) + D.d[1][a] * k.col(1) + D.d[2][a] * k.col(2);
    }
    return out;
}

// Stiffness-type hourglass resistance: f_i = k sum_a gamma_a (gamma_a . u_i)
// per direction i. Vanishes on affine displacement fields.
template <class Real>
inline void hourglass_force(const std::array<std::array<Real, 8>, 4>& gamma, Real k,
                            const Vec3<Real>* u_elem, ElementForces<Real>& out) {
    if (k == Real(0)) return;
    for (int m = 0; m < 4; ++m) {
        Vec3<Real> q{};
        for (int b = 0; b < 8; ++b) q = q + gamma[m][b] * u_elem[b];
        for (int b = 0; b < 8; ++b) out.f[b] = out.f[b] + (k * gamma[m][b]) * q;
    }
}

enum class InversionPolicy { Abort, SkipAndReport };

struct AssembleStats {
    long first_inverted = -1;
    long inverted_count = 0;
    bool ok() const { return first_inverted < 0; }
};

namespace detail {

inline void record_inversion(std::atomic<long>& first, std::atomic<long>& count, long e) {
    count.fetch_add(1, std::memory_order_relaxed);
    long cur = first.load(std::memory_order_relaxed);
    while ((cur < 0 || e < cur) && !first.compare_exchange_weak(cur, e)) {
    }
}

// Sums per-element rows into the global force vector; each node's sum runs
// in a fixed ascending element order so results do not depend on threading.
template <class Real>
inline void gather_nodal_forces(const NodeElementAdjacency& adj, int npe,
                                const std::vector<Real>& elem_f, std::vector<Real>& f_out,
                                int threads) {
    const long n = long(adj.offsets.size()) - 1;
    parallel_for(n, threads, [&](long node) {
        Vec3<Real> sum{};
        for (long p = adj.offsets[node]; p < adj.offsets[node + 1]; ++p) {
            const auto [e, a] = adj.pairs[p];
            const Real* src = elem_f.data() + (e * npe + a) * 3;
            sum.x += src[0];
            sum.y += src[1];
            sum.z += src[2];
        }
        f_out[node * 3 + 0] = sum.x;
        f_out[node * 3 + 1] = sum.y;
        f_out[node * 3 + 2] = sum.z;
    });
}

} // namespace detail

// Precomputed model for the direct Jacobian force path.
template <class Real>
struct DjModel {
    ShapeDerivatives<Real> D{};
    InvariantSet need{};
    std::vector<ElementConstants<Real>> elems;

    static DjModel build(const Mesh<Real>& mesh, const Material<Real>& material,
                         Real c_hg = Real(default_hourglass_coefficient), int threads = 1) {
        DjModel m;
        m.D = shape_derivatives<Real>(mesh.kind);
        m.need = material.needs();
        if (m.need.any_fibre_a() || m.need.any_fibre_b()) {
            const FibreDirections<Real> f = material.fibres();
            m.elems = build_constants(mesh, m.need, &f, material.kappa, c_hg, threads);
        } else {
            m.elems = build_constants(mesh, m.need, nullptr, material.kappa, c_hg, threads);
        }
        return m;
    }
};

// Element-parallel internal force assembly. Stage one evaluates each
// element into its own buffer slot; stage two gathers per node. `u` is the
// flat global displacement vector (3 per node).
template <class Real>
inline AssembleStats assemble_internal(const Mesh<Real>& mesh, const DjModel<Real>& model,
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

    parallel_for(m, threads, [&](long e) {
        const ElementConstants<Real>& ec = model.elems[size_t(e)];
        const int* c = mesh.element(e);
        Vec3<Real> u_elem[8];
        for (int a = 0; a < npe; ++a) {
            const Real* src = u.data() + size_t(c[a]) * 3;
            u_elem[a] = {src[0], src[1], src[2]};
        }
        ElementKinematics<Real> kin;
        Real* dst = elem_f.data() + size_t(e) * npe * 3;
        if (!update_kinematics(ec, u_elem, model.D, model.need, kin)) {
            detail::record_inversion(first_inverted, inverted_count, e);
            for (int i = 0; i < npe * 3; ++i) dst[i] = Real(0);
            return;
        }
        const EnergyDerivatives<Real> derivs = energy_derivatives(material, kin.inv);
        ElementForces<Real> ef = element_force(ec, kin, derivs, model.need, model.D);
        if (ec.has_hourglass) hourglass_force(ec.hg_gamma, ec.k_hg, u_elem, ef);
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
