#pragma once

#include "djtled/precompute.hpp"

namespace djtled {

// Strain invariants and their modified (volume-decoupled) forms at one
// element state. Entries outside `valid` are not computed.
template <class Real>
struct InvariantRecord {
    Real J = 1;                    // volume ratio det(Jt)/det(J0)
    Real j_m23 = 1, j_m43 = 1;     // J^(-2/3) and J^(-4/3)
    Real I1 = 0, I2 = 0, I3 = 0, I4 = 0, I5 = 0, I6 = 0, I7 = 0;
    Real Ib1 = 0, Ib2 = 0, Ib4 = 0, Ib5 = 0, Ib6 = 0, Ib7 = 0;
    InvariantSet valid{};
};

// Runtime per-element state derived from the current displacements.
template <class Real>
struct ElementKinematics {
    Mat3<Real> Jt{};
    Mat3<Real> Jt_inv{};
    Real det_Jt = 0;
    Real J = 1;
    std::array<Real, 6> ghat{};
    InvariantRecord<Real> inv{};
};

// Jt = J0 + D * U with U the n x 3 element displacement matrix. Returns
// false on element inversion (det <= 0); the caller owns the error policy.
template <class Real>
inline bool update_jacobian(const Mat3<Real>& j0, const Vec3<Real>* u_elem,
                            const ShapeDerivatives<Real>& D, ElementKinematics<Real>& kin) {
    for (int i = 0; i < 3; ++i) {
        Vec3<Real> du{};
        for (int a = 0; a < D.n; ++a) du = du + D.d[i][a] * u_elem[a];
        kin.Jt.m[i][0] = j0.m[i][0] + du.x;
        kin.Jt.m[i][1] = j0.m[i][1] + du.y;
        kin.Jt.m[i][2] = j0.m[i][2] + du.z;
    }
    kin.det_Jt = det(kin.Jt);
    if (!(kin.det_Jt > Real(0))) return false;
    kin.Jt_inv = inverse(kin.Jt, kin.det_Jt);
    return true;
}

template <class Real>
inline Real volume_ratio(Real det_jt, Real det_j0) { return det_jt / det_j0; }

// The six independent components of Jt Jt^T, order (11,22,33,12,13,23).
template <class Real>
inline std::array<Real, 6> g_vector(const Mat3<Real>& jt) {
    const Vec3<Real> r0 = jt.row(0), r1 = jt.row(1), r2 = jt.row(2);
    return {dot(r0, r0), dot(r1, r1), dot(r2, r2), dot(r0, r1), dot(r0, r2), dot(r1, r2)};
}

// Invariants from the g vector and the precomputed trace tensors:
// I1 = g.m1, I2 = g M2 g, I3 = J^2, I4 = g.m4, I5 = g M5 g, and the B-fibre
// analogues; modified forms scale by powers of J.
template <class Real>
inline InvariantRecord<Real> invariants(const std::array<Real, 6>& ghat, Real j,
                                        const ElementConstants<Real>& ec, const InvariantSet& need) {
    if ((need.i2 && !ec.present.i2) || (need.i4 && !ec.present.i4) || (need.i5 && !ec.present.i5) ||
        (need.i6 && !ec.present.i6) || (need.i7 && !ec.present.i7))
        throw ConfigError("element constants were not built for a required invariant");

    InvariantRecord<Real> r;
    r.J = j;
    const Real cbrt_j = std::cbrt(j);
    r.j_m23 = Real(1) / (cbrt_j * cbrt_j);
    r.j_m43 = r.j_m23 * r.j_m23;
    r.valid = need;
    r.valid.i1 = true;

    r.I1 = ghat[0] * ec.m1[0] + ghat[1] * ec.m1[1] + ghat[2] * ec.m1[2] + ghat[3] * ec.m1[3] +
           ghat[4] * ec.m1[4] + ghat[5] * ec.m1[5];
    r.Ib1 = r.j_m23 * r.I1;
    r.I3 = j * j;

    if (need.i2) {
        r.I2 = ec.M2.quadratic_form(ghat);
        r.Ib2 = r.j_m43 * r.I2;
    }
    if (need.i4) {
        r.I4 = ghat[0] * ec.m4[0] + ghat[1] * ec.m4[1] + ghat[2] * ec.m4[2] + ghat[3] * ec.m4[3] +
               ghat[4] * ec.m4[4] + ghat[5] * ec.m4[5];
        r.Ib4 = r.j_m23 * r.I4;
    }
    if (need.i5) {
        r.I5 = ec.M5.quadratic_form(ghat);
        r.Ib5 = r.j_m43 * r.I5;
    }
    if (need.i6) {
        r.I6 = ghat[0] * ec.m6[0] + ghat[1] * ec.m6[1] + ghat[2] * ec.m6[2] + ghat[3] * ec.m6[3] +
               ghat[4] * ec.m6[4] + ghat[5] * ec.m6[5];
        r.Ib6 = r.j_m23 * r.I6;
    }
    if (need.i7) {
        r.I7 = ec.M7.quadratic_form(ghat);
        r.Ib7 = r.j_m43 * r.I7;
    }
    return r;
}

// Full kinematics update for one element; returns false on inversion.
template <class Real>
inline bool update_kinematics(const ElementConstants<Real>& ec, const Vec3<Real>* u_elem,
                              const ShapeDerivatives<Real>& D, const InvariantSet& need,
                              ElementKinematics<Real>& kin) {
    if (!update_jacobian(ec.J0, u_elem, D, kin)) return false;
    kin.J = volume_ratio(kin.det_Jt, ec.det_J0);
    kin.ghat = g_vector(kin.Jt);
    kin.inv = invariants(kin.ghat, kin.J, ec, need);
    return true;
}

} // namespace djtled
