#include <catch2/catch_amalgamated.hpp>

#include "djtled/kinematics.hpp"
#include "oracles.hpp"

using namespace djtled;

namespace {

InvariantSet all_invariants() {
    InvariantSet s;
    s.i1 = s.i2 = s.i4 = s.i5 = s.i6 = s.i7 = true;
    return s;
}

} // namespace

TEST_CASE("update_jacobian reproduces the reference state at rest") {
    oracle::Rng rng(1);
    for (ElementKind kind : {ElementKind::T4, ElementKind::H8}) {
        const auto D = shape_derivatives<double>(kind);
        const auto c = oracle::random_element_coords(rng, kind);
        const auto j0 = jacobian0(c.data(), D);
        std::array<Vec3<double>, 8> u{};
        ElementKinematics<double> kin;
        REQUIRE(update_jacobian(j0.J, u.data(), D, kin));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) REQUIRE(kin.Jt.m[i][j] == j0.J.m[i][j]);
        // Uniform translation leaves the Jacobian unchanged.
        for (int a = 0; a < D.n; ++a) u[a] = {0.4, -0.7, 0.2};
        REQUIRE(update_jacobian(j0.J, u.data(), D, kin));
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(kin.Jt.m[i][j] == Catch::Approx(j0.J.m[i][j]).margin(1e-14));
    }
}

TEST_CASE("uniaxial stretch scales the volume ratio") {
    const double lambda = 1.27;
    const auto D = shape_derivatives<double>(ElementKind::H8);
    const auto c = oracle::unit_h8_coords();
    const auto j0 = jacobian0(c.data(), D);
    std::array<Vec3<double>, 8> u{};
    for (int a = 0; a < 8; ++a) u[a].x = (lambda - 1) * c[a].x;
    ElementKinematics<double> kin;
    REQUIRE(update_jacobian(j0.J, u.data(), D, kin));
    REQUIRE(volume_ratio(kin.det_Jt, j0.det) == Catch::Approx(lambda).epsilon(1e-12));
    // Isotropic stretch cubes the ratio.
    for (int a = 0; a < 8; ++a) u[a] = (lambda - 1) * c[a];
    REQUIRE(update_jacobian(j0.J, u.data(), D, kin));
    REQUIRE(volume_ratio(kin.det_Jt, j0.det) == Catch::Approx(lambda * lambda * lambda).epsilon(1e-12));
}

TEST_CASE("inversion is detected") {
    const auto D = shape_derivatives<double>(ElementKind::T4);
    const auto c = oracle::unit_t4_coords();
    const auto j0 = jacobian0(c.data(), D);
    std::array<Vec3<double>, 8> u{};
    u[3].z = -2.0;  // pushes the apex through the base plane
    ElementKinematics<double> kin;
    REQUIRE_FALSE(update_jacobian(j0.J, u.data(), D, kin));
}

TEST_CASE("g_vector matches the explicit product") {
    oracle::Rng rng(2);
    for (int trial = 0; trial < 100; ++trial) {
        const Mat3<double> jt = oracle::random_jacobian(rng);
        const auto g = g_vector(jt);
        const Mat3<double> jjt = mul_nt(jt, jt);
        REQUIRE(g[0] == Catch::Approx(jjt.m[0][0]).epsilon(1e-14));
        REQUIRE(g[1] == Catch::Approx(jjt.m[1][1]).epsilon(1e-14));
        REQUIRE(g[2] == Catch::Approx(jjt.m[2][2]).epsilon(1e-14));
        REQUIRE(g[3] == Catch::Approx(jjt.m[0][1]).epsilon(1e-14));
        REQUIRE(g[4] == Catch::Approx(jjt.m[0][2]).epsilon(1e-14));
        REQUIRE(g[5] == Catch::Approx(jjt.m[1][2]).epsilon(1e-14));
    }
    REQUIRE(g_vector(Mat3<double>::identity()) == std::array<double, 6>{1, 1, 1, 0, 0, 0});
    Mat3<double> diag{};
    diag.m[0][0] = 2;
    diag.m[1][1] = 3;
    diag.m[2][2] = 4;
    REQUIRE(g_vector(diag) == std::array<double, 6>{4, 9, 16, 0, 0, 0});
}

TEST_CASE("invariants at the identity state") {
    const auto D = shape_derivatives<double>(ElementKind::T4);
    const auto c = oracle::unit_t4_coords();
    const auto fib = FibreDirections<double>::from({0.3, -0.5, 0.81}, nullptr);
    auto fib2 = FibreDirections<double>::from(fib.a, &fib.a);  // b may equal a for this check
    const auto ec = build_element_constants(c.data(), D, all_invariants(), &fib2);
    const auto inv = invariants(g_vector(ec.J0), 1.0, ec, all_invariants());
    REQUIRE(inv.I1 == Catch::Approx(3.0).epsilon(1e-12));
    REQUIRE(inv.I2 == Catch::Approx(3.0).epsilon(1e-12));
    REQUIRE(inv.I3 == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(inv.I4 == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(inv.I5 == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(inv.I6 == Catch::Approx(1.0).epsilon(1e-12));
    REQUIRE(inv.I7 == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("invariants under uniaxial stretch with an aligned fibre") {
    const double lambda = 1.1;
    const auto D = shape_derivatives<double>(ElementKind::T4);
    const auto c = oracle::unit_t4_coords();
    const auto fib = FibreDirections<double>::from({1, 0, 0});
    InvariantSet need = all_invariants();
    need.i6 = need.i7 = false;
    auto ec = build_element_constants(c.data(), D, need, &fib);
    std::array<Vec3<double>, 8> u{};
    for (int a = 0; a < 4; ++a) u[a].x = (lambda - 1) * c[a].x;
    ElementKinematics<double> kin;
    REQUIRE(update_kinematics(ec, u.data(), D, need, kin));
    REQUIRE(kin.inv.I1 == Catch::Approx(3.21).epsilon(1e-12));
    REQUIRE(kin.inv.I2 == Catch::Approx(3.42).epsilon(1e-12));
    REQUIRE(kin.inv.I3 == Catch::Approx(1.21).epsilon(1e-12));
    REQUIRE(kin.inv.I4 == Catch::Approx(1.21).epsilon(1e-12));
}

TEST_CASE("invariants match the conventional formulas on random states") {
    oracle::Rng rng(404);
    for (ElementKind kind : {ElementKind::T4, ElementKind::H8}) {
        const auto D = shape_derivatives<double>(kind);
        for (int trial = 0; trial < 300; ++trial) {
            const auto coords = oracle::random_element_coords(rng, kind);
            const Vec3<double> a = oracle::random_unit_vector(rng);
            const Vec3<double> b = oracle::random_unit_vector(rng);
            const auto fib = FibreDirections<double>::from(a, &b);
            const auto ec = build_element_constants(coords.data(), D, all_invariants(), &fib);
            const auto u = oracle::random_admissible_displacements(rng, coords, kind);
            ElementKinematics<double> kin;
            REQUIRE(update_kinematics(ec, u.data(), D, all_invariants(), kin));
            const auto ref = oracle::conventional_invariants(ec.J0, kin.Jt, a, b);
            REQUIRE(kin.inv.I1 == Catch::Approx(ref.i1).epsilon(1e-12));
            REQUIRE(kin.inv.I2 == Catch::Approx(ref.i2).epsilon(1e-12));
            REQUIRE(kin.inv.I3 == Catch::Approx(ref.i3).epsilon(1e-12));
            REQUIRE(kin.inv.I4 == Catch::Approx(ref.i4).epsilon(1e-12));
            REQUIRE(kin.inv.I5 == Catch::Approx(ref.i5).epsilon(1e-12));
            REQUIRE(kin.inv.I6 == Catch::Approx(ref.i6).epsilon(1e-12));
            REQUIRE(kin.inv.I7 == Catch::Approx(ref.i7).epsilon(1e-12));
            // I3 = J^2 by construction.
            REQUIRE(kin.inv.I3 == Catch::Approx(kin.J * kin.J).epsilon(1e-12));
            // Modified forms scale with powers of J.
            REQUIRE(kin.inv.Ib1 == Catch::Approx(std::pow(kin.J, -2.0 / 3.0) * kin.inv.I1).epsilon(1e-12));
            REQUIRE(kin.inv.Ib2 == Catch::Approx(std::pow(kin.J, -4.0 / 3.0) * kin.inv.I2).epsilon(1e-12));
        }
    }
}

TEST_CASE("rigid motion leaves the invariants at their rest values") {
    oracle::Rng rng(505);
    for (ElementKind kind : {ElementKind::T4, ElementKind::H8}) {
        const auto D = shape_derivatives<double>(kind);
        for (int trial = 0; trial < 50; ++trial) {
            const auto coords = oracle::random_element_coords(rng, kind);
            const Vec3<double> a = oracle::random_unit_vector(rng);
            const Vec3<double> b = oracle::random_unit_vector(rng);
            const auto fib = FibreDirections<double>::from(a, &b);
            const auto ec = build_element_constants(coords.data(), D, all_invariants(), &fib);
            const Mat3<double> r = oracle::random_rotation(rng);
            const Vec3<double> shift{oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1),
                                     oracle::uniform(rng, -1, 1)};
            std::array<Vec3<double>, 8> u{};
            for (int n = 0; n < D.n; ++n) u[n] = mul(r, coords[n]) + shift - coords[n];
            ElementKinematics<double> kin;
            REQUIRE(update_kinematics(ec, u.data(), D, all_invariants(), kin));
            REQUIRE(kin.inv.I1 == Catch::Approx(3.0).margin(1e-12));
            REQUIRE(kin.inv.I2 == Catch::Approx(3.0).margin(1e-12));
            REQUIRE(kin.inv.I3 == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(kin.inv.I4 == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(kin.inv.I5 == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(kin.inv.I6 == Catch::Approx(1.0).margin(1e-12));
            REQUIRE(kin.inv.I7 == Catch::Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("invariants are objective under superposed rotations") {
    oracle::Rng rng(606);
    const auto D = shape_derivatives<double>(ElementKind::T4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto coords = oracle::random_element_coords(rng, ElementKind::T4);
        const Vec3<double> a = oracle::random_unit_vector(rng);
        const Vec3<double> b = oracle::random_unit_vector(rng);
        const auto fib = FibreDirections<double>::from(a, &b);
        const auto ec = build_element_constants(coords.data(), D, all_invariants(), &fib);
        const auto u = oracle::random_admissible_displacements(rng, coords, ElementKind::T4);
        ElementKinematics<double> kin;
        REQUIRE(update_kinematics(ec, u.data(), D, all_invariants(), kin));

        const Mat3<double> r = oracle::random_rotation(rng);
        std::array<Vec3<double>, 8> u_rot{};
        for (int n = 0; n < 4; ++n) u_rot[n] = mul(r, coords[n] + u[n]) - coords[n];
        ElementKinematics<double> kin_rot;
        REQUIRE(update_kinematics(ec, u_rot.data(), D, all_invariants(), kin_rot));
        // ghat itself changes, the invariants do not.
        REQUIRE(kin_rot.inv.I1 == Catch::Approx(kin.inv.I1).epsilon(1e-11));
        REQUIRE(kin_rot.inv.I2 == Catch::Approx(kin.inv.I2).epsilon(1e-11));
        REQUIRE(kin_rot.inv.I3 == Catch::Approx(kin.inv.I3).epsilon(1e-11));
        REQUIRE(kin_rot.inv.I4 == Catch::Approx(kin.inv.I4).epsilon(1e-11));
        REQUIRE(kin_rot.inv.I5 == Catch::Approx(kin.inv.I5).epsilon(1e-11));
        REQUIRE(kin_rot.inv.I6 == Catch::Approx(kin.inv.I6).epsilon(1e-11));
        REQUIRE(kin_rot.inv.I7 == Catch::Approx(kin.inv.I7).epsilon(1e-11));
    }
}

TEST_CASE("invariants demand the matching constant blocks") {
    const auto D = shape_derivatives<double>(ElementKind::T4);
    const auto c = oracle::unit_t4_coords();
    const auto ec = build_element_constants(c.data(), D, InvariantSet{true});
    InvariantSet want;
    want.i1 = want.i2 = true;
    REQUIRE_THROWS_AS(invariants(g_vector(ec.J0), 1.0, ec, want), ConfigError);
}
