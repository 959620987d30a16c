#include <catch2/catch_amalgamated.hpp>

#include "djtled/precompute.hpp"
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

TEST_CASE("G matrices at identity reference Jacobian") {
    const auto G = g_matrices(Mat3<double>::identity());
    REQUIRE(G[0].xx == 1.0);
    REQUIRE(G[0].yy == 0.0);
    REQUIRE(G[3].xy == 1.0);  // e1 e2^T + e2 e1^T
    REQUIRE(G[3].xx == 0.0);
    const auto d = Mat3<double>::identity();
    Mat3<double> diag2 = d;
    diag2.m[0][0] = 2;
    const auto Gd = g_matrices(diag2);  // J0inv = diag(2,1,1)
    REQUIRE(Gd[0].xx == 4.0);
    REQUIRE(Gd[0].yy == 0.0);
    REQUIRE(Gd[0].zz == 0.0);
}

TEST_CASE("G matrices reconstruct the Cauchy-Green tensor") {
    oracle::Rng rng(101);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat3<double> j0 = oracle::random_jacobian(rng);
        const Mat3<double> jt = oracle::random_jacobian(rng);
        const auto G = g_matrices(inverse(j0, det(j0)));
        const auto ghat = g_vector(jt);
        Mat3<double> c_sum{};
        for (int k = 0; k < 6; ++k) c_sum = c_sum + ghat[k] * G[k].full();
        const Mat3<double> c_ref = oracle::explicit_cauchy_green(j0, jt);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                REQUIRE(c_sum.m[i][j] == Catch::Approx(c_ref.m[i][j]).epsilon(1e-12).margin(1e-13));
    }
}

TEST_CASE("trace vectors at identity") {
    const auto G = g_matrices(Mat3<double>::identity());
    const auto m1 = trace_vector(G);
    const std::array<double, 6> expect{1, 1, 1, 0, 0, 0};
    for (int k = 0; k < 6; ++k) REQUIRE(m1[k] == expect[k]);
    const auto fib = FibreDirections<double>::from({1, 0, 0});
    const auto m4 = trace_vector(G, fib.A);
    const std::array<double, 6> expect4{1, 0, 0, 0, 0, 0};
    for (int k = 0; k < 6; ++k) REQUIRE(m4[k] == expect4[k]);
}

TEST_CASE("trace matrices at identity") {
    const auto G = g_matrices(Mat3<double>::identity());
    const auto W = trace_matrix_w(G);
    const double diag[6] = {1, 1, 1, 2, 2, 2};
    for (int p = 0; p < 6; ++p)
        for (int q = p; q < 6; ++q) REQUIRE(W(p, q) == (p == q ? diag[p] : 0.0));
    const auto m1 = trace_vector(G);
    const auto M2 = second_invariant_matrix(m1, G);
    for (int p = 0; p < 3; ++p) {
        REQUIRE(M2(p, p) == 0.0);
        for (int q = p + 1; q < 3; ++q) REQUIRE(M2(p, q) == 0.5);
        REQUIRE(M2(p + 3, p + 3) == -1.0);
    }
    const std::array<double, 6> ghat_id{1, 1, 1, 0, 0, 0};
    REQUIRE(M2.quadratic_form(ghat_id) == 3.0);
}

TEST_CASE("trace tensors match the conventional invariants on random states") {
    oracle::Rng rng(202);
    for (int trial = 0; trial < 1000; ++trial) {
        const Mat3<double> j0 = oracle::random_jacobian(rng);
        const Mat3<double> jt = oracle::random_jacobian(rng);
        const Vec3<double> a = oracle::random_unit_vector(rng);
        const Vec3<double> b = oracle::random_unit_vector(rng);
        const auto j0inv = inverse(j0, det(j0));
        const auto G = g_matrices(j0inv);
        const auto ghat = g_vector(jt);
        const auto ref = oracle::conventional_invariants(j0, jt, a, b);

        const auto m1 = trace_vector(G);
        double i1 = 0;
        for (int k = 0; k < 6; ++k) i1 += ghat[k] * m1[k];
        REQUIRE(i1 == Catch::Approx(ref.i1).epsilon(1e-12));

        const auto M2 = second_invariant_matrix(m1, G);
        REQUIRE(M2.quadratic_form(ghat) == Catch::Approx(ref.i2).epsilon(1e-12));

        const auto fib_a = FibreDirections<double>::from(a);
        const auto m4 = trace_vector(G, fib_a.A);
        double i4 = 0;
        for (int k = 0; k < 6; ++k) i4 += ghat[k] * m4[k];
        REQUIRE(i4 == Catch::Approx(ref.i4).epsilon(1e-12));

        const auto M5 = trace_matrix(G, a);
        REQUIRE(M5.quadratic_form(ghat) == Catch::Approx(ref.i5).epsilon(1e-12));

        const auto fib_b = FibreDirections<double>::from(b);
        const auto m6 = trace_vector(G, fib_b.A);
        double i6 = 0;
        for (int k = 0; k < 6; ++k) i6 += ghat[k] * m6[k];
        REQUIRE(i6 == Catch::Approx(ref.i6).epsilon(1e-12));

        const auto M7 = trace_matrix(G, b);
        REQUIRE(M7.quadratic_form(ghat) == Catch::Approx(ref.i7).epsilon(1e-12));
    }
}

TEST_CASE("first-order tensors at identity") {
    const double v0 = 1.0 / 6.0;
    const auto I1m = first_order_tensor(Mat3<double>::identity(), v0, SymMat3<double>::identity());
    REQUIRE(I1m.xx == Catch::Approx(1.0 / 3.0));
    REQUIRE(I1m.yy == Catch::Approx(1.0 / 3.0));
    REQUIRE(I1m.xy == 0.0);
    const auto fib = FibreDirections<double>::from({1, 0, 0});
    const auto I4m = first_order_tensor(Mat3<double>::identity(), v0, fib.A);
    REQUIRE(I4m.xx == Catch::Approx(2 * v0));
    REQUIRE(I4m.yy == 0.0);
}

TEST_CASE("element constants populate exactly the requested blocks") {
    const auto c = oracle::unit_t4_coords();
    const auto D = shape_derivatives<double>(ElementKind::T4);
    InvariantSet need;
    need.i1 = true;
    const auto ec = build_element_constants(c.data(), D, need);
    REQUIRE(ec.present.i1);
    REQUIRE_FALSE(ec.present.i2);
    REQUIRE(ec.V0 == Catch::Approx(1.0 / 6.0));
    // Fibre blocks require directions.
    InvariantSet need4 = need;
    need4.i4 = true;
    REQUIRE_THROWS_AS(build_element_constants(c.data(), D, need4), ConfigError);
}

TEST_CASE("hourglass vectors of the axis-aligned cube are the base modes") {
    const auto c = oracle::unit_h8_coords();
    const auto D = shape_derivatives<double>(ElementKind::H8);
    const auto j0 = jacobian0(c.data(), D);
    const auto gamma = hourglass_vectors(c.data(), D, j0.Jinv);
    // For this geometry the base vectors are already orthogonal to all
    // affine fields.
    for (int m = 0; m < 4; ++m)
        for (int a = 0; a < 8; ++a) {
            const int s[3] = {h8_corner_sign[a][0], h8_corner_sign[a][1], h8_corner_sign[a][2]};
            const double base[4] = {double(s[1] * s[2]), double(s[0] * s[2]), double(s[0] * s[1]),
                                    double(s[0] * s[1] * s[2])};
            REQUIRE(gamma[m][a] == Catch::Approx(base[m]).margin(1e-14));
        }
}

TEST_CASE("hourglass vectors annihilate affine fields on random elements") {
    oracle::Rng rng(303);
    const auto D = shape_derivatives<double>(ElementKind::H8);
    for (int trial = 0; trial < 200; ++trial) {
        const auto c = oracle::random_element_coords(rng, ElementKind::H8, 0.25);
        const auto j0 = jacobian0(c.data(), D);
        const auto gamma = hourglass_vectors(c.data(), D, j0.Jinv);
        const double cst = oracle::uniform(rng, -2, 2);
        const Vec3<double> w{oracle::uniform(rng, -2, 2), oracle::uniform(rng, -2, 2),
                             oracle::uniform(rng, -2, 2)};
        for (int m = 0; m < 4; ++m) {
            double sum = 0, affine = 0;
            for (int a = 0; a < 8; ++a) {
                sum += gamma[m][a];
                affine += gamma[m][a] * (cst + dot(w, c[a]));
            }
            REQUIRE(sum == Catch::Approx(0.0).margin(1e-12));
            REQUIRE(affine == Catch::Approx(0.0).margin(1e-12));
            for (int i = 0; i < 3; ++i) {
                double coord = 0;
                for (int a = 0; a < 8; ++a) coord += gamma[m][a] * c[a][i];
                REQUIRE(coord == Catch::Approx(0.0).margin(1e-12));
            }
        }
    }
}

TEST_CASE("lumped masses split element mass equally and conserve total mass") {
    {
        // Single tetra scaled to unit volume.
        auto c = oracle::unit_t4_coords();
        const double s = std::cbrt(6.0);
        Mesh<double> mesh;
        mesh.kind = ElementKind::T4;
        for (int a = 0; a < 4; ++a) mesh.nodes.push_back(s * c[a]);
        mesh.conn = {0, 1, 2, 3};
        const auto ec = build_constants(mesh, InvariantSet{true});
        REQUIRE(ec[0].V0 == Catch::Approx(1.0).epsilon(1e-12));
        const auto mass = lump_mass(mesh, 1060.0, ec);
        for (double m : mass) REQUIRE(m == Catch::Approx(265.0).epsilon(1e-12));
    }
    {
        const auto mesh = generate_box<double>({0.2, 0.1, 0.1}, {3, 2, 2}, ElementKind::T4);
        const auto ec = build_constants(mesh, InvariantSet{true});
        const auto mass = lump_mass(mesh, 1060.0, ec);
        double total = 0;
        for (double m : mass) total += m;
        REQUIRE(total == Catch::Approx(1060.0 * 0.2 * 0.1 * 0.1).epsilon(1e-12));
    }
    {
        // A shared node accumulates both element contributions.
        Mesh<double> mesh;
        mesh.kind = ElementKind::T4;
        mesh.nodes = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 1}};
        mesh.conn = {0, 1, 2, 3, 4, 2, 1, 3};
        validate_mesh(mesh);
        const auto ec = build_constants(mesh, InvariantSet{true});
        const auto mass = lump_mass(mesh, 4.0, ec);
        REQUIRE(mass[1] == Catch::Approx(ec[0].V0 + ec[1].V0).epsilon(1e-12));
        REQUIRE(mass[0] == Catch::Approx(ec[0].V0).epsilon(1e-12));
    }
}

TEST_CASE("critical time step arithmetic") {
    // mu = 6567 Pa, kappa = 326210 Pa, rho = 1060 kg/m^3 gives a
    // dilatational wave speed of about 17.78 m/s.
    const double c = std::sqrt((326210.0 + 4.0 / 3.0 * 6567.0) / 1060.0);
    REQUIRE(c == Catch::Approx(17.78).epsilon(1e-3));
    REQUIRE(0.01 / c == Catch::Approx(5.6e-4).epsilon(2e-2));
}

TEST_CASE("critical_dt scales linearly with mesh size") {
    const double c = 17.78;
    auto mesh = generate_box<double>({0.1, 0.1, 0.1}, {2, 2, 2}, ElementKind::T4);
    const auto ec = build_constants(mesh, InvariantSet{true});
    const double dt1 = critical_dt(mesh, ec, c);
    for (auto& p : mesh.nodes) p = 0.5 * p;
    const auto ec2 = build_constants(mesh, InvariantSet{true});
    const double dt2 = critical_dt(mesh, ec2, c);
    REQUIRE(dt2 == Catch::Approx(dt1 / 2).epsilon(1e-12));
}

TEST_CASE("characteristic length of regular shapes") {
    // Cube cell: V/A = h for H8.
    auto hex = generate_box<double>({0.2, 0.2, 0.2}, {2, 2, 2}, ElementKind::H8);
    const auto ec = build_constants(hex, InvariantSet{true});
    REQUIRE(characteristic_length(hex, 0, ec[0].V0) == Catch::Approx(0.1).epsilon(1e-12));
}
