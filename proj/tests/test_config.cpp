#include <catch2/catch_amalgamated.hpp>

#include "djtled/bench.hpp"
#include "djtled/config.hpp"
#include "djtled/demo.hpp"

using namespace djtled;

namespace {

const char* kFullConfig = R"(# extension benchmark
[mesh]
generate = box
kind = T4
extent = 0.1
divisions = 4 4 4

[material]
model = NH
mu = 6567
kappa = 326210
rho = 1060

[bc]
fix = zmin all
prescribe = zmax z 0.05 1.0

[time]
dt = auto
safety = 0.8
t_end = 1.0
alpha = relax

[run]
engine = both
threads = auto

[output]
field = out.vtk
report = report.txt
frame_stride = 100
)";

} // namespace

TEST_CASE("full config parses") {
    const auto cfg = parse_config_text<double>(kFullConfig);
    REQUIRE(cfg.mesh_file.empty());
    REQUIRE(cfg.kind == ElementKind::T4);
    REQUIRE(cfg.extent.x == 0.1);
    REQUIRE(cfg.divisions == std::array<int, 3>{4, 4, 4});
    REQUIRE(cfg.material.model == MaterialModel::NeoHookean);
    REQUIRE(cfg.material.mu == 6567.0);
    REQUIRE(cfg.fixes.size() == 1);
    REQUIRE(cfg.fixes[0].axes[0]);
    REQUIRE(cfg.prescribes.size() == 1);
    REQUIRE(cfg.prescribes[0].target == 0.05);
    REQUIRE(cfg.dt_auto);
    REQUIRE(cfg.safety == 0.8);
    REQUIRE(cfg.alpha_relax);
    REQUIRE(cfg.engine == EngineChoice::Both);
    REQUIRE(cfg.threads == 0);
    REQUIRE(cfg.field_path == "out.vtk");
    REQUIRE(cfg.frame_stride == 100);
    REQUIRE_FALSE(cfg.has_bench);
}

TEST_CASE("unknown keys and sections are rejected") {
    REQUIRE_THROWS_AS(parse_config_text<double>("[mesh]\nbogus = 1\n[material]\nmodel = NH\nmu = 1\n"
                                                "kappa = 1\nrho = 1\n[time]\nt_end = 1\nalpha = 0\n"),
                      ConfigError);
    REQUIRE_THROWS_AS(parse_config_text<double>("[nonsense]\nx = 1\n"), ConfigError);
    REQUIRE_THROWS_AS(parse_config_text<double>("x = 1\n"), ParseError);  // key outside section
}

TEST_CASE("material variants parse and validate") {
    const char* ti = R"([material]
model = TI
mu = 6567
eta_a = 13134
kappa = 326210
rho = 1060
fibre_a = 1 0 0
[time]
t_end = 1
alpha = 0
)";
    auto cfg = parse_config_text<double>(ti);
    REQUIRE(cfg.material.model == MaterialModel::TransverseIsotropic);
    REQUIRE(cfg.material.eta_a == 13134.0);

    const char* mr = R"([material]
model = MR
c10 = 3283.5
c01 = 3000
kappa = 326210
rho = 1060
[time]
t_end = 1
alpha = 0
)";
    cfg = parse_config_text<double>(mr);
    REQUIRE(cfg.material.model == MaterialModel::MooneyRivlin);
    REQUIRE(cfg.material.c01 == 3000.0);

    // Missing required key.
    REQUIRE_THROWS_AS(parse_config_text<double>("[material]\nmodel = NH\nkappa = 1\nrho = 1\n"
                                                "[time]\nt_end = 1\nalpha = 0\n"),
                      ConfigError);
    // Invalid parameter value.
    REQUIRE_THROWS_AS(parse_config_text<double>("[material]\nmodel = NH\nmu = -5\nkappa = 1\nrho = 1\n"
                                                "[time]\nt_end = 1\nalpha = 0\n"),
                      ConfigError);
}

TEST_CASE("duplicate scalar keys are rejected") {
    REQUIRE_THROWS_AS(parse_config_text<double>("[time]\nt_end = 1\nt_end = 2\nalpha = 0\n"
                                                "[material]\nmodel = NH\nmu = 1\nkappa = 1\nrho = 1\n"),
                      ConfigError);
}

TEST_CASE("plane selectors pick the right faces") {
    const auto mesh = generate_box<double>({0.1, 0.2, 0.3}, {2, 2, 2}, ElementKind::H8);
    const auto zmax = select_plane_nodes(mesh, Plane::ZMax);
    REQUIRE(zmax.size() == 9);
    for (int n : zmax) REQUIRE(mesh.nodes[size_t(n)].z == Catch::Approx(0.3));
    const auto xmin = select_plane_nodes(mesh, Plane::XMin);
    REQUIRE(xmin.size() == 9);
    for (int n : xmin) REQUIRE(mesh.nodes[size_t(n)].x == 0.0);
}

TEST_CASE("boundary conditions are resolved against the mesh") {
    const auto cfg = parse_config_text<double>(kFullConfig);
    const auto mesh = build_mesh(cfg);
    const auto bcs = build_bcs(cfg, mesh);
    REQUIRE(bcs.fixed.size() == 25 * 3);      // 5x5 nodes, all three axes
    REQUIRE(bcs.prescribed.size() == 1);
    REQUIRE(bcs.prescribed[0].nodes.size() == 25);
    REQUIRE_NOTHROW(bcs.validate(mesh.num_nodes()));
}

TEST_CASE("overlapping fix and prescribe rules fail validation") {
    auto cfg = parse_config_text<double>(kFullConfig);
    typename RunConfig<double>::PrescribeRule pr;
    pr.plane = Plane::ZMin;  // collides with the fixed face
    pr.axis = 2;
    pr.target = 0.01;
    pr.t_total = 1.0;
    cfg.prescribes.push_back(pr);
    const auto mesh = build_mesh(cfg);
    REQUIRE_THROWS_AS(build_bcs(cfg, mesh), ConfigError);
}

TEST_CASE("bench section parses") {
    const char* text = R"([material]
model = NH
mu = 1
kappa = 1
rho = 1
[time]
t_end = 1
alpha = 0
[bench]
extent = 0.1
divisions = 4 6
kinds = T4
materials = NH MR
warmup = 5
steps = 20
threads = 1 auto
csv = out.csv
)";
    const auto cfg = parse_config_text<double>(text);
    REQUIRE(cfg.has_bench);
    REQUIRE(cfg.bench.divisions == std::vector<int>{4, 6});
    REQUIRE(cfg.bench.kinds == std::vector<ElementKind>{ElementKind::T4});
    REQUIRE(cfg.bench.models ==
            std::vector<MaterialModel>{MaterialModel::NeoHookean, MaterialModel::MooneyRivlin});
    REQUIRE(cfg.bench.threads == std::vector<int>{1, 0});
    REQUIRE(cfg.bench.csv_path == "out.csv");
}

TEST_CASE("bench csv has the documented header and row structure") {
    std::vector<BenchRow> rows{{3000, ElementKind::T4, MaterialModel::NeoHookean, EngineChoice::Dj, 1,
                                123.4, 0.8},
                               {3000, ElementKind::T4, MaterialModel::NeoHookean, EngineChoice::Tled, 1,
                                154.2, 0.8}};
    std::ostringstream out;
    write_bench_csv(out, rows);
    const std::string text = out.str();
    REQUIRE(text.rfind("dofs,kind,material,engine,threads,mean_step_us,ratio\n", 0) == 0);
    REQUIRE(text.find("3000,T4,NH,djtled,1,") != std::string::npos);
    REQUIRE(text.find("3000,T4,NH,tled,1,") != std::string::npos);
}

TEST_CASE("ellipsoid demo mesh is valid and roughly ellipsoidal") {
    const auto mesh = generate_ellipsoid_mesh<double>({0.05, 0.04, 0.03}, {8, 7, 6});
    REQUIRE(mesh.num_elements() > 100);
    REQUIRE_NOTHROW(validate_mesh(mesh));
    const auto [lo, hi] = bounding_box(mesh);
    REQUIRE(hi.x - lo.x <= 0.1 + 1e-12);
    REQUIRE(hi.z - lo.z <= 0.06 + 1e-12);
    // Volume below the bounding ellipsoid's box but at least half of the
    // ellipsoid volume for this resolution.
    const auto D = shape_derivatives<double>(mesh.kind);
    double vol = 0;
    Vec3<double> c[8];
    for (long e = 0; e < mesh.num_elements(); ++e) {
        mesh.gather_coords(e, c);
        vol += volume0(jacobian0(c, D), mesh.kind);
    }
    const double ve = 4.0 / 3.0 * M_PI * 0.05 * 0.04 * 0.03;
    REQUIRE(vol < ve);
    REQUIRE(vol > 0.5 * ve);
}

TEST_CASE("demo with zero patch displacement yields a zero field") {
    DemoSpec<double> spec;
    spec.divisions = {6, 6, 5};
    spec.patch_disp = {0, 0, 0};
    spec.patch_radius = 0.03;
    spec.t_end = 0.05;
    spec.threads = 1;
    const auto result = run_demo(spec);
    REQUIRE(result.rmse_fields == 0.0);
    for (double v : result.u_dj) REQUIRE(v == 0.0);
    REQUIRE_FALSE(result.nre_defined);
}
