// End-to-end checks of the command-line tool: spawns the built binary.
#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "djtled/metrics.hpp"

namespace {

const char* kCliPath = DJTLED_CLI_PATH;

struct TempDir {
    std::string path;
    TempDir() {
        char tmpl[] = "/tmp/djtled_cli_XXXXXX";
        path = mkdtemp(tmpl);
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(kCliPath) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string tiny_run_config(const std::string& dir, const std::string& engine) {
    return "[mesh]\ngenerate = box\nkind = T4\nextent = 0.1\ndivisions = 2 2 2\n"
           "[material]\nmodel = NH\nmu = 6567\nkappa = 326210\nrho = 1060\n"
           "[bc]\nfix = zmin all\nprescribe = zmax z 0.005 0.02\n"
           "[time]\ndt = auto\nsafety = 0.8\nt_end = 0.02\nalpha = 100\n"
           "[run]\nengine = " + engine + "\nthreads = 1\n"
           "[output]\nfield = " + dir + "/out.vtk\nreport = " + dir + "/report.txt\n";
}

} // namespace

TEST_CASE("run completes and writes artifacts") {
    TempDir dir;
    write(dir.path + "/run.cfg", tiny_run_config(dir.path, "djtled"));
    REQUIRE(run_cli("run " + dir.path + "/run.cfg") == 0);
    const std::string report = slurp(dir.path + "/report.txt");
    REQUIRE(report.find("steps ") != std::string::npos);
    REQUIRE(report.find("mean_step_us ") != std::string::npos);
    const std::string field = slurp(dir.path + "/out.vtk");
    REQUIRE(field.find("DATASET UNSTRUCTURED_GRID") != std::string::npos);
    REQUIRE(field.find("VECTORS displacement") != std::string::npos);
}

TEST_CASE("missing mesh file exits with the config code") {
    TempDir dir;
    std::string cfg = tiny_run_config(dir.path, "djtled");
    cfg.replace(cfg.find("generate = box\nkind = T4\nextent = 0.1\ndivisions = 2 2 2"),
                std::string("generate = box\nkind = T4\nextent = 0.1\ndivisions = 2 2 2").size(),
                "file = does_not_exist.mesh");
    write(dir.path + "/bad.cfg", cfg);
    REQUIRE(run_cli("run " + dir.path + "/bad.cfg") == 2);
}

TEST_CASE("unknown config keys exit with the config code") {
    TempDir dir;
    write(dir.path + "/bad.cfg", tiny_run_config(dir.path, "djtled") + "[mesh]\nwhat = 1\n");
    REQUIRE(run_cli("run " + dir.path + "/bad.cfg") == 2);
}

TEST_CASE("gross instability diverges with the divergence code") {
    TempDir dir;
    std::string cfg = tiny_run_config(dir.path, "djtled");
    cfg.replace(cfg.find("dt = auto"), std::string("dt = auto").size(), "dt = 0.05");
    write(dir.path + "/unstable.cfg", cfg);
    REQUIRE(run_cli("run " + dir.path + "/unstable.cfg") == 5);
    // And the strict flag refuses to start instead.
    REQUIRE(run_cli("run " + dir.path + "/unstable.cfg --strict-stability") == 3);
}

TEST_CASE("compare reports a tiny field discrepancy and consistent rmse") {
    TempDir dir;
    write(dir.path + "/cmp.cfg", tiny_run_config(dir.path, "both"));
    REQUIRE(run_cli("compare " + dir.path + "/cmp.cfg") == 0);
    const std::string report = slurp(dir.path + "/report.txt");
    const size_t pos = report.find("rmse ");
    REQUIRE(pos != std::string::npos);
    const double rmse_val = std::stod(report.substr(pos + 5));
    REQUIRE(rmse_val < 1e-9);

    // The reported rmse matches the rmse of the two exported fields.
    auto read_field = [&](const std::string& path) {
        const std::string text = slurp(path);
        const size_t v = text.find("VECTORS displacement");
        REQUIRE(v != std::string::npos);
        std::istringstream in(text.substr(v));
        std::string skip;
        in >> skip >> skip >> skip;
        std::vector<double> u;
        double x;
        while (in >> x) u.push_back(x);
        return u;
    };
    const auto u_dj = read_field(dir.path + "/out_djtled.vtk");
    const auto u_tled = read_field(dir.path + "/out_tled.vtk");
    REQUIRE(u_dj.size() == u_tled.size());
    REQUIRE(u_dj.size() == 27 * 3);
    const double recomputed = djtled::rmse(u_dj, u_tled);
    REQUIRE(recomputed == Catch::Approx(rmse_val).margin(1e-12));
}

TEST_CASE("compare demands engine = both") {
    TempDir dir;
    write(dir.path + "/cmp.cfg", tiny_run_config(dir.path, "djtled"));
    REQUIRE(run_cli("compare " + dir.path + "/cmp.cfg") == 2);
}

TEST_CASE("repeated runs are bit identical") {
    TempDir dir;
    write(dir.path + "/run.cfg", tiny_run_config(dir.path, "djtled"));
    REQUIRE(run_cli("run " + dir.path + "/run.cfg") == 0);
    const std::string first = slurp(dir.path + "/out.vtk");
    REQUIRE(run_cli("run " + dir.path + "/run.cfg") == 0);
    const std::string second = slurp(dir.path + "/out.vtk");
    REQUIRE(first == second);
}

TEST_CASE("bench writes the documented csv") {
    TempDir dir;
    std::string cfg = tiny_run_config(dir.path, "djtled");
    cfg += "[bench]\nextent = 0.1\ndivisions = 2\nkinds = T4\nmaterials = NH\nwarmup = 2\n"
           "steps = 10\nthreads = 1\ncsv = " + dir.path + "/bench.csv\n";
    write(dir.path + "/bench.cfg", cfg);
    REQUIRE(run_cli("bench " + dir.path + "/bench.cfg") == 0);
    const std::string csv = slurp(dir.path + "/bench.csv");
    REQUIRE(csv.rfind("dofs,kind,material,engine,threads,mean_step_us,ratio\n", 0) == 0);
    REQUIRE(csv.find("81,T4,NH,djtled,1,") != std::string::npos);
    REQUIRE(csv.find("81,T4,NH,tled,1,") != std::string::npos);
}

TEST_CASE("demo subcommand produces fields and a report") {
    TempDir dir;
    const std::string prefix = dir.path + "/demo";
    REQUIRE(run_cli("demo-brain --divisions 6 6 5 --patch-radius 0.03 --t-end 0.05 --threads 1 --out " +
                    prefix) == 0);
    const std::string report = slurp(prefix + "_report.txt");
    REQUIRE(report.find("rmse ") != std::string::npos);
    REQUIRE(slurp(prefix + "_djtled.vtk").find("VECTORS displacement") != std::string::npos);
    REQUIRE(slurp(prefix + "_tled.vtk").find("VECTORS displacement") != std::string::npos);
}

TEST_CASE("single precision build path works") {
    TempDir dir;
    write(dir.path + "/run.cfg", tiny_run_config(dir.path, "djtled"));
    REQUIRE(run_cli("run " + dir.path + "/run.cfg --precision single") == 0);
    const std::string field = slurp(dir.path + "/out.vtk");
    REQUIRE(field.find("POINTS 27 float") != std::string::npos);
}
