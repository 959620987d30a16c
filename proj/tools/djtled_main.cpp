// Command-line front end: run / compare / bench / demo-brain.
#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "djtled/bench.hpp"
#include "djtled/demo.hpp"

namespace {

// Exit codes, also documented in the README.
enum ExitCode : int {
    kOk = 0,
    kInternal = 1,
    kConfig = 2,
    kStability = 3,
    kInversion = 4,
    kDivergence = 5,
};

struct CliOptions {
    std::string config_path;
    std::string precision = "double";
    int threads = -1;  // -1: take from config
    std::string on_inversion;  // empty: take from config
    bool strict_stability = false;
};

struct DemoOptions {
    std::string precision = "double";
    int threads = 0;
    double mu = 1006.712;
    double kappa = 50000;
    double rho = 1060;
    std::vector<double> patch_disp{-0.009, 0.009, -0.007};
    double patch_radius = 0.022;
    std::vector<int> divisions{14, 12, 10};
    double t_end = 1.0;
    double t_total = 0.25;
    double alpha = 0;
    std::string out_prefix = "demo_brain";
};

template <class Real>
djtled::RunConfig<Real> load_config(const CliOptions& cli) {
    std::ifstream in(cli.config_path);
    if (!in) throw djtled::ConfigError("cannot open config file '" + cli.config_path + "'");
    auto cfg = djtled::parse_config<Real>(in);
    if (cli.threads >= 1) cfg.threads = cli.threads;
    if (cli.on_inversion == "abort") cfg.on_inversion = djtled::InversionPolicy::Abort;
    else if (cli.on_inversion == "report") cfg.on_inversion = djtled::InversionPolicy::SkipAndReport;
    return cfg;
}

std::string config_dir(const std::string& path) {
    const size_t slash = path.find_last_of('/');
    return slash == std::string::npos ? std::string(".") : path.substr(0, slash);
}

template <class Real>
struct PreparedRun {
    djtled::Mesh<Real> mesh;
    djtled::BoundaryConditions<Real> bcs;
    djtled::DofConstraints<Real> constraints;
    Real dt = 0;
    Real dt_critical = 0;
    Real alpha = 0;
    int threads = 1;
};

// Everything needed to step either engine, resolved from the config.
template <class Real>
PreparedRun<Real> prepare(const djtled::RunConfig<Real>& cfg, const std::string& base_dir,
                          const std::vector<djtled::ElementConstants<Real>>& constants) {
    PreparedRun<Real> prep;
    prep.mesh = djtled::build_mesh(cfg, base_dir);
    prep.bcs = djtled::build_bcs(cfg, prep.mesh);
    prep.constraints = djtled::DofConstraints<Real>::build(prep.bcs, prep.mesh.num_nodes());
    prep.dt_critical =
        djtled::critical_dt(prep.mesh, constants, djtled::dilatational_wave_speed(cfg.material));
    prep.dt = cfg.dt_auto ? cfg.safety * prep.dt_critical : cfg.dt;
    prep.alpha = cfg.alpha_relax ? djtled::relaxation_alpha(cfg.material, prep.mesh) : cfg.alpha;
    prep.threads = cfg.threads > 0 ? cfg.threads : djtled::hardware_threads();
    return prep;
}

template <class Real>
int check_stability(const PreparedRun<Real>& prep, bool strict) {
    if (prep.dt > prep.dt_critical) {
        std::cerr << "warning: dt = " << prep.dt << " s exceeds the stability bound "
                  << prep.dt_critical << " s" << std::endl;
        if (strict) {
            std::cerr << "error: refusing to run an unstable configuration (--strict-stability)"
                      << std::endl;
            return kStability;
        }
    }
    return kOk;
}

template <class Real>
djtled::ProgressHook<Real> make_progress_hook() {
    return [](const djtled::ProgressReport<Real>& r) {
        std::cerr << "  step " << r.step << "  t=" << r.t << " s  max|u|=" << r.max_abs_u << " m  "
                  << r.seconds_per_step * 1e6 << " us/step" << std::endl;
    };
}

template <class Real>
void write_field_file(const std::string& path, const djtled::Mesh<Real>& mesh,
                      const std::vector<Real>& u) {
    std::ofstream out(path);
    if (!out) throw djtled::ConfigError("cannot open output file '" + path + "'");
    out << djtled::export_field(mesh, djtled::field_as_vectors(u));
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    const size_t dot = path.find_last_of('.');
    if (dot == std::string::npos || path.find('/', dot) != std::string::npos)
        return path + suffix;
    return path.substr(0, dot) + suffix + path.substr(dot);
}

template <class Real, class Engine>
djtled::RunResult<Real> execute(Engine& engine, const PreparedRun<Real>& prep,
                                const djtled::RunConfig<Real>& cfg,
                                const std::vector<Real>& node_mass) {
    djtled::RunParams<Real> params;
    params.dt = prep.dt;
    params.t_end = cfg.t_end;
    params.alpha = prep.alpha;
    params.threads = prep.threads;
    params.on_inversion = cfg.on_inversion;
    params.report_stride = cfg.frame_stride;
    return djtled::run_simulation(engine, node_mass, prep.constraints, params,
                                  cfg.frame_stride > 0 ? make_progress_hook<Real>()
                                                       : djtled::ProgressHook<Real>{});
}

template <class Real>
int cmd_run(const CliOptions& cli) {
    const auto cfg = load_config<Real>(cli);
    if (cfg.engine == djtled::EngineChoice::Both)
        throw djtled::ConfigError("engine = both is only valid for 'compare'");

    const auto t0 = std::chrono::steady_clock::now();
    const auto mesh = djtled::build_mesh(cfg, config_dir(cli.config_path));
    std::unique_ptr<djtled::DjEngine<Real>> dj;
    std::unique_ptr<djtled::TledEngine<Real>> tled;
    std::vector<Real> node_mass;
    PreparedRun<Real> prep;
    if (cfg.engine == djtled::EngineChoice::Dj) {
        dj = std::make_unique<djtled::DjEngine<Real>>(mesh, cfg.material);
        node_mass = djtled::lump_mass(mesh, cfg.material.rho, dj->model().elems);
        prep = prepare(cfg, config_dir(cli.config_path), dj->model().elems);
    } else {
        tled = std::make_unique<djtled::TledEngine<Real>>(mesh, cfg.material);
        djtled::DjEngine<Real> probe(mesh, cfg.material);  // volumes for dt and mass
        node_mass = djtled::lump_mass(mesh, cfg.material.rho, probe.model().elems);
        prep = prepare(cfg, config_dir(cli.config_path), probe.model().elems);
    }
    const double precompute_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (const int rc = check_stability(prep, cli.strict_stability); rc != kOk) return rc;

    std::cerr << "running " << (cfg.engine == djtled::EngineChoice::Dj ? "djtled" : "tled") << ": "
              << prep.mesh.num_nodes() << " nodes, " << prep.mesh.num_elements() << " "
              << djtled::to_string(prep.mesh.kind) << " elements, dt=" << prep.dt << " s, "
              << prep.threads << " threads" << std::endl;

    const auto result = cfg.engine == djtled::EngineChoice::Dj
                            ? execute(*dj, prep, cfg, node_mass)
                            : execute(*tled, prep, cfg, node_mass);

    Real max_disp = 0;
    for (Real v : result.state.u_curr) max_disp = std::max(max_disp, std::abs(v));

    if (!cfg.field_path.empty()) write_field_file(cfg.field_path, prep.mesh, result.state.u_curr);
    std::ostringstream report;
    report << std::setprecision(12);
    report << "djtled run report\n";
    report << "engine " << djtled::to_string(cfg.engine) << "\n";
    report << "nodes " << prep.mesh.num_nodes() << "\n";
    report << "elements " << prep.mesh.num_elements() << "\n";
    report << "steps " << result.steps << "\n";
    report << "dt " << prep.dt << "\n";
    report << "dt_critical " << prep.dt_critical << "\n";
    report << "alpha " << prep.alpha << "\n";
    report << "threads " << prep.threads << "\n";
    report << "precompute_s " << precompute_s << "\n";
    report << "wall_total_s " << result.wall_seconds << "\n";
    report << "mean_step_us " << result.mean_step_seconds * 1e6 << "\n";
    report << "max_disp " << max_disp << "\n";
    if (result.inverted_steps > 0) report << "inverted_steps " << result.inverted_steps << "\n";
    if (!cfg.report_path.empty()) {
        std::ofstream out(cfg.report_path);
        if (!out) throw djtled::ConfigError("cannot open report file '" + cfg.report_path + "'");
        out << report.str();
    }
    std::cout << report.str();
    return kOk;
}

template <class Real>
int cmd_compare(const CliOptions& cli) {
    const auto cfg = load_config<Real>(cli);
    if (cfg.engine != djtled::EngineChoice::Both)
        throw djtled::ConfigError("compare requires engine = both");

    const auto t0 = std::chrono::steady_clock::now();
    const auto mesh = djtled::build_mesh(cfg, config_dir(cli.config_path));
    djtled::DjEngine<Real> dj(mesh, cfg.material);
    djtled::TledEngine<Real> tled(mesh, cfg.material);
    const auto node_mass = djtled::lump_mass(mesh, cfg.material.rho, dj.model().elems);
    const auto prep = prepare(cfg, config_dir(cli.config_path), dj.model().elems);
    const double precompute_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (const int rc = check_stability(prep, cli.strict_stability); rc != kOk) return rc;

    std::cerr << "comparing engines: " << prep.mesh.num_nodes() << " nodes, "
              << prep.mesh.num_elements() << " " << djtled::to_string(prep.mesh.kind)
              << " elements, dt=" << prep.dt << " s" << std::endl;

    const auto r_dj = execute(dj, prep, cfg, node_mass);
    const auto r_tled = execute(tled, prep, cfg, node_mass);

    const Real field_rmse = djtled::rmse(r_dj.state.u_curr, r_tled.state.u_curr);
    const double ratio = r_dj.mean_step_seconds / std::max(r_tled.mean_step_seconds, 1e-300);

    std::string dj_field, tled_field;
    if (!cfg.field_path.empty()) {
        dj_field = with_suffix(cfg.field_path, "_djtled");
        tled_field = with_suffix(cfg.field_path, "_tled");
        write_field_file(dj_field, prep.mesh, r_dj.state.u_curr);
        write_field_file(tled_field, prep.mesh, r_tled.state.u_curr);
    }

    std::ostringstream report;
    report << std::setprecision(12);
    report << "djtled compare report\n";
    report << "nodes " << prep.mesh.num_nodes() << "\n";
    report << "elements " << prep.mesh.num_elements() << "\n";
    report << "dofs " << prep.mesh.num_dofs() << "\n";
    report << "steps " << r_dj.steps << "\n";
    report << "dt " << prep.dt << "\n";
    report << "precompute_s " << precompute_s << "\n";
    report << "rmse " << field_rmse << "\n";
    report << "wall_total_s_djtled " << r_dj.wall_seconds << "\n";
    report << "wall_total_s_tled " << r_tled.wall_seconds << "\n";
    report << "mean_step_us_djtled " << r_dj.mean_step_seconds * 1e6 << "\n";
    report << "mean_step_us_tled " << r_tled.mean_step_seconds * 1e6 << "\n";
    report << "ratio " << ratio << "\n";
    const auto [umin, umax] = std::minmax_element(r_tled.state.u_curr.begin(), r_tled.state.u_curr.end());
    if (*umax > *umin) {
        const auto hist = djtled::histogram(djtled::nre(r_dj.state.u_curr, r_tled.state.u_curr), 20);
        report << "nre_histogram buckets " << hist.counts.size() << " width " << hist.bucket_width
               << "\n";
        for (size_t b = 0; b < hist.counts.size(); ++b)
            report << "nre_bucket " << b << " " << hist.counts[b] << "\n";
    } else {
        report << "nre_histogram undefined (uniform reference field)\n";
    }
    if (!dj_field.empty()) report << "field_djtled " << dj_field << "\nfield_tled " << tled_field << "\n";
    if (!cfg.report_path.empty()) {
        std::ofstream out(cfg.report_path);
        if (!out) throw djtled::ConfigError("cannot open report file '" + cfg.report_path + "'");
        out << report.str();
    }
    std::cout << report.str();
    return kOk;
}

template <class Real>
int cmd_bench(const CliOptions& cli) {
    const auto cfg = load_config<Real>(cli);
    djtled::BenchSpec<Real> spec = cfg.bench;
    if (cli.threads >= 1) spec.threads = {cli.threads};
    const auto rows = djtled::run_bench(spec, &std::cerr);
    std::ofstream out(spec.csv_path);
    if (!out) throw djtled::ConfigError("cannot open CSV output '" + spec.csv_path + "'");
    djtled::write_bench_csv(out, rows);
    djtled::write_bench_csv(std::cout, rows);

    // Achievable step rates at the largest size, for visual/haptic budgets.
    long max_dofs = 0;
    for (const auto& r : rows) max_dofs = std::max(max_dofs, r.dofs);
    std::cerr << "achievable step rates at " << max_dofs << " DOFs:" << std::endl;
    for (const auto& r : rows)
        if (r.dofs == max_dofs && r.engine == djtled::EngineChoice::Dj)
            std::cerr << "  " << djtled::to_string(r.kind) << " " << djtled::to_string(r.model)
                      << " threads=" << r.threads << ": " << 1e6 / r.mean_step_us << " steps/s"
                      << std::endl;
    return kOk;
}

template <class Real>
int cmd_demo(const DemoOptions& opt) {
    djtled::DemoSpec<Real> spec;
    spec.mu = Real(opt.mu);
    spec.kappa = Real(opt.kappa);
    spec.rho = Real(opt.rho);
    spec.patch_disp = {Real(opt.patch_disp[0]), Real(opt.patch_disp[1]), Real(opt.patch_disp[2])};
    spec.patch_radius = Real(opt.patch_radius);
    spec.divisions = {opt.divisions[0], opt.divisions[1], opt.divisions[2]};
    spec.t_end = Real(opt.t_end);
    spec.t_total = Real(opt.t_total);
    spec.alpha = Real(opt.alpha);
    spec.threads = opt.threads;
    spec.output_prefix = opt.out_prefix;

    const auto result = djtled::run_demo(spec, &std::cerr);
    std::ostringstream report;
    djtled::write_demo_outputs(result, spec.output_prefix, report);
    {
        std::ofstream out(spec.output_prefix + "_report.txt");
        out << report.str();
    }
    std::cout << report.str();
    return kOk;
}

template <class F>
int guarded(const F& f) {
    try {
        return f();
    } catch (const djtled::ParseError& e) {
        std::cerr << "parse error: " << e.what() << std::endl;
        return kConfig;
    } catch (const djtled::ConfigError& e) {
        std::cerr << "config error: " << e.what() << std::endl;
        return kConfig;
    } catch (const djtled::MeshError& e) {
        std::cerr << "mesh error: " << e.what() << std::endl;
        return kConfig;
    } catch (const djtled::SimulationError& e) {
        std::cerr << "simulation error: " << e.what() << std::endl;
        return e.kind() == djtled::SimulationError::Kind::ElementInversion ? kInversion : kDivergence;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return kInternal;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"djtled: direct Jacobian total Lagrangian explicit dynamics"};
    app.require_subcommand(1);

    CliOptions cli;
    DemoOptions demo;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", cli.config_path, "configuration file")->required();
        sub->add_option("--threads", cli.threads, "override worker thread count");
        sub->add_option("--precision", cli.precision, "floating point width")
            ->check(CLI::IsMember({"single", "double"}));
        sub->add_option("--on-inversion", cli.on_inversion, "element inversion policy")
            ->check(CLI::IsMember({"abort", "report"}));
        sub->add_flag("--strict-stability", cli.strict_stability,
                      "fail instead of warning when dt exceeds the stability bound");
    };

    CLI::App* run = app.add_subcommand("run", "run one engine and export the displacement field");
    add_common(run);
    CLI::App* compare =
        app.add_subcommand("compare", "run both engines on identical inputs and compare fields");
    add_common(compare);
    CLI::App* bench = app.add_subcommand("bench", "benchmark both engines over a mesh-size ladder");
    add_common(bench);

    CLI::App* demo_cmd = app.add_subcommand("demo-brain", "scripted soft-body demo on an ellipsoid");
    demo_cmd->add_option("--precision", demo.precision, "floating point width")
        ->check(CLI::IsMember({"single", "double"}));
    demo_cmd->add_option("--threads", demo.threads, "worker thread count (0 = auto)");
    demo_cmd->add_option("--mu", demo.mu, "shear modulus [Pa]");
    demo_cmd->add_option("--kappa", demo.kappa, "bulk modulus [Pa]");
    demo_cmd->add_option("--rho", demo.rho, "density [kg/m^3]");
    demo_cmd->add_option("--patch-disp", demo.patch_disp, "patch displacement ux uy uz [m]")
        ->expected(3);
    demo_cmd->add_option("--patch-radius", demo.patch_radius, "patch selection radius [m]");
    demo_cmd->add_option("--divisions", demo.divisions, "grid cells per axis")->expected(3);
    demo_cmd->add_option("--t-end", demo.t_end, "simulated time [s]");
    demo_cmd->add_option("--t-total", demo.t_total, "ramp duration [s]");
    demo_cmd->add_option("--alpha", demo.alpha, "damping coefficient [1/s] (0 = relaxation preset)");
    demo_cmd->add_option("--out", demo.out_prefix, "output file prefix");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed())
        return guarded([&] { return cli.precision == "single" ? cmd_run<float>(cli) : cmd_run<double>(cli); });
    if (compare->parsed())
        return guarded(
            [&] { return cli.precision == "single" ? cmd_compare<float>(cli) : cmd_compare<double>(cli); });
    if (bench->parsed())
        return guarded(
            [&] { return cli.precision == "single" ? cmd_bench<float>(cli) : cmd_bench<double>(cli); });
    if (demo_cmd->parsed())
        return guarded(
            [&] { return demo.precision == "single" ? cmd_demo<float>(demo) : cmd_demo<double>(demo); });
    return kInternal;
}
