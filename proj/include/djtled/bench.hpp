#pragma once

#include <iomanip>
#include <ostream>

#include "djtled/config.hpp"

namespace djtled {

// Canonical material parameter family used by the benchmark sweep: soft
// tissue-like moduli, fibres along x (and y for the orthotropic model).
template <class Real>
inline Material<Real> bench_material(MaterialModel model) {
    const Real mu = Real(6567), kappa = Real(326210), rho = Real(1060);
    switch (model) {
        case MaterialModel::NeoHookean: return Material<Real>::neo_hookean(mu, kappa, rho);
        case MaterialModel::TransverseIsotropic:
            return Material<Real>::transverse_isotropic(mu, 2 * mu, kappa, rho, {1, 0, 0});
        case MaterialModel::Orthotropic:
            return Material<Real>::orthotropic(mu, 2 * mu, 2 * mu, kappa, rho, {1, 0, 0}, {0, 1, 0});
        case MaterialModel::MooneyRivlin:
            return Material<Real>::mooney_rivlin(mu / 2, Real(3000), kappa, rho);
    }
    throw ConfigError("unknown material model");
}

struct BenchRow {
    long dofs = 0;
    ElementKind kind = ElementKind::T4;
    MaterialModel model = MaterialModel::NeoHookean;
    EngineChoice engine = EngineChoice::Dj;
    int threads = 1;
    double mean_step_us = 0;
    double ratio = 0;  // DJ mean / TLED mean of the matching pair
};

namespace detail {

// Times `steps` solver steps after `warmup` steps, mean microseconds per
// step. The box is driven by a small ramped extension so the states are
// representative.
template <class Real, class Engine>
inline double time_steps(Engine& engine, const Mesh<Real>& mesh, const Material<Real>& material,
                         long warmup, long steps, int threads) {
    const auto bc_nodes_bottom = select_plane_nodes(mesh, Plane::ZMin);
    const auto bc_nodes_top = select_plane_nodes(mesh, Plane::ZMax);
    BoundaryConditions<Real> bcs;
    for (int n : bc_nodes_bottom) bcs.fixed.emplace_back(n, 2);
    PrescribedRamp<Real> ramp;
    ramp.nodes = bc_nodes_top;
    ramp.axis = 2;
    const auto [lo, hi] = bounding_box(mesh);
    ramp.target = (hi.z - lo.z) * Real(0.01);
    const auto D = shape_derivatives<Real>(mesh.kind);

    // Conservative fixed fraction of the stability bound.
    std::vector<Real> v0(size_t(mesh.num_elements()));
    {
        Vec3<Real> c[8];
        for (long e = 0; e < mesh.num_elements(); ++e) {
            mesh.gather_coords(e, c);
            v0[size_t(e)] = volume0(jacobian0(c, D), mesh.kind);
        }
    }
    Real l_min = std::numeric_limits<Real>::max();
    for (long e = 0; e < mesh.num_elements(); ++e)
        l_min = std::min(l_min, characteristic_length(mesh, e, v0[size_t(e)]));
    const Real dt = Real(0.4) * l_min / dilatational_wave_speed(material);
    ramp.t_total = dt * Real(warmup + steps);
    bcs.prescribed.push_back(ramp);

    std::vector<Real> node_mass(size_t(mesh.num_nodes()), Real(0));
    {
        const int npe = mesh.npe();
        for (long e = 0; e < mesh.num_elements(); ++e) {
            const Real share = material.rho * v0[size_t(e)] / Real(npe);
            const int* c = mesh.element(e);
            for (int a = 0; a < npe; ++a) node_mass[size_t(c[a])] += share;
        }
    }

    const auto bc = DofConstraints<Real>::build(bcs, mesh.num_nodes());
    SimState<Real> state = SimState<Real>::rest(mesh.num_dofs());
    const auto coeffs = UpdateCoeffs<Real>::build(node_mass, dt, Real(10));
    std::vector<Real> scratch;

    auto step_once = [&]() {
        const StepOutcome oc =
            advance_step(state, engine, coeffs, bc, dt, threads, InversionPolicy::Abort, scratch);
        if (!oc.ok) throw SimulationError(SimulationError::Kind::Divergence, "bench run failed", state.step);
    };
    for (long s = 0; s < warmup; ++s) step_once();
    const auto t0 = std::chrono::steady_clock::now();
    for (long s = 0; s < steps; ++s) step_once();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::micro>(t1 - t0).count() / double(steps);
}

} // namespace detail

// Runs the sweep: for every size, kind, material and thread count, both
// engines are timed on identical problems.
template <class Real>
inline std::vector<BenchRow> run_bench(const BenchSpec<Real>& spec, std::ostream* progress = nullptr) {
    std::vector<BenchRow> rows;
    for (int div : spec.divisions) {
        for (ElementKind kind : spec.kinds) {
            const Mesh<Real> mesh =
                generate_box<Real>({spec.extent, spec.extent, spec.extent}, {div, div, div}, kind);
            for (MaterialModel model : spec.models) {
                const Material<Real> material = bench_material<Real>(model);
                DjEngine<Real> dj(mesh, material);
                TledEngine<Real> tled(mesh, material);
                for (int threads : spec.threads) {
                    const int t = threads > 0 ? threads : hardware_threads();
                    if (progress)
                        *progress << "bench: div=" << div << " kind=" << to_string(kind)
                                  << " material=" << to_string(model) << " threads=" << t << "..."
                                  << std::endl;
                    const double us_dj =
                        detail::time_steps(dj, mesh, material, spec.warmup, spec.steps, t);
                    const double us_tled =
                        detail::time_steps(tled, mesh, material, spec.warmup, spec.steps, t);
                    const double ratio = us_dj / us_tled;
                    rows.push_back({mesh.num_dofs(), kind, model, EngineChoice::Dj, t, us_dj, ratio});
                    rows.push_back({mesh.num_dofs(), kind, model, EngineChoice::Tled, t, us_tled, ratio});
                }
            }
        }
    }
    return rows;
}

inline void write_bench_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
    out << "dofs,kind,material,engine,threads,mean_step_us,ratio\n";
    out << std::setprecision(6) << std::fixed;
    for (const auto& r : rows)
        out << r.dofs << "," << to_string(r.kind) << "," << to_string(r.model) << ","
            << to_string(r.engine) << "," << r.threads << "," << r.mean_step_us << "," << r.ratio
            << "\n";
}

} // namespace djtled
