#pragma once

#include <chrono>
#include <functional>

#include "djtled/tled_force.hpp"

namespace djtled {

// Per-DOF view of the boundary conditions, resolved once per run.
template <class Real>
struct DofConstraints {
    enum : uint8_t { Free = 0, Fixed = 1, Prescribed = 2 };
    std::vector<uint8_t> kind;
    std::vector<Real> target;
    std::vector<Real> t_total;

    static DofConstraints build(const BoundaryConditions<Real>& bc, long num_nodes) {
        bc.validate(num_nodes);
        DofConstraints c;
        c.kind.assign(size_t(num_nodes) * 3, Free);
        c.target.assign(size_t(num_nodes) * 3, Real(0));
        c.t_total.assign(size_t(num_nodes) * 3, Real(1));
        for (auto [node, axis] : bc.fixed) c.kind[size_t(node) * 3 + axis] = Fixed;
        for (const auto& r : bc.prescribed)
            for (int node : r.nodes) {
                const size_t dof = size_t(node) * 3 + r.axis;
                c.kind[dof] = Prescribed;
                c.target[dof] = r.target;
                c.t_total[dof] = r.t_total;
            }
        return c;
    }

    Real ramp_value(size_t dof, Real t) const {
        const Real s = t / t_total[dof];
        return (s >= Real(1) ? Real(1) : s) * target[dof];
    }
};

template <class Real>
struct SimState {
    std::vector<Real> u_curr, u_prev;
    std::vector<Real> r_ext;
    std::vector<Real> f_int;
    Real t = 0;
    long step = 0;

    static SimState rest(long num_dofs) {
        SimState s;
        s.u_curr.assign(size_t(num_dofs), Real(0));
        s.u_prev.assign(size_t(num_dofs), Real(0));
        s.r_ext.assign(size_t(num_dofs), Real(0));
        s.f_int.assign(size_t(num_dofs), Real(0));
        return s;
    }
};

// Central-difference update coefficients with mass-proportional damping:
//   u_next = c1 (R - F) + c2 u_curr + c3 u_prev,
//   c1 = dt^2 / (m (1 + a dt/2)), c2 = 2 / (1 + a dt/2),
//   c3 = -(1 - a dt/2) / (1 + a dt/2).
// Massless (unreferenced) nodes are flagged and held at zero.
template <class Real>
struct UpdateCoeffs {
    std::vector<Real> c1;  // per node
    std::vector<uint8_t> massless;
    Real c2 = 0, c3 = 0;

    static UpdateCoeffs build(const std::vector<Real>& node_mass, Real dt, Real alpha) {
        UpdateCoeffs u;
        const Real denom = Real(1) + alpha * dt / 2;
        u.c2 = Real(2) / denom;
        u.c3 = -(Real(1) - alpha * dt / 2) / denom;
        u.c1.resize(node_mass.size());
        u.massless.assign(node_mass.size(), 0);
        for (size_t n = 0; n < node_mass.size(); ++n) {
            if (node_mass[n] > Real(0)) {
                u.c1[n] = dt * dt / (node_mass[n] * denom);
            } else {
                u.c1[n] = Real(0);
                u.massless[n] = 1;
            }
        }
        return u;
    }
};

struct StepOutcome {
    bool ok = true;
    bool diverged = false;
    long inverted_element = -1;
    long inverted_count = 0;
};

// One central-difference step. `engine` provides the internal force assembly
// (see DjEngine / TledEngine); u_next is caller-owned scratch.
template <class Real, class Engine>
inline StepOutcome advance_step(SimState<Real>& state, Engine& engine,
                                const UpdateCoeffs<Real>& coeffs, const DofConstraints<Real>& bc,
                                Real dt, int threads, InversionPolicy policy,
                                std::vector<Real>& u_next) {
    StepOutcome out;
    const AssembleStats stats = engine.assemble(state.u_curr, state.f_int, threads, policy);
    out.inverted_count = stats.inverted_count;
    if (!stats.ok()) {
        out.ok = false;
        out.inverted_element = stats.first_inverted;
        return out;
    }

    u_next.resize(state.u_curr.size());
    const Real t_next = dt * Real(state.step + 1);
    const long num_nodes = long(coeffs.c1.size());
    std::atomic<bool> nonfinite{false};

    parallel_for(num_nodes, threads, [&](long n) {
        const Real c1 = coeffs.c1[size_t(n)];
        const bool massless = coeffs.massless[size_t(n)] != 0;
        for (int i = 0; i < 3; ++i) {
            const size_t dof = size_t(n) * 3 + i;
            switch (bc.kind[dof]) {
                case DofConstraints<Real>::Fixed:
                    u_next[dof] = Real(0);
                    break;
                case DofConstraints<Real>::Prescribed:
                    u_next[dof] = bc.ramp_value(dof, t_next);
                    break;
                default: {
                    if (massless) {
                        u_next[dof] = Real(0);
                        break;
                    }
                    const Real v = c1 * (state.r_ext[dof] - state.f_int[dof]) +
                                   coeffs.c2 * state.u_curr[dof] + coeffs.c3 * state.u_prev[dof];
                    u_next[dof] = v;
                    if (!std::isfinite(v)) nonfinite.store(true, std::memory_order_relaxed);
                }
            }
        }
    });

    if (nonfinite.load()) {
        out.ok = false;
        out.diverged = true;
        return out;
    }
    state.u_prev.swap(state.u_curr);
    state.u_curr.swap(u_next);
    ++state.step;
    state.t = t_next;
    return out;
}

// Kinetic energy proxy sum_n m_n |u_curr - u_prev|^2 / dt^2; serial fixed
// summation order.
template <class Real>
inline Real kinetic_energy_proxy(const SimState<Real>& state, const std::vector<Real>& node_mass,
                                 Real dt) {
    Real e = 0;
    for (size_t n = 0; n < node_mass.size(); ++n) {
        Real d2 = 0;
        for (int i = 0; i < 3; ++i) {
            const Real d = state.u_curr[n * 3 + i] - state.u_prev[n * 3 + i];
            d2 += d * d;
        }
        e += node_mass[n] * d2;
    }
    return e / (dt * dt);
}

template <class Real>
struct ProgressReport {
    long step = 0;
    Real t = 0;
    Real max_abs_u = 0;
    double seconds_per_step = 0;
};

template <class Real>
using ProgressHook = std::function<void(const ProgressReport<Real>&)>;

template <class Real>
struct RunParams {
    Real dt = 0;
    Real t_end = 0;
    Real alpha = 0;
    int threads = 1;
    InversionPolicy on_inversion = InversionPolicy::Abort;
    long report_stride = 0;  // 0: no progress reports
};

template <class Real>
struct RunResult {
    SimState<Real> state;
    long steps = 0;
    double wall_seconds = 0;
    double mean_step_seconds = 0;
    long inverted_steps = 0;  // steps that skipped inverted elements (report policy)
};

// Time-steps the engine from rest (or from `initial` if given) to t_end.
// Throws SimulationError on divergence or on inversion under the abort
// policy. Wall time covers stepping only, never precomputation.
template <class Real, class Engine>
inline RunResult<Real> run_simulation(Engine& engine, const std::vector<Real>& node_mass,
                                      const DofConstraints<Real>& bc, const RunParams<Real>& p,
                                      const ProgressHook<Real>& hook = {},
                                      const SimState<Real>* initial = nullptr) {
    if (!(p.dt > Real(0))) throw ConfigError("time step must be positive");
    if (p.t_end < Real(0)) throw ConfigError("t_end must be >= 0");
    const long num_dofs = long(node_mass.size()) * 3;
    RunResult<Real> result;
    result.state = initial ? *initial : SimState<Real>::rest(num_dofs);

    const long num_steps = long(std::ceil(double(p.t_end) / double(p.dt) - 1e-9));
    const UpdateCoeffs<Real> coeffs = UpdateCoeffs<Real>::build(node_mass, p.dt, p.alpha);
    std::vector<Real> u_next(static_cast<size_t>(num_dofs));

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto last_report = t0;
    long last_report_step = 0;

    for (long s = 0; s < num_steps; ++s) {
        const StepOutcome oc =
            advance_step(result.state, engine, coeffs, bc, p.dt, p.threads, p.on_inversion, u_next);
        if (oc.inverted_count > 0) ++result.inverted_steps;
        if (!oc.ok) {
            if (oc.diverged)
                throw SimulationError(SimulationError::Kind::Divergence,
                                      "solution diverged at step " + std::to_string(result.state.step + 1) +
                                          "; reduce the time step",
                                      result.state.step + 1);
            throw SimulationError(SimulationError::Kind::ElementInversion,
                                  "element " + std::to_string(oc.inverted_element) +
                                      " inverted at step " + std::to_string(result.state.step + 1),
                                  oc.inverted_element);
        }
        if (hook && p.report_stride > 0 &&
            (result.state.step % p.report_stride == 0 || s + 1 == num_steps)) {
            const auto now = clock::now();
            ProgressReport<Real> r;
            r.step = result.state.step;
            r.t = result.state.t;
            for (Real v : result.state.u_curr) r.max_abs_u = std::max(r.max_abs_u, std::abs(v));
            const long span = result.state.step - last_report_step;
            r.seconds_per_step = span > 0 ? std::chrono::duration<double>(now - last_report).count() / span : 0;
            last_report = now;
            last_report_step = result.state.step;
            hook(r);
        }
    }
    result.steps = result.state.step;
    result.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    result.mean_step_seconds = num_steps > 0 ? result.wall_seconds / num_steps : 0;
    return result;
}

// Internal-force assembly engines with a common interface.
template <class Real>
class DjEngine {
public:
    DjEngine(const Mesh<Real>& mesh, const Material<Real>& material,
             Real c_hg = Real(default_hourglass_coefficient), int build_threads = 1)
        : mesh_(&mesh), material_(&material), model_(DjModel<Real>::build(mesh, material, c_hg, build_threads)),
          adj_(NodeElementAdjacency::build(mesh)) {}

    AssembleStats assemble(const std::vector<Real>& u, std::vector<Real>& f, int threads,
                           InversionPolicy policy = InversionPolicy::Abort) {
        return assemble_internal(*mesh_, model_, *material_, u, adj_, elem_f_, f, threads, policy);
    }

    const DjModel<Real>& model() const { return model_; }
    const Mesh<Real>& mesh() const { return *mesh_; }
    static constexpr const char* name() { return "djtled"; }

private:
    const Mesh<Real>* mesh_;
    const Material<Real>* material_;
    DjModel<Real> model_;
    NodeElementAdjacency adj_;
    std::vector<Real> elem_f_;
};

template <class Real>
class TledEngine {
public:
    TledEngine(const Mesh<Real>& mesh, const Material<Real>& material,
               Real c_hg = Real(default_hourglass_coefficient), int build_threads = 1)
        : mesh_(&mesh), material_(&material),
          model_(TledModel<Real>::build(mesh, material, c_hg, build_threads)),
          adj_(NodeElementAdjacency::build(mesh)) {}

    AssembleStats assemble(const std::vector<Real>& u, std::vector<Real>& f, int threads,
                           InversionPolicy policy = InversionPolicy::Abort) {
        return tled_assemble_internal(*mesh_, model_, *material_, u, adj_, elem_f_, f, threads, policy);
    }

    const TledModel<Real>& model() const { return model_; }
    const Mesh<Real>& mesh() const { return *mesh_; }
    static constexpr const char* name() { return "tled"; }

private:
    const Mesh<Real>* mesh_;
    const Material<Real>* material_;
    TledModel<Real> model_;
    NodeElementAdjacency adj_;
    std::vector<Real> elem_f_;
};

// Net internal force over a node set along one axis at the given state;
// used to read off reactions at prescribed faces.
template <class Real, class Engine>
inline Real reaction_force(Engine& engine, const std::vector<Real>& u, const std::vector<int>& nodes,
                           int axis, int threads = 1) {
    std::vector<Real> f;
    const AssembleStats stats = engine.assemble(u, f, threads, InversionPolicy::Abort);
    if (!stats.ok())
        throw SimulationError(SimulationError::Kind::ElementInversion,
                              "element inverted while evaluating reactions", stats.first_inverted);
    Real r = 0;
    for (int n : nodes) r += f[size_t(n) * 3 + axis];
    return r;
}

// Dynamic-relaxation style damping preset: critical damping of the slowest
// axial mode estimated from the mesh extent, alpha = pi c_bar / L with
// c_bar = sqrt(E / rho).
template <class Real>
inline Real relaxation_alpha(const Material<Real>& material, const Mesh<Real>& mesh) {
    const Real mu = material.shear_modulus();
    const Real e_mod = 9 * material.kappa * mu / (3 * material.kappa + mu);
    const Real c_bar = std::sqrt(e_mod / material.rho);
    const auto [lo, hi] = bounding_box(mesh);
    const Real l = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    if (!(l > Real(0))) throw ConfigError("mesh has zero extent");
    return Real(M_PI) * c_bar / l;
}

} // namespace djtled
