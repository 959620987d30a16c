#pragma once

#include <fstream>
#include <iomanip>
#include <ostream>

#include "djtled/bench.hpp"
#include "djtled/metrics.hpp"

namespace djtled {

// Synthetic end-to-end example: an ellipsoidal solid fixed at its base with
// a localized displacement patch driven to steady state, solved with both
// force paths and compared.
template <class Real>
struct DemoSpec {
    Vec3<Real> semi_axes{Real(0.07), Real(0.055), Real(0.05)};
    std::array<int, 3> divisions{14, 12, 10};  // grid cells across the bounding box
    Vec3<Real> patch_centre{Real(0.0), Real(0.0), Real(0.05)};  // top pole by default
    Real patch_radius = Real(0.022);
    Vec3<Real> patch_disp{Real(-0.009), Real(0.009), Real(-0.007)};
    Real mu = Real(1006.712);
    Real kappa = Real(50000);
    Real rho = Real(1060);
    Real safety = Real(0.8);
    Real alpha = 0;  // 0: relaxation preset
    Real t_total = Real(0.25);
    Real t_end = Real(1.0);
    int threads = 0;
    std::string output_prefix = "demo_brain";
};

// Voxel tetrahedral mesh of the cells whose centres fall inside the
// ellipsoid. Staircased surface, but every element is a well-shaped tet.
template <class Real>
inline Mesh<Real> generate_ellipsoid_mesh(Vec3<Real> semi_axes, std::array<int, 3> divisions) {
    for (int i = 0; i < 3; ++i) {
        if (!(semi_axes[i] > Real(0))) throw ConfigError("ellipsoid semi-axes must be positive");
        if (divisions[i] < 2) throw ConfigError("ellipsoid divisions must be >= 2");
    }
    const int nx = divisions[0], ny = divisions[1], nz = divisions[2];
    const Vec3<Real> h{2 * semi_axes.x / Real(nx), 2 * semi_axes.y / Real(ny),
                       2 * semi_axes.z / Real(nz)};
    auto grid_node = [&](int i, int j, int k) {
        return Vec3<Real>{-semi_axes.x + Real(i) * h.x, -semi_axes.y + Real(j) * h.y,
                          -semi_axes.z + Real(k) * h.z};
    };
    // Keep cells whose centre is inside the ellipsoid.
    std::vector<uint8_t> keep(size_t(nx) * ny * nz, 0);
    long kept = 0;
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const Vec3<Real> c{-semi_axes.x + (Real(i) + Real(0.5)) * h.x,
                                   -semi_axes.y + (Real(j) + Real(0.5)) * h.y,
                                   -semi_axes.z + (Real(k) + Real(0.5)) * h.z};
                const Real r2 = (c.x / semi_axes.x) * (c.x / semi_axes.x) +
                                (c.y / semi_axes.y) * (c.y / semi_axes.y) +
                                (c.z / semi_axes.z) * (c.z / semi_axes.z);
                if (r2 <= Real(1)) {
                    keep[size_t(i) + size_t(nx) * (size_t(j) + size_t(ny) * size_t(k))] = 1;
                    ++kept;
                }
            }
    if (kept == 0) throw ConfigError("ellipsoid mesh is empty; refine the divisions");

    // Compact node numbering over referenced grid points.
    std::vector<long> node_id(size_t(nx + 1) * (ny + 1) * (nz + 1), -1);
    auto gid = [&](int i, int j, int k) {
        return size_t(i) + size_t(nx + 1) * (size_t(j) + size_t(ny + 1) * size_t(k));
    };
    Mesh<Real> mesh;
    mesh.kind = ElementKind::T4;
    Mesh<Real> box = generate_box<Real>({1, 1, 1}, {1, 1, 1}, ElementKind::T4);  // cell template
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                if (!keep[size_t(i) + size_t(nx) * (size_t(j) + size_t(ny) * size_t(k))]) continue;
                long ids[2][2][2];
                for (int dz = 0; dz < 2; ++dz)
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx) {
                            const size_t g = gid(i + dx, j + dy, k + dz);
                            if (node_id[g] < 0) {
                                node_id[g] = mesh.num_nodes();
                                mesh.nodes.push_back(grid_node(i + dx, j + dy, k + dz));
                            }
                            ids[dx][dy][dz] = node_id[g];
                        }
                // The unit-cell template indexes corners as (i + 2j + 4k).
                for (long e = 0; e < box.num_elements(); ++e) {
                    const int* c = box.element(e);
                    for (int a = 0; a < 4; ++a) {
                        const int dx = c[a] & 1, dy = (c[a] >> 1) & 1, dz = (c[a] >> 2) & 1;
                        mesh.conn.push_back(int(ids[dx][dy][dz]));
                    }
                }
            }
    validate_mesh(mesh);
    return mesh;
}

template <class Real>
struct DemoResult {
    long nodes = 0;
    long elements = 0;
    long steps = 0;
    Real dt = 0;
    Real rmse_fields = 0;
    Real max_disp_dj = 0;
    bool nre_defined = false;
    Histogram<Real> nre_hist;
    double dj_mean_step_us = 0;
    double tled_mean_step_us = 0;
    std::vector<Real> u_dj;
    std::vector<Real> u_tled;
    Mesh<Real> mesh;
};

template <class Real>
inline DemoResult<Real> run_demo(const DemoSpec<Real>& spec, std::ostream* log = nullptr) {
    DemoResult<Real> result;
    result.mesh = generate_ellipsoid_mesh(spec.semi_axes, spec.divisions);
    const Mesh<Real>& mesh = result.mesh;
    result.nodes = mesh.num_nodes();
    result.elements = mesh.num_elements();

    const Material<Real> material = Material<Real>::neo_hookean(spec.mu, spec.kappa, spec.rho);

    // Base: one cell-height slab above the lowest point, fixed in all axes.
    const auto [lo, hi] = bounding_box(mesh);
    const Real base_band = (hi.z - lo.z) / Real(spec.divisions[2]) * Real(0.55);
    BoundaryConditions<Real> bcs;
    std::vector<uint8_t> is_fixed(size_t(mesh.num_nodes()), 0);
    for (long n = 0; n < mesh.num_nodes(); ++n)
        if (mesh.nodes[size_t(n)].z <= lo.z + base_band) {
            is_fixed[size_t(n)] = 1;
            for (int axis = 0; axis < 3; ++axis) bcs.fixed.emplace_back(int(n), axis);
        }

    // Patch: nodes within the sphere, excluding fixed nodes by validation.
    std::vector<int> patch;
    for (long n = 0; n < mesh.num_nodes(); ++n) {
        if (norm(mesh.nodes[size_t(n)] - spec.patch_centre) <= spec.patch_radius) {
            if (is_fixed[size_t(n)])
                throw ConfigError("demo patch overlaps the fixed base; move the patch or shrink it");
            patch.push_back(int(n));
        }
    }
    if (patch.empty()) throw ConfigError("demo patch selects no nodes");
    for (int axis = 0; axis < 3; ++axis) {
        PrescribedRamp<Real> ramp;
        ramp.nodes = patch;
        ramp.axis = axis;
        ramp.target = spec.patch_disp[axis];
        ramp.t_total = spec.t_total;
        bcs.prescribed.push_back(std::move(ramp));
    }

    DjEngine<Real> dj(mesh, material);
    TledEngine<Real> tled(mesh, material);
    const auto mass = lump_mass(mesh, material.rho, dj.model().elems);
    const auto bc = DofConstraints<Real>::build(bcs, mesh.num_nodes());

    RunParams<Real> params;
    params.dt = spec.safety * critical_dt(mesh, dj.model().elems, dilatational_wave_speed(material));
    params.t_end = spec.t_end;
    params.alpha = spec.alpha > Real(0) ? spec.alpha : relaxation_alpha(material, mesh);
    params.threads = spec.threads > 0 ? spec.threads : hardware_threads();
    result.dt = params.dt;

    if (log)
        *log << "demo: " << result.nodes << " nodes, " << result.elements << " elements, dt = "
             << params.dt << " s, alpha = " << params.alpha << " /s" << std::endl;

    const auto r_dj = run_simulation(dj, mass, bc, params);
    const auto r_tled = run_simulation(tled, mass, bc, params);
    result.steps = r_dj.steps;
    result.dj_mean_step_us = r_dj.mean_step_seconds * 1e6;
    result.tled_mean_step_us = r_tled.mean_step_seconds * 1e6;
    result.u_dj = r_dj.state.u_curr;
    result.u_tled = r_tled.state.u_curr;

    result.rmse_fields = rmse(result.u_dj, result.u_tled);
    for (Real v : result.u_dj) result.max_disp_dj = std::max(result.max_disp_dj, std::abs(v));
    const auto [umin, umax] = std::minmax_element(result.u_tled.begin(), result.u_tled.end());
    if (*umax > *umin) {
        result.nre_defined = true;
        result.nre_hist = histogram(nre(result.u_dj, result.u_tled), 20);
    }
    return result;
}

template <class Real>
inline std::vector<Vec3<Real>> field_as_vectors(const std::vector<Real>& u) {
    std::vector<Vec3<Real>> out(u.size() / 3);
    for (size_t n = 0; n < out.size(); ++n) out[n] = {u[n * 3], u[n * 3 + 1], u[n * 3 + 2]};
    return out;
}

template <class Real>
inline void write_demo_outputs(const DemoResult<Real>& result, const std::string& prefix,
                               std::ostream& report) {
    {
        std::ofstream f(prefix + "_djtled.vtk");
        f << export_field(result.mesh, field_as_vectors(result.u_dj));
    }
    {
        std::ofstream f(prefix + "_tled.vtk");
        f << export_field(result.mesh, field_as_vectors(result.u_tled));
    }
    report << "demo-brain report\n";
    report << "nodes " << result.nodes << "\n";
    report << "elements " << result.elements << "\n";
    report << "steps " << result.steps << "\n";
    report << std::setprecision(12);
    report << "dt " << result.dt << "\n";
    report << "max_disp_djtled " << result.max_disp_dj << "\n";
    report << "rmse " << result.rmse_fields << "\n";
    report << "mean_step_us_djtled " << result.dj_mean_step_us << "\n";
    report << "mean_step_us_tled " << result.tled_mean_step_us << "\n";
    if (result.nre_defined) {
        report << "nre_histogram buckets " << result.nre_hist.counts.size() << " width "
               << result.nre_hist.bucket_width << "\n";
        for (size_t b = 0; b < result.nre_hist.counts.size(); ++b)
            report << "nre_bucket " << b << " " << result.nre_hist.counts[b] << "\n";
    } else {
        report << "nre_histogram undefined (uniform reference field)\n";
    }
}

} // namespace djtled
