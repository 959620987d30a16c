#pragma once

#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>

#include "djtled/solver.hpp"

namespace djtled {

enum class EngineChoice { Dj, Tled, Both };

inline const char* to_string(EngineChoice e) {
    switch (e) {
        case EngineChoice::Dj: return "djtled";
        case EngineChoice::Tled: return "tled";
        case EngineChoice::Both: return "both";
    }
    return "?";
}

// Axis-aligned face selectors used by the boundary condition rules.
enum class Plane { XMin, XMax, YMin, YMax, ZMin, ZMax };

inline int plane_axis(Plane p) { return int(p) / 2; }
inline bool plane_is_max(Plane p) { return int(p) % 2 == 1; }

// Nodes lying on the given bounding-box face, within 1e-9 of the extent.
template <class Real>
inline std::vector<int> select_plane_nodes(const Mesh<Real>& mesh, Plane plane) {
    const auto [lo, hi] = bounding_box(mesh);
    const int axis = plane_axis(plane);
    const Real value = plane_is_max(plane) ? hi[axis] : lo[axis];
    const Real extent = hi[axis] - lo[axis];
    const Real eps = Real(1e-9) * (extent > Real(0) ? extent : Real(1));
    std::vector<int> out;
    for (long n = 0; n < mesh.num_nodes(); ++n)
        if (std::abs(mesh.nodes[size_t(n)][axis] - value) <= eps) out.push_back(int(n));
    return out;
}

namespace detail {

struct RawConfig {
    // section -> ordered (key, value) pairs
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
};

inline std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

inline RawConfig parse_raw_config(std::istream& in) {
    RawConfig raw;
    std::string line, section;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ParseError("unterminated section header", lineno);
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty()) throw ParseError("empty section name", lineno);
            raw.sections[section];
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("empty key", lineno);
        if (section.empty()) throw ParseError("key '" + key + "' outside any [section]", lineno);
        raw.sections[section].emplace_back(key, value);
    }
    return raw;
}

// Consumes keys from one section and rejects whatever is left over.
class SectionReader {
public:
    SectionReader(const RawConfig& raw, std::string section) : section_(std::move(section)) {
        auto it = raw.sections.find(section_);
        if (it != raw.sections.end()) entries_ = it->second;
        used_.assign(entries_.size(), false);
    }

    bool present() const { return !entries_.empty(); }

    std::optional<std::string> get(const std::string& key) {
        std::optional<std::string> found;
        for (size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i].first != key) continue;
            if (found) throw ConfigError("duplicate key '" + key + "' in [" + section_ + "]");
            found = entries_[i].second;
            used_[i] = true;
        }
        return found;
    }

    std::string require(const std::string& key) {
        auto v = get(key);
        if (!v) throw ConfigError("missing key '" + key + "' in [" + section_ + "]");
        return *v;
    }

    std::vector<std::string> get_all(const std::string& key) {
        std::vector<std::string> out;
        for (size_t i = 0; i < entries_.size(); ++i)
            if (entries_[i].first == key) {
                out.push_back(entries_[i].second);
                used_[i] = true;
            }
        return out;
    }

    void finish() const {
        for (size_t i = 0; i < entries_.size(); ++i)
            if (!used_[i])
                throw ConfigError("unknown key '" + entries_[i].first + "' in [" + section_ + "]");
    }

private:
    std::string section_;
    std::vector<std::pair<std::string, std::string>> entries_;
    std::vector<bool> used_;
};

template <class T>
inline T parse_scalar(const std::string& text, const std::string& what) {
    std::istringstream in(text);
    T v{};
    if (!(in >> v)) throw ConfigError("cannot parse " + what + " from '" + text + "'");
    std::string rest;
    if (in >> rest) throw ConfigError("trailing characters in " + what + ": '" + text + "'");
    return v;
}

template <class T>
inline std::vector<T> parse_list(const std::string& text, const std::string& what) {
    std::istringstream in(text);
    std::vector<T> out;
    T v{};
    while (in >> v) out.push_back(v);
    if (!in.eof()) throw ConfigError("cannot parse " + what + " from '" + text + "'");
    if (out.empty()) throw ConfigError(what + " must not be empty");
    return out;
}

inline Plane parse_plane(const std::string& s) {
    if (s == "xmin") return Plane::XMin;
    if (s == "xmax") return Plane::XMax;
    if (s == "ymin") return Plane::YMin;
    if (s == "ymax") return Plane::YMax;
    if (s == "zmin") return Plane::ZMin;
    if (s == "zmax") return Plane::ZMax;
    throw ConfigError("unknown plane selector '" + s + "' (use xmin..zmax)");
}

inline int parse_axis(const std::string& s) {
    if (s == "x") return 0;
    if (s == "y") return 1;
    if (s == "z") return 2;
    throw ConfigError("unknown axis '" + s + "' (use x, y or z)");
}

inline ElementKind parse_kind(const std::string& s) {
    if (s == "T4") return ElementKind::T4;
    if (s == "H8") return ElementKind::H8;
    throw ConfigError("unknown element kind '" + s + "' (use T4 or H8)");
}

inline MaterialModel parse_model(const std::string& s) {
    if (s == "NH") return MaterialModel::NeoHookean;
    if (s == "TI") return MaterialModel::TransverseIsotropic;
    if (s == "OT") return MaterialModel::Orthotropic;
    if (s == "MR") return MaterialModel::MooneyRivlin;
    throw ConfigError("unknown material model '" + s + "' (use NH, TI, OT or MR)");
}

} // namespace detail

// Benchmark sweep description; the ladder sizes are cells per axis of a
// generated cube.
template <class Real>
struct BenchSpec {
    Real extent = Real(0.1);
    std::vector<int> divisions{6, 9, 12, 16};
    std::vector<ElementKind> kinds{ElementKind::T4, ElementKind::H8};
    std::vector<MaterialModel> models{MaterialModel::NeoHookean, MaterialModel::TransverseIsotropic,
                                      MaterialModel::Orthotropic, MaterialModel::MooneyRivlin};
    long warmup = 100;
    long steps = 1000;
    std::vector<int> threads{1, 0};  // 0 = all hardware threads
    std::string csv_path = "bench.csv";
};

template <class Real>
struct RunConfig {
    // [mesh]
    std::string mesh_file;  // empty: generate a box
    ElementKind kind = ElementKind::T4;
    Vec3<Real> extent{Real(0.1), Real(0.1), Real(0.1)};
    std::array<int, 3> divisions{4, 4, 4};

    // [material]
    Material<Real> material = Material<Real>::neo_hookean(Real(6567), Real(326210), Real(1060));

    // [bc]
    struct FixRule {
        Plane plane;
        bool axes[3] = {false, false, false};
    };
    struct PrescribeRule {
        Plane plane;
        int axis = 2;
        Real target = 0;
        Real t_total = 1;
    };
    std::vector<FixRule> fixes;
    std::vector<PrescribeRule> prescribes;

    // [time]
    bool dt_auto = true;
    Real dt = 0;
    Real safety = Real(0.8);
    Real t_end = Real(1);
    Real alpha = 0;
    bool alpha_relax = false;

    // [run]
    EngineChoice engine = EngineChoice::Dj;
    int threads = 0;  // 0 = all hardware threads
    InversionPolicy on_inversion = InversionPolicy::Abort;

    // [output]
    std::string field_path;
    std::string report_path;
    long frame_stride = 0;

    // [bench]
    bool has_bench = false;
    BenchSpec<Real> bench;
};

template <class Real>
inline RunConfig<Real> parse_config(std::istream& in) {
    using namespace detail;
    const RawConfig raw = parse_raw_config(in);
    for (const auto& [name, entries] : raw.sections) {
        (void)entries;
        if (name != "mesh" && name != "material" && name != "bc" && name != "time" && name != "run" &&
            name != "output" && name != "bench")
            throw ConfigError("unknown section [" + name + "]");
    }
    RunConfig<Real> cfg;

    {
        SectionReader mesh(raw, "mesh");
        if (auto file = mesh.get("file")) cfg.mesh_file = *file;
        if (auto gen = mesh.get("generate")) {
            if (*gen != "box") throw ConfigError("only 'generate = box' is supported");
            if (!cfg.mesh_file.empty()) throw ConfigError("[mesh] cannot have both file and generate");
        }
        if (auto kind = mesh.get("kind")) cfg.kind = parse_kind(*kind);
        if (auto extent = mesh.get("extent")) {
            const auto v = parse_list<Real>(*extent, "extent");
            if (v.size() == 1)
                cfg.extent = {v[0], v[0], v[0]};
            else if (v.size() == 3)
                cfg.extent = {v[0], v[1], v[2]};
            else
                throw ConfigError("extent needs 1 or 3 values");
        }
        if (auto div = mesh.get("divisions")) {
            const auto v = parse_list<int>(*div, "divisions");
            if (v.size() == 1)
                cfg.divisions = {v[0], v[0], v[0]};
            else if (v.size() == 3)
                cfg.divisions = {v[0], v[1], v[2]};
            else
                throw ConfigError("divisions needs 1 or 3 values");
        }
        if (!cfg.mesh_file.empty() && (mesh.get("extent") || mesh.get("divisions") || mesh.get("kind")))
            throw ConfigError("[mesh] file excludes generator keys (kind/extent/divisions)");
        mesh.finish();
    }

    {
        SectionReader mat(raw, "material");
        const MaterialModel model = parse_model(mat.require("model"));
        const Real rho = parse_scalar<Real>(mat.require("rho"), "rho");
        const Real kappa = parse_scalar<Real>(mat.require("kappa"), "kappa");
        auto vec3_of = [&](const std::string& text) {
            const auto v = parse_list<Real>(text, "fibre direction");
            if (v.size() != 3) throw ConfigError("fibre direction needs 3 components");
            return Vec3<Real>{v[0], v[1], v[2]};
        };
        switch (model) {
            case MaterialModel::NeoHookean:
                cfg.material = Material<Real>::neo_hookean(parse_scalar<Real>(mat.require("mu"), "mu"),
                                                           kappa, rho);
                break;
            case MaterialModel::TransverseIsotropic:
                cfg.material = Material<Real>::transverse_isotropic(
                    parse_scalar<Real>(mat.require("mu"), "mu"),
                    parse_scalar<Real>(mat.require("eta_a"), "eta_a"), kappa, rho,
                    vec3_of(mat.require("fibre_a")));
                break;
            case MaterialModel::Orthotropic:
                cfg.material = Material<Real>::orthotropic(
                    parse_scalar<Real>(mat.require("mu"), "mu"),
                    parse_scalar<Real>(mat.require("eta_a"), "eta_a"),
                    parse_scalar<Real>(mat.require("eta_b"), "eta_b"), kappa, rho,
                    vec3_of(mat.require("fibre_a")), vec3_of(mat.require("fibre_b")));
                break;
            case MaterialModel::MooneyRivlin:
                cfg.material = Material<Real>::mooney_rivlin(
                    parse_scalar<Real>(mat.require("c10"), "c10"),
                    parse_scalar<Real>(mat.require("c01"), "c01"), kappa, rho);
                break;
        }
        mat.finish();
    }

    {
        SectionReader bc(raw, "bc");
        for (const std::string& rule : bc.get_all("fix")) {
            std::istringstream in_rule(rule);
            std::string plane, axes;
            if (!(in_rule >> plane >> axes)) throw ConfigError("fix rule needs '<plane> <axes>'");
            typename RunConfig<Real>::FixRule fr;
            fr.plane = parse_plane(plane);
            if (axes == "all") {
                fr.axes[0] = fr.axes[1] = fr.axes[2] = true;
            } else {
                for (char c : axes) {
                    if (c == 'x') fr.axes[0] = true;
                    else if (c == 'y') fr.axes[1] = true;
                    else if (c == 'z') fr.axes[2] = true;
                    else throw ConfigError(std::string("unknown axis '") + c + "' in fix rule");
                }
            }
            cfg.fixes.push_back(fr);
        }
        for (const std::string& rule : bc.get_all("prescribe")) {
            std::istringstream in_rule(rule);
            std::string plane, axis;
            typename RunConfig<Real>::PrescribeRule pr;
            if (!(in_rule >> plane >> axis >> pr.target >> pr.t_total))
                throw ConfigError("prescribe rule needs '<plane> <axis> <target> <t_total>'");
            pr.plane = parse_plane(plane);
            pr.axis = parse_axis(axis);
            if (!(pr.t_total > Real(0))) throw ConfigError("prescribe ramp duration must be positive");
            cfg.prescribes.push_back(pr);
        }
        bc.finish();
    }

    {
        SectionReader time(raw, "time");
        if (auto dt = time.get("dt")) {
            if (*dt == "auto") {
                cfg.dt_auto = true;
            } else {
                cfg.dt_auto = false;
                cfg.dt = parse_scalar<Real>(*dt, "dt");
                if (!(cfg.dt > Real(0))) throw ConfigError("dt must be positive");
            }
        }
        if (auto safety = time.get("safety")) {
            cfg.safety = parse_scalar<Real>(*safety, "safety");
            if (!(cfg.safety > Real(0) && cfg.safety <= Real(1)))
                throw ConfigError("safety must be in (0, 1]");
        }
        cfg.t_end = parse_scalar<Real>(time.require("t_end"), "t_end");
        if (cfg.t_end < Real(0)) throw ConfigError("t_end must be >= 0");
        const std::string alpha = time.require("alpha");
        if (alpha == "relax") {
            cfg.alpha_relax = true;
        } else {
            cfg.alpha = parse_scalar<Real>(alpha, "alpha");
            if (cfg.alpha < Real(0)) throw ConfigError("alpha must be >= 0");
        }
        time.finish();
    }

    {
        SectionReader run(raw, "run");
        if (auto engine = run.get("engine")) {
            if (*engine == "djtled") cfg.engine = EngineChoice::Dj;
            else if (*engine == "tled") cfg.engine = EngineChoice::Tled;
            else if (*engine == "both") cfg.engine = EngineChoice::Both;
            else throw ConfigError("unknown engine '" + *engine + "' (use djtled, tled or both)");
        }
        if (auto threads = run.get("threads")) {
            if (*threads == "auto") cfg.threads = 0;
            else {
                cfg.threads = parse_scalar<int>(*threads, "threads");
                if (cfg.threads < 1) throw ConfigError("threads must be >= 1 or auto");
            }
        }
        if (auto inv = run.get("on_inversion")) {
            if (*inv == "abort") cfg.on_inversion = InversionPolicy::Abort;
            else if (*inv == "report") cfg.on_inversion = InversionPolicy::SkipAndReport;
            else throw ConfigError("on_inversion must be abort or report");
        }
        run.finish();
    }

    {
        SectionReader output(raw, "output");
        if (auto field = output.get("field")) cfg.field_path = *field;
        if (auto report = output.get("report")) cfg.report_path = *report;
        if (auto stride = output.get("frame_stride")) {
            cfg.frame_stride = parse_scalar<long>(*stride, "frame_stride");
            if (cfg.frame_stride < 0) throw ConfigError("frame_stride must be >= 0");
        }
        output.finish();
    }

    {
        SectionReader bench(raw, "bench");
        if (bench.present()) {
            cfg.has_bench = true;
            if (auto extent = bench.get("extent"))
                cfg.bench.extent = parse_scalar<Real>(*extent, "bench extent");
            if (auto div = bench.get("divisions"))
                cfg.bench.divisions = parse_list<int>(*div, "bench divisions");
            if (auto kinds = bench.get("kinds")) {
                cfg.bench.kinds.clear();
                for (const auto& k : parse_list<std::string>(*kinds, "bench kinds"))
                    cfg.bench.kinds.push_back(parse_kind(k));
            }
            if (auto models = bench.get("materials")) {
                cfg.bench.models.clear();
                for (const auto& m : parse_list<std::string>(*models, "bench materials"))
                    cfg.bench.models.push_back(parse_model(m));
            }
            if (auto warmup = bench.get("warmup")) cfg.bench.warmup = parse_scalar<long>(*warmup, "warmup");
            if (auto steps = bench.get("steps")) cfg.bench.steps = parse_scalar<long>(*steps, "steps");
            if (auto threads = bench.get("threads")) {
                cfg.bench.threads.clear();
                for (const auto& t : parse_list<std::string>(*threads, "bench threads"))
                    cfg.bench.threads.push_back(t == "auto" ? 0 : parse_scalar<int>(t, "bench threads"));
            }
            if (auto csv = bench.get("csv")) cfg.bench.csv_path = *csv;
            if (cfg.bench.warmup < 0 || cfg.bench.steps < 1)
                throw ConfigError("bench needs warmup >= 0 and steps >= 1");
        }
        bench.finish();
    }

    return cfg;
}

template <class Real>
inline RunConfig<Real> parse_config_text(const std::string& text) {
    std::istringstream in(text);
    return parse_config<Real>(in);
}

// Materializes the mesh described by the config (generated or loaded).
template <class Real>
inline Mesh<Real> build_mesh(const RunConfig<Real>& cfg, const std::string& base_dir = "") {
    if (cfg.mesh_file.empty()) return generate_box(cfg.extent, cfg.divisions, cfg.kind);
    const std::string path =
        (!base_dir.empty() && cfg.mesh_file.front() != '/') ? base_dir + "/" + cfg.mesh_file
                                                            : cfg.mesh_file;
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return load_mesh<Real>(text.str());
}

// Resolves the face selectors of the config against a concrete mesh.
template <class Real>
inline BoundaryConditions<Real> build_bcs(const RunConfig<Real>& cfg, const Mesh<Real>& mesh) {
    BoundaryConditions<Real> bc;
    for (const auto& fr : cfg.fixes)
        for (int n : select_plane_nodes(mesh, fr.plane))
            for (int axis = 0; axis < 3; ++axis)
                if (fr.axes[axis]) bc.fixed.emplace_back(n, axis);
    for (const auto& pr : cfg.prescribes) {
        PrescribedRamp<Real> ramp;
        ramp.nodes = select_plane_nodes(mesh, pr.plane);
        if (ramp.nodes.empty()) throw ConfigError("prescribe rule selects no nodes");
        ramp.axis = pr.axis;
        ramp.target = pr.target;
        ramp.t_total = pr.t_total;
        bc.prescribed.push_back(std::move(ramp));
    }
    bc.validate(mesh.num_nodes());
    return bc;
}

} // namespace djtled
