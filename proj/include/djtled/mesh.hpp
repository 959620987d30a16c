#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "djtled/element.hpp"

namespace djtled {

// An immutable volume mesh of a single element kind. Connectivity is stored
// flat; element e occupies conn[e*npe .. e*npe+npe).
template <class Real>
struct Mesh {
    ElementKind kind = ElementKind::T4;
    std::vector<Vec3<Real>> nodes;
    std::vector<int> conn;

    int npe() const { return nodes_per_element(kind); }
    long num_nodes() const { return long(nodes.size()); }
    long num_elements() const { return long(conn.size()) / npe(); }
    long num_dofs() const { return 3 * num_nodes(); }

    const int* element(long e) const { return conn.data() + e * npe(); }

    void gather_coords(long e, Vec3<Real>* out) const {
        const int* c = element(e);
        for (int a = 0; a < npe(); ++a) out[a] = nodes[c[a]];
    }
};

// Displacement boundary conditions in node space: hard zero constraints and
// linearly ramped prescribed displacements.
template <class Real>
struct PrescribedRamp {
    std::vector<int> nodes;
    int axis = 0;
    Real target = 0;   // displacement reached at t = t_total, held afterwards
    Real t_total = 0;  // ramp duration, > 0
};

template <class Real>
struct BoundaryConditions {
    std::vector<std::pair<int, int>> fixed;  // (node, axis)
    std::vector<PrescribedRamp<Real>> prescribed;

    // A (node, axis) pair may appear in at most one constraint.
    void validate(long num_nodes) const {
        std::vector<uint8_t> seen(size_t(num_nodes) * 3, 0);
        auto claim = [&](int node, int axis) {
            if (node < 0 || node >= num_nodes) throw ConfigError("boundary condition references invalid node");
            if (axis < 0 || axis > 2) throw ConfigError("boundary condition axis out of range");
            uint8_t& s = seen[size_t(node) * 3 + axis];
            if (s) throw ConfigError("node " + std::to_string(node) + " axis " + std::to_string(axis) +
                                     " appears in more than one boundary condition");
            s = 1;
        };
        for (auto [node, axis] : fixed) claim(node, axis);
        for (const auto& r : prescribed) {
            if (!(r.t_total > Real(0))) throw ConfigError("ramp duration must be positive");
            for (int node : r.nodes) claim(node, r.axis);
        }
    }
};

// Checks connectivity bounds and element orientation; throws MeshError naming
// the offending element.
template <class Real>
inline void validate_mesh(const Mesh<Real>& mesh) {
    const int npe = mesh.npe();
    const long n = mesh.num_nodes();
    if (mesh.conn.size() % size_t(npe) != 0) throw MeshError("connectivity length not a multiple of nodes per element");
    for (long e = 0; e < mesh.num_elements(); ++e) {
        const int* c = mesh.element(e);
        for (int a = 0; a < npe; ++a)
            if (c[a] < 0 || c[a] >= n)
                throw MeshError("connectivity index " + std::to_string(c[a]) + " out of range", e);
    }
    const auto D = shape_derivatives<Real>(mesh.kind);
    Vec3<Real> coords[8];
    for (long e = 0; e < mesh.num_elements(); ++e) {
        mesh.gather_coords(e, coords);
        jacobian0(coords, D, e);  // throws on det <= 0
    }
}

namespace detail {

inline bool is_blank_or_comment(std::string_view s) {
    for (char c : s) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

} // namespace detail

// Parses the plain-text mesh format:
//
//   djtled-mesh 1
//   nodes N
//   x y z                (N lines)
//   elements T4|H8 M
//   i j k l [...]        (M lines of zero-based node indices)
//
// '#' starts a comment line. Throws ParseError with a line number, or
// MeshError if the mesh violates an invariant.
template <class Real>
inline Mesh<Real> load_mesh(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string line;
    long lineno = 0;

    auto next_line = [&](const char* what) -> std::string& {
        while (std::getline(in, line)) {
            ++lineno;
            if (!detail::is_blank_or_comment(line)) return line;
        }
        throw ParseError(std::string("unexpected end of file, expected ") + what, lineno);
    };

    {
        std::istringstream ls(next_line("header"));
        std::string magic;
        int version = 0;
        if (!(ls >> magic >> version) || magic != "djtled-mesh")
            throw ParseError("expected header 'djtled-mesh 1'", lineno);
        if (version != 1) throw ParseError("unsupported mesh format version " + std::to_string(version), lineno);
    }

    long n_nodes = 0;
    {
        std::istringstream ls(next_line("'nodes N'"));
        std::string kw;
        if (!(ls >> kw >> n_nodes) || kw != "nodes" || n_nodes < 0)
            throw ParseError("expected 'nodes N'", lineno);
    }

    Mesh<Real> mesh;
    mesh.nodes.reserve(size_t(n_nodes));
    for (long i = 0; i < n_nodes; ++i) {
        std::istringstream ls(next_line("node coordinates"));
        Vec3<Real> p;
        if (!(ls >> p.x >> p.y >> p.z)) throw ParseError("malformed node coordinates", lineno);
        mesh.nodes.push_back(p);
    }

    long n_elems = 0;
    {
        std::istringstream ls(next_line("'elements T4|H8 M'"));
        std::string kw, kind;
        if (!(ls >> kw >> kind >> n_elems) || kw != "elements" || n_elems < 0)
            throw ParseError("expected 'elements T4|H8 M'", lineno);
        if (kind == "T4")
            mesh.kind = ElementKind::T4;
        else if (kind == "H8")
            mesh.kind = ElementKind::H8;
        else
            throw ParseError("unknown element kind '" + kind + "'", lineno);
    }

    const int npe = mesh.npe();
    mesh.conn.reserve(size_t(n_elems) * npe);
    for (long e = 0; e < n_elems; ++e) {
        std::istringstream ls(next_line("element connectivity"));
        for (int a = 0; a < npe; ++a) {
            long idx;
            if (!(ls >> idx)) throw ParseError("expected " + std::to_string(npe) + " node indices", lineno);
            mesh.conn.push_back(int(idx));
        }
        long extra;
        if (ls >> extra) throw ParseError("too many node indices on element line", lineno);
    }

    validate_mesh(mesh);
    return mesh;
}

// Writes a mesh in the format accepted by load_mesh. Coordinates are printed
// with full precision so a round trip reproduces them bit for bit.
template <class Real>
inline std::string render_mesh(const Mesh<Real>& mesh) {
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<Real>::max_digits10);
    out << "djtled-mesh 1\n";
    out << "nodes " << mesh.num_nodes() << "\n";
    for (const auto& p : mesh.nodes) out << p.x << " " << p.y << " " << p.z << "\n";
    out << "elements " << to_string(mesh.kind) << " " << mesh.num_elements() << "\n";
    const int npe = mesh.npe();
    for (long e = 0; e < mesh.num_elements(); ++e) {
        const int* c = mesh.element(e);
        for (int a = 0; a < npe; ++a) out << c[a] << (a + 1 == npe ? "\n" : " ");
    }
    return out.str();
}

// Structured box mesh on [0,extent] with divisions cells per axis. H8 keeps
// the grid cells; T4 splits every cell into six tetrahedra sharing the cell's
// main diagonal, all positively oriented.
template <class Real>
inline Mesh<Real> generate_box(Vec3<Real> extent, std::array<int, 3> divisions, ElementKind kind) {
    for (int i = 0; i < 3; ++i) {
        if (!(extent[i] > Real(0))) throw ConfigError("box extent must be positive");
        if (divisions[i] < 1) throw ConfigError("box divisions must be >= 1");
    }
    const int nx = divisions[0], ny = divisions[1], nz = divisions[2];
    Mesh<Real> mesh;
    mesh.kind = kind;
    mesh.nodes.reserve(size_t(nx + 1) * (ny + 1) * (nz + 1));
    for (int k = 0; k <= nz; ++k)
        for (int j = 0; j <= ny; ++j)
            for (int i = 0; i <= nx; ++i)
                mesh.nodes.push_back({extent.x * Real(i) / Real(nx), extent.y * Real(j) / Real(ny),
                                      extent.z * Real(k) / Real(nz)});

    auto node_id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

    // Six tetrahedra per cell: walk the cell edges from corner (0,0,0) to
    // (1,1,1) in each axis order; every tet contains both diagonal ends.
    static constexpr int axis_orders[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                              {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};

    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                int corner[2][2][2];
                for (int dz = 0; dz < 2; ++dz)
                    for (int dy = 0; dy < 2; ++dy)
                        for (int dx = 0; dx < 2; ++dx)
                            corner[dx][dy][dz] = node_id(i + dx, j + dy, k + dz);
                if (kind == ElementKind::H8) {
                    for (auto s : h8_corner_sign)
                        mesh.conn.push_back(corner[(s[0] + 1) / 2][(s[1] + 1) / 2][(s[2] + 1) / 2]);
                    continue;
                }
                for (const auto& order : axis_orders) {
                    int step[3] = {0, 0, 0};
                    int path[4];
                    path[0] = corner[0][0][0];
                    for (int s = 0; s < 3; ++s) {
                        step[order[s]] = 1;
                        path[s + 1] = corner[step[0]][step[1]][step[2]];
                    }
                    // Positive orientation: swap the middle pair when the
                    // axis order is an odd permutation.
                    const bool odd = (order[0] == 0 && order[1] == 2) ||
                                     (order[0] == 1 && order[1] == 0) ||
                                     (order[0] == 2 && order[1] == 1);
                    if (odd) std::swap(path[1], path[2]);
                    for (int a = 0; a < 4; ++a) mesh.conn.push_back(path[a]);
                }
            }

    validate_mesh(mesh);
    return mesh;
}

// Legacy ASCII unstructured-grid export carrying one point vector field named
// "displacement". Deterministic formatting, full precision.
template <class Real>
inline std::string export_field(const Mesh<Real>& mesh, const std::vector<Vec3<Real>>& displacements,
                                const std::string& title = "djtled displacement field") {
    if (long(displacements.size()) != mesh.num_nodes())
        throw ConfigError("displacement count (" + std::to_string(displacements.size()) +
                          ") does not match node count (" + std::to_string(mesh.num_nodes()) + ")");
    const char* scalar_name = sizeof(Real) == 4 ? "float" : "double";
    std::ostringstream out;
    out << std::setprecision(std::numeric_limits<Real>::max_digits10);
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.num_nodes() << " " << scalar_name << "\n";
    for (const auto& p : mesh.nodes) out << p.x << " " << p.y << " " << p.z << "\n";
    const int npe = mesh.npe();
    out << "CELLS " << mesh.num_elements() << " " << mesh.num_elements() * (npe + 1) << "\n";
    for (long e = 0; e < mesh.num_elements(); ++e) {
        const int* c = mesh.element(e);
        out << npe;
        for (int a = 0; a < npe; ++a) out << " " << c[a];
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.num_elements() << "\n";
    const int cell_type = mesh.kind == ElementKind::T4 ? 10 : 12;
    for (long e = 0; e < mesh.num_elements(); ++e) out << cell_type << "\n";
    out << "POINT_DATA " << mesh.num_nodes() << "\n";
    out << "VECTORS displacement " << scalar_name << "\n";
    for (const auto& u : displacements) out << u.x << " " << u.y << " " << u.z << "\n";
    return out.str();
}

// Node -> (element, local node) adjacency with a fixed traversal order, so
// gathered nodal sums are reproducible regardless of thread count.
struct NodeElementAdjacency {
    std::vector<long> offsets;                    // size num_nodes + 1
    std::vector<std::pair<long, int>> pairs;      // (element, local index), ascending element order

    template <class Real>
    static NodeElementAdjacency build(const Mesh<Real>& mesh) {
        NodeElementAdjacency adj;
        const long n = mesh.num_nodes();
        const int npe = mesh.npe();
        std::vector<long> count(size_t(n), 0);
        for (int idx : mesh.conn) ++count[idx];
        adj.offsets.assign(size_t(n) + 1, 0);
        for (long i = 0; i < n; ++i) adj.offsets[i + 1] = adj.offsets[i] + count[i];
        adj.pairs.resize(mesh.conn.size());
        std::vector<long> cursor(adj.offsets.begin(), adj.offsets.end() - 1);
        for (long e = 0; e < mesh.num_elements(); ++e) {
            const int* c = mesh.element(e);
            for (int a = 0; a < npe; ++a) adj.pairs[cursor[c[a]]++] = {e, a};
        }
        return adj;
    }
};

// Axis-aligned bounding box of the mesh nodes.
template <class Real>
inline std::pair<Vec3<Real>, Vec3<Real>> bounding_box(const Mesh<Real>& mesh) {
    Vec3<Real> lo{std::numeric_limits<Real>::max(), std::numeric_limits<Real>::max(),
                  std::numeric_limits<Real>::max()};
    Vec3<Real> hi{std::numeric_limits<Real>::lowest(), std::numeric_limits<Real>::lowest(),
                  std::numeric_limits<Real>::lowest()};
    for (const auto& p : mesh.nodes)
        for (int i = 0; i < 3; ++i) {
            lo[i] = std::min(lo[i], p[i]);
            hi[i] = std::max(hi[i], p[i]);
        }
    return {lo, hi};
}

} // namespace djtled
