#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace djtled {

// Errors raised while building a model (bad input files, invalid meshes,
// inconsistent configuration). Runtime failures of a running simulation
// (element inversion, divergence) are reported through SimulationError.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, long line)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    long line() const { return line_; }

private:
    long line_;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MeshError : public std::runtime_error {
public:
    MeshError(const std::string& what, long element = -1)
        : std::runtime_error(element < 0 ? what : "element " + std::to_string(element) + ": " + what),
          element_(element) {}
    long element() const { return element_; }

private:
    long element_;
};

class SimulationError : public std::runtime_error {
public:
    enum class Kind { ElementInversion, Divergence };

    SimulationError(Kind kind, const std::string& what, long index)
        : std::runtime_error(what), kind_(kind), index_(index) {}
    Kind kind() const { return kind_; }
    // Inverted element id or diverged step number, depending on kind.
    long index() const { return index_; }

private:
    Kind kind_;
    long index_;
};

// Which strain invariants a constitutive model depends on. The volume ratio
// is always tracked and is not listed here.
struct InvariantSet {
    bool i1 = false;
    bool i2 = false;
    bool i4 = false;
    bool i5 = false;
    bool i6 = false;
    bool i7 = false;

    bool any_fibre_a() const { return i4 || i5; }
    bool any_fibre_b() const { return i6 || i7; }
};

template <class Real>
struct Vec3 {
    Real x{}, y{}, z{};

    Real& operator[](int i) { return (&x)[i]; }
    Real operator[](int i) const { return (&x)[i]; }
};

template <class Real>
inline Vec3<Real> operator+(Vec3<Real> a, Vec3<Real> b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
template <class Real>
inline Vec3<Real> operator-(Vec3<Real> a, Vec3<Real> b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
template <class Real>
inline Vec3<Real> operator*(Real s, Vec3<Real> a) { return {s * a.x, s * a.y, s * a.z}; }

template <class Real>
inline Real dot(Vec3<Real> a, Vec3<Real> b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

template <class Real>
inline Vec3<Real> cross(Vec3<Real> a, Vec3<Real> b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class Real>
inline Real norm(Vec3<Real> a) { return std::sqrt(dot(a, a)); }

// Dense row-major 3x3 matrix.
template <class Real>
struct Mat3 {
    Real m[3][3]{};

    Real& operator()(int i, int j) { return m[i][j]; }
    Real operator()(int i, int j) const { return m[i][j]; }

    static Mat3 identity() {
        Mat3 r;
        r.m[0][0] = r.m[1][1] = r.m[2][2] = Real(1);
        return r;
    }

    static Mat3 zero() { return Mat3{}; }

    Vec3<Real> col(int j) const { return {m[0][j], m[1][j], m[2][j]}; }
    Vec3<Real> row(int i) const { return {m[i][0], m[i][1], m[i][2]}; }
};

template <class Real>
inline Mat3<Real> operator+(const Mat3<Real>& a, const Mat3<Real>& b) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] + b.m[i][j];
    return r;
}

template <class Real>
inline Mat3<Real> operator-(const Mat3<Real>& a, const Mat3<Real>& b) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[i][j] - b.m[i][j];
    return r;
}

template <class Real>
inline Mat3<Real> operator*(Real s, const Mat3<Real>& a) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = s * a.m[i][j];
    return r;
}

template <class Real>
inline Mat3<Real> mul(const Mat3<Real>& a, const Mat3<Real>& b) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.m[i][j] = a.m[i][0] * b.m[0][j] + a.m[i][1] * b.m[1][j] + a.m[i][2] * b.m[2][j];
    return r;
}

// A^T * B
template <class Real>
inline Mat3<Real> mul_tn(const Mat3<Real>& a, const Mat3<Real>& b) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.m[i][j] = a.m[0][i] * b.m[0][j] + a.m[1][i] * b.m[1][j] + a.m[2][i] * b.m[2][j];
    return r;
}

// A * B^T
template <class Real>
inline Mat3<Real> mul_nt(const Mat3<Real>& a, const Mat3<Real>& b) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            r.m[i][j] = a.m[i][0] * b.m[j][0] + a.m[i][1] * b.m[j][1] + a.m[i][2] * b.m[j][2];
    return r;
}

template <class Real>
inline Mat3<Real> transpose(const Mat3<Real>& a) {
    Mat3<Real> r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r.m[i][j] = a.m[j][i];
    return r;
}

template <class Real>
inline Vec3<Real> mul(const Mat3<Real>& a, Vec3<Real> v) {
    return {a.m[0][0] * v.x + a.m[0][1] * v.y + a.m[0][2] * v.z,
            a.m[1][0] * v.x + a.m[1][1] * v.y + a.m[1][2] * v.z,
            a.m[2][0] * v.x + a.m[2][1] * v.y + a.m[2][2] * v.z};
}

template <class Real>
inline Real det(const Mat3<Real>& a) {
    return a.m[0][0] * (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) -
           a.m[0][1] * (a.m[1][0] * a.m[2][2] - a.m[1][2] * a.m[2][0]) +
           a.m[0][2] * (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]);
}

template <class Real>
inline Real trace(const Mat3<Real>& a) { return a.m[0][0] + a.m[1][1] + a.m[2][2]; }

// Inverse via adjugate; `d` must be the (nonzero) determinant of `a`.
template <class Real>
inline Mat3<Real> inverse(const Mat3<Real>& a, Real d) {
    const Real inv_d = Real(1) / d;
    Mat3<Real> r;
    r.m[0][0] = (a.m[1][1] * a.m[2][2] - a.m[1][2] * a.m[2][1]) * inv_d;
    r.m[0][1] = (a.m[0][2] * a.m[2][1] - a.m[0][1] * a.m[2][2]) * inv_d;
    r.m[0][2] = (a.m[0][1] * a.m[1][2] - a.m[0][2] * a.m[1][1]) * inv_d;
    r.m[1][0] = (a.m[1][2] * a.m[2][0] - a.m[1][0] * a.m[2][2]) * inv_d;
    r.m[1][1] = (a.m[0][0] * a.m[2][2] - a.m[0][2] * a.m[2][0]) * inv_d;
    r.m[1][2] = (a.m[0][2] * a.m[1][0] - a.m[0][0] * a.m[1][2]) * inv_d;
    r.m[2][0] = (a.m[1][0] * a.m[2][1] - a.m[1][1] * a.m[2][0]) * inv_d;
    r.m[2][1] = (a.m[0][1] * a.m[2][0] - a.m[0][0] * a.m[2][1]) * inv_d;
    r.m[2][2] = (a.m[0][0] * a.m[1][1] - a.m[0][1] * a.m[1][0]) * inv_d;
    return r;
}

// Symmetric 3x3 matrix, unique components only.
template <class Real>
struct SymMat3 {
    Real xx{}, yy{}, zz{}, xy{}, xz{}, yz{};

    static SymMat3 identity() { return {Real(1), Real(1), Real(1), Real(0), Real(0), Real(0)}; }

    Mat3<Real> full() const {
        Mat3<Real> r;
        r.m[0][0] = xx; r.m[0][1] = xy; r.m[0][2] = xz;
        r.m[1][0] = xy; r.m[1][1] = yy; r.m[1][2] = yz;
        r.m[2][0] = xz; r.m[2][1] = yz; r.m[2][2] = zz;
        return r;
    }
};

template <class Real>
inline SymMat3<Real> operator+(SymMat3<Real> a, SymMat3<Real> b) {
    return {a.xx + b.xx, a.yy + b.yy, a.zz + b.zz, a.xy + b.xy, a.xz + b.xz, a.yz + b.yz};
}

template <class Real>
inline SymMat3<Real> operator*(Real s, SymMat3<Real> a) {
    return {s * a.xx, s * a.yy, s * a.zz, s * a.xy, s * a.xz, s * a.yz};
}

// Outer product v v^T.
template <class Real>
inline SymMat3<Real> outer(Vec3<Real> v) {
    return {v.x * v.x, v.y * v.y, v.z * v.z, v.x * v.y, v.x * v.z, v.y * v.z};
}

// Symmetrised outer product u v^T + v u^T.
template <class Real>
inline SymMat3<Real> sym_outer(Vec3<Real> u, Vec3<Real> v) {
    return {2 * u.x * v.x, 2 * u.y * v.y, 2 * u.z * v.z,
            u.x * v.y + u.y * v.x, u.x * v.z + u.z * v.x, u.y * v.z + u.z * v.y};
}

template <class Real>
inline SymMat3<Real> sym_part(const Mat3<Real>& a) {
    return {a.m[0][0], a.m[1][1], a.m[2][2],
            (a.m[0][1] + a.m[1][0]) / 2, (a.m[0][2] + a.m[2][0]) / 2, (a.m[1][2] + a.m[2][1]) / 2};
}

// Q^T S Q for symmetric S: the result is symmetric again.
template <class Real>
inline SymMat3<Real> congruence_tn(const Mat3<Real>& q, const SymMat3<Real>& s) {
    const Mat3<Real> sq = mul(s.full(), q);
    SymMat3<Real> r;
    r.xx = q.m[0][0] * sq.m[0][0] + q.m[1][0] * sq.m[1][0] + q.m[2][0] * sq.m[2][0];
    r.yy = q.m[0][1] * sq.m[0][1] + q.m[1][1] * sq.m[1][1] + q.m[2][1] * sq.m[2][1];
    r.zz = q.m[0][2] * sq.m[0][2] + q.m[1][2] * sq.m[1][2] + q.m[2][2] * sq.m[2][2];
    r.xy = q.m[0][0] * sq.m[0][1] + q.m[1][0] * sq.m[1][1] + q.m[2][0] * sq.m[2][1];
    r.xz = q.m[0][0] * sq.m[0][2] + q.m[1][0] * sq.m[1][2] + q.m[2][0] * sq.m[2][2];
    r.yz = q.m[0][1] * sq.m[0][2] + q.m[1][1] * sq.m[1][2] + q.m[2][1] * sq.m[2][2];
    return r;
}

template <class Real>
inline Real trace(const SymMat3<Real>& a) { return a.xx + a.yy + a.zz; }

// Frobenius inner product of two symmetric matrices.
template <class Real>
inline Real ddot(const SymMat3<Real>& a, const SymMat3<Real>& b) {
    return a.xx * b.xx + a.yy * b.yy + a.zz * b.zz + 2 * (a.xy * b.xy + a.xz * b.xz + a.yz * b.yz);
}

// Symmetric 6x6 matrix, packed upper triangle (21 entries, row major).
template <class Real>
struct Sym6 {
    std::array<Real, 21> p{};

    static constexpr int index(int i, int j) {
        if (i > j) { const int t = i; i = j; j = t; }
        return i * 6 - i * (i + 1) / 2 + j;
    }

    Real& operator()(int i, int j) { return p[index(i, j)]; }
    Real operator()(int i, int j) const { return p[index(i, j)]; }

    // g^T M g
    Real quadratic_form(const std::array<Real, 6>& g) const {
        Real q = 0;
        for (int i = 0; i < 6; ++i) {
            Real row = p[index(i, i)] * g[i];
            for (int j = i + 1; j < 6; ++j) row += 2 * p[index(i, j)] * g[j];
            q += row * g[i];
        }
        return q;
    }
};

// Dispatches a loop body across `threads` OpenMP threads (serial if 1).
// Chunking is static so results never depend on the scheduler.
template <class Body>
inline void parallel_for(long n, int threads, const Body& body) {
#ifdef _OPENMP
    if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long i = 0; i < n; ++i) body(i);
        return;
    }
#else
    (void)threads;
#endif
    for (long i = 0; i < n; ++i) body(i);
}

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace djtled
