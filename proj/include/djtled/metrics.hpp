#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "djtled/core.hpp"

namespace djtled {

// Root mean square difference over all DOFs.
template <class Real>
inline Real rmse(const std::vector<Real>& a, const std::vector<Real>& b) {
    if (a.size() != b.size()) throw ConfigError("rmse: field lengths differ");
    if (a.empty()) throw ConfigError("rmse: empty fields");
    double acc = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        const double d = double(a[i]) - double(b[i]);
        acc += d * d;
    }
    return Real(std::sqrt(acc / double(a.size())));
}

// Normalised relative error per DOF: |a_i - b_i| / (max(b) - min(b)).
// The reference field must not be uniform.
template <class Real>
inline std::vector<Real> nre(const std::vector<Real>& a, const std::vector<Real>& b) {
    if (a.size() != b.size()) throw ConfigError("nre: field lengths differ");
    if (a.empty()) throw ConfigError("nre: empty fields");
    const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
    const Real range = *hi - *lo;
    if (!(range > Real(0))) throw ConfigError("nre: reference field is uniform, range is zero");
    std::vector<Real> out(a.size());
    for (size_t i = 0; i < a.size(); ++i) out[i] = std::abs(a[i] - b[i]) / range;
    return out;
}

// Fixed-width histogram over [0, max(values)].
template <class Real>
struct Histogram {
    Real bucket_width = 0;
    std::vector<long> counts;
};

template <class Real>
inline Histogram<Real> histogram(const std::vector<Real>& values, int buckets = 20) {
    Histogram<Real> h;
    h.counts.assign(size_t(buckets), 0);
    if (values.empty()) return h;
    Real vmax = 0;
    for (Real v : values) vmax = std::max(vmax, v);
    if (vmax <= Real(0)) {
        h.counts[0] = long(values.size());
        return h;
    }
    h.bucket_width = vmax / Real(buckets);
    for (Real v : values) {
        int b = int(v / h.bucket_width);
        if (b >= buckets) b = buckets - 1;
        ++h.counts[size_t(b)];
    }
    return h;
}

// Ordinary least squares y = slope x + intercept with the coefficient of
// determination.
struct LinearFit {
    double slope = 0;
    double intercept = 0;
    double r2 = 0;
};

inline LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw ConfigError("linear_fit: need >= 2 matching points");
    const double n = double(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0) throw ConfigError("linear_fit: degenerate abscissae");
    LinearFit f;
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / n;
    for (size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.slope * x[i] + f.intercept);
        ss_res += e * e;
        ss_tot += (y[i] - mean_y) * (y[i] - mean_y);
    }
    f.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

} // namespace djtled
