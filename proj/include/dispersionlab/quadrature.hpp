#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "dispersionlab/errors.hpp"

namespace dispersionlab::quadrature {

namespace detail {

// Gauss-Kronrod 7-15 nodes/weights on [-1,1] (symmetric half listed).
inline constexpr double gk_xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double gk_wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(const F& f, double a, double b, double& result, double& err) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double fc = f(c);
    double resg = fc * gk_wg[3];
    double resk = fc * gk_wgk[7];
    for (int j = 0; j < 7; ++j) {
        double x = h * gk_xgk[j];
        double f1 = f(c - x), f2 = f(c + x);
        resk += gk_wgk[j] * (f1 + f2);
        if (j % 2 == 1) resg += gk_wg[j / 2] * (f1 + f2);
    }
    result = resk * h;
    err = std::abs((resk - resg) * h);
}

}  // namespace detail

// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-10, int max_depth = 48) {
    struct seg { double a, b; int depth; };
    double total = 0.0, total_err = 0.0;
    std::vector<seg> stack{{a, b, 0}};
    while (!stack.empty()) {
        seg s = stack.back();
        stack.pop_back();
        double r, e;
        detail::gk15(f, s.a, s.b, r, e);
        if (e <= abs_tol * (s.b - s.a) / (b - a) + rel_tol * std::abs(r) ||
            s.depth >= max_depth) {
            total += r;
            total_err += e;
        } else {
            double m = 0.5 * (s.a + s.b);
            stack.push_back({s.a, m, s.depth + 1});
            stack.push_back({m, s.b, s.depth + 1});
        }
    }
    if (!std::isfinite(total))
        throw quadrature_failure_error("adaptive quadrature produced a non-finite value");
    return total;
}

// Repeated averaging of a sequence of partial sums.  For alternating
// tails with smoothly varying lobes this is an Euler-type accelerator; it
// also sums Abel-regularizable alternating sequences whose terms grow
// polynomially.  Returns the fully averaged value and a crude error
// estimate (last difference in the final rows).
struct accelerated_sum {
    double value = 0.0;
    double error_estimate = std::numeric_limits<double>::infinity();
};

inline accelerated_sum accelerate_partial_sums(std::vector<double> t) {
    if (t.empty()) throw quadrature_failure_error("no partial sums to accelerate");
    accelerated_sum out;
    out.value = t.back();
    double prev = t.back();
    while (t.size() > 1) {
        for (std::size_t i = 0; i + 1 < t.size(); ++i) t[i] = 0.5 * (t[i] + t[i + 1]);
        t.pop_back();
        out.error_estimate = std::abs(t.back() - prev);
        prev = t.back();
        out.value = t.back();
    }
    return out;
}

// Regularized integral of a sampled function whose right tail oscillates.
// The grid part up to the first sign change past `osc_start` is summed with
// the trapezoid rule; the remaining lobes are truncated at successive zero
// crossings and the partial sums averaged repeatedly.
inline accelerated_sum regularized_integral(const std::vector<double>& y,
                                            const std::vector<double>& f,
                                            double osc_start) {
    const std::size_t n = y.size();
    if (n < 8 || f.size() != n)
        throw quadrature_failure_error("regularized_integral: bad sample arrays");
    std::vector<std::size_t> cross;
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (y[i] >= osc_start && f[i] * f[i + 1] < 0.0) cross.push_back(i);
    if (cross.size() < 4) {
        // no oscillatory tail to regularize: plain trapezoid
        double s = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            s += 0.5 * (f[i] + f[i + 1]) * (y[i + 1] - y[i]);
        return {s, 0.0};
    }
    // cumulative trapezoid sums
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i)
        cum[i + 1] = cum[i] + 0.5 * (f[i] + f[i + 1]) * (y[i + 1] - y[i]);
    std::vector<double> partials;
    partials.reserve(cross.size());
    for (std::size_t ic : cross) {
        // linear interpolation of the crossing abscissa
        double xc = y[ic] + (y[ic + 1] - y[ic]) * f[ic] / (f[ic] - f[ic + 1]);
        partials.push_back(cum[ic] + 0.5 * f[ic] * (xc - y[ic]));
    }
    return accelerate_partial_sums(std::move(partials));
}

}  // namespace dispersionlab::quadrature
