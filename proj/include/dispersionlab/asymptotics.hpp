#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "dispersionlab/errors.hpp"

namespace dispersionlab::asymptotics {

enum class side { plus_infinity, minus_infinity };
enum class root_class { growing, neutral, decaying };

// Closed-form constants of the order-(2k+1) dispersion kernel tails.
//
// Both tails behave like |y|^{-envelope_exp} times an exponential of
// b|y|^alpha, where b runs over the 2k roots of the characteristic bundle.
// b_k is the angle of the least-damped decaying bundle root at -infinity,
// which fixes the left-tail decay rate d_hat_k = d_k |cos b_k|.  At k=1 that
// angle is pi, so sin(b_1) = 0 and the left tail is a pure non-oscillatory
// exponential.
struct AsymptoticParams {
    int k = 1;
    double alpha = 0.0;         // (2k+1)/(2k)
    double d_k = 0.0;           // 2k (1/(2k+1))^alpha
    double b_k = 0.0;           // pi (k+1)/(2k)
    double d_hat_k = 0.0;       // d_k |cos b_k| = d_k sin(pi/(2k))
    double envelope_exp = 0.0;  // (2k-1)/(4k)
    bool pure_exponential_left_tail = false;  // k=1 only
};

struct BundleRoot {
    int m = 0;                    // index 0..2k-1
    std::complex<double> value;   // fully scaled coefficient b
    side tail = side::plus_infinity;
    root_class classification = root_class::neutral;
};

struct WeightSpec {
    side tail = side::plus_infinity;
    double exponent = 0.0;  // alpha
    double d_gap = 0.0;     // real-axis distance to the nearest growing root
    double a_max = 0.0;     // 2 d_gap; +inf when no growing root exists
};

struct WeightBounds {
    WeightSpec rho_plus, rho_minus;            // weight for the forward operator
    WeightSpec rho_star_plus, rho_star_minus;  // weight for the adjoint operator
};

inline void require_order(int k) {
    if (k < 1) throw invalid_argument_error("operator order parameter k must be >= 1");
}

inline AsymptoticParams dispersion_constants(int k) {
    require_order(k);
    AsymptoticParams p;
    p.k = k;
    p.alpha = double(2 * k + 1) / double(2 * k);
    p.d_k = 2.0 * k * std::pow(1.0 / double(2 * k + 1), p.alpha);
    p.b_k = std::numbers::pi * double(k + 1) / double(2 * k);
    p.d_hat_k = p.d_k * std::abs(std::cos(p.b_k));
    p.envelope_exp = double(2 * k - 1) / double(4 * k);
    p.pure_exponential_left_tail = (k == 1);
    return p;
}

// Model value of the tail envelope.  side::plus_infinity gives the
// algebraically decaying oscillation; side::minus_infinity the exponentially
// damped one (pure exponential at k=1 since sin b_1 = 0).
inline double envelope(double y, const AsymptoticParams& p, side s, double phase) {
    double ay = std::abs(y);
    if (ay < 1.0)
        throw invalid_argument_error("envelope: asymptotic model requires |y| >= 1");
    double amp = std::pow(ay, -p.envelope_exp);
    if (s == side::plus_infinity)
        return amp * std::cos(p.d_k * std::pow(ay, p.alpha) + phase);
    double osc = std::cos(p.d_k * std::pow(ay, p.alpha) * std::sin(p.b_k) + phase);
    return amp * osc * std::exp(-p.d_hat_k * std::pow(ay, p.alpha));
}

// All 2k roots of the exponential bundle e^{b |y|^alpha} of the forward
// operator at the given tail, fully scaled (|b| = d_k).  At +infinity the
// census is {k-1 growing, 2 neutral, k-1 decaying}; at -infinity it is
// {k growing, 0 neutral, k decaying}.
inline std::vector<BundleRoot> bundle_roots(int k, side s) {
    require_order(k);
    const AsymptoticParams p = dispersion_constants(k);
    const bool half_offset = ((s == side::plus_infinity) == (k % 2 == 1));
    std::vector<BundleRoot> roots;
    roots.reserve(2 * k);
    for (int m = 0; m < 2 * k; ++m) {
        double theta = half_offset
                           ? (std::numbers::pi * (1 + 2 * m)) / double(2 * k)
                           : (std::numbers::pi * m) / double(k);
        BundleRoot r;
        r.m = m;
        r.tail = s;
        r.value = std::polar(p.d_k, theta);
        // angles are exact multiples of pi/(2k), so Re(b) at a neutral root
        // is zero up to rounding of cos(pi/2)
        double re = r.value.real();
        double tol = 1e-12 * p.d_k;
        r.classification = re > tol    ? root_class::growing
                           : re < -tol ? root_class::decaying
                                       : root_class::neutral;
        roots.push_back(r);
    }
    return roots;
}

// The adjoint operator's bundle at a tail equals the forward operator's
// bundle at the opposite tail.
inline std::vector<BundleRoot> adjoint_bundle_roots(int k, side s) {
    side flipped = (s == side::plus_infinity) ? side::minus_infinity : side::plus_infinity;
    auto roots = bundle_roots(k, flipped);
    for (auto& r : roots) r.tail = s;
    return roots;
}

namespace detail {

inline WeightSpec gap_from_roots(const std::vector<BundleRoot>& roots,
                                 const AsymptoticParams& p, side s) {
    WeightSpec w;
    w.tail = s;
    w.exponent = p.alpha;
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& r : roots)
        if (r.classification == root_class::growing)
            gap = std::min(gap, r.value.real());
    w.d_gap = gap;
    w.a_max = std::isinf(gap) ? gap : 2.0 * gap;
    return w;
}

}  // namespace detail

// Admissible weight-exponent intervals (0, a_max) for the two weighted
// spaces; a_max = 2 d where d is the distance from the imaginary axis to the
// nearest growing bundle root.  Where no growing root exists on a side (the
// forward weight at +infinity and the adjoint weight at -infinity, k=1 only)
// a_max is reported as +inf and any a > 0 admissible on the other side works.
inline WeightBounds weight_bounds(int k) {
    require_order(k);
    const AsymptoticParams p = dispersion_constants(k);
    WeightBounds wb;
    wb.rho_plus = detail::gap_from_roots(bundle_roots(k, side::plus_infinity), p,
                                         side::plus_infinity);
    wb.rho_minus = detail::gap_from_roots(bundle_roots(k, side::minus_infinity), p,
                                          side::minus_infinity);
    wb.rho_star_plus = detail::gap_from_roots(adjoint_bundle_roots(k, side::plus_infinity),
                                              p, side::plus_infinity);
    wb.rho_star_minus = detail::gap_from_roots(
        adjoint_bundle_roots(k, side::minus_infinity), p, side::minus_infinity);
    return wb;
}

// Default weight-exponent coefficient: safely inside every admissible
// finite interval.
inline double default_weight_coefficient(int k) {
    const WeightBounds wb = weight_bounds(k);
    double a = std::numeric_limits<double>::infinity();
    for (const WeightSpec* w : {&wb.rho_plus, &wb.rho_minus, &wb.rho_star_plus,
                                &wb.rho_star_minus})
        if (std::isfinite(w->a_max)) a = std::min(a, w->a_max);
    return 0.5 * a;
}

}  // namespace dispersionlab::asymptotics
