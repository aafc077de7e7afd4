#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "dispersionlab/errors.hpp"
#include "dispersionlab/kernel.hpp"
#include "dispersionlab/polynomial.hpp"
#include "dispersionlab/quadrature.hpp"

namespace dispersionlab::spectral {

using kernel::KernelProfile;

// lambda_l = -l/(2k+1), exact.
inline rational eigenvalue(int l, int k) {
    if (l < 0) throw invalid_argument_error("eigenvalue: index must be >= 0");
    asymptotics::require_order(k);
    return rational(-l, 2 * k + 1);
}

inline double sqrt_factorial(int l) {
    return std::exp(0.5 * std::lgamma(double(l) + 1.0));
}

// Derivative eigenfunction psi_l = ((-1)^l / sqrt(l!)) D^l F, sampled on the
// kernel grid.
struct EigenPair {
    int l = 0;
    int k = 1;
    rational lambda;
    std::vector<double> psi_samples;
};

inline EigenPair eigenfunction(int l, const KernelProfile& kern) {
    if (l < 0) throw invalid_argument_error("eigenfunction: index must be >= 0");
    if (std::size_t(l) >= kern.deriv_table.size())
        throw invalid_argument_error(
            "eigenfunction: derivative table does not reach the requested order");
    EigenPair p;
    p.l = l;
    p.k = kern.k;
    p.lambda = eigenvalue(l, kern.k);
    const double c = ((l % 2 == 0) ? 1.0 : -1.0) / sqrt_factorial(l);
    const auto& row = kern.deriv_table[std::size_t(l)];
    p.psi_samples.resize(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) p.psi_samples[i] = c * row[i];
    return p;
}

enum class sign_convention { plain, metric_adjusted };

// Polynomial eigenfunction of the adjoint operator, stored as an exact
// rational polynomial times the symbolic common factor 1/sqrt(l!).  The
// rational part has leading coefficient 1; metric_adjusted carries the extra
// (-1)^l used with the reflected pairing.
struct AdjointPolynomial {
    int l = 0;
    int k = 1;
    rational lambda;
    sign_convention convention = sign_convention::plain;
    RationalPolynomial poly;  // exact part; full polynomial is poly / sqrt(l!)

    double evaluate(double y) const { return poly.evaluate(y) / sqrt_factorial(l); }
};

// The correction terms follow from telescoping the eigenvalue equation with
// homogeneous pieces P_j: P_{j+1} = ((-1)^k/(j+1)) D^{2k+1} P_j, i.e. the
// j-th term carries the sign (-1)^{kj}.  (A constant prefactor on the whole
// correction sum does not satisfy the eigen-equation; substitute l=3, k=1 to
// see the constant term must be -6, not +6.)
inline AdjointPolynomial adjoint_polynomial(int l, int k,
                                            sign_convention conv = sign_convention::plain) {
    if (l < 0) throw invalid_argument_error("adjoint_polynomial: index must be >= 0");
    asymptotics::require_order(k);
    AdjointPolynomial a;
    a.l = l;
    a.k = k;
    a.lambda = eigenvalue(l, k);
    a.convention = conv;
    const int step = 2 * k + 1;
    RationalPolynomial lead;
    lead.set(l, rational(1));
    a.poly = lead;
    rational jfact(1);
    for (int j = 1; j * step <= l; ++j) {
        jfact *= j;
        // (1/j!) D^{(2k+1)j} y^l = l!/(l - step j)! / j! * y^{l - step j}
        rational c(1);
        for (int m = l; m > l - step * j; --m) c *= m;
        rational coeff = c / jfact;
        if ((k % 2 == 1) && (j % 2 == 1)) coeff = -coeff;  // (-1)^{kj}
        a.poly.set(l - step * j, coeff);
    }
    if (conv == sign_convention::metric_adjusted && l % 2 == 1)
        a.poly = a.poly.scaled(rational(-1));
    return a;
}

// Exact coefficient-level application of the adjoint differential expression
// (-1)^{k+1} D^{2k+1} - (1/(2k+1)) y D.
inline AdjointPolynomial apply_B_star(const AdjointPolynomial& in) {
    AdjointPolynomial out = in;
    const int k = in.k;
    const rational parity = (k % 2 == 0) ? rational(-1) : rational(1);
    RationalPolynomial high = in.poly.derivative(2 * k + 1).scaled(parity);
    RationalPolynomial drift =
        in.poly.derivative(1).times_y().scaled(rational(-1, 2 * k + 1));
    out.poly = high + drift;
    return out;
}

// Max-norm of (B psi_l - lambda_l psi_l) over the interior window |y| <= 5,
// with every derivative taken from the exact recurrence table.
inline double residual_B(const EigenPair& pair, const KernelProfile& kern,
                         double window_half_width = 5.0) {
    const int k = kern.k;
    const int need = pair.l + 2 * k + 1;
    if (std::size_t(need) >= kern.deriv_table.size())
        throw invalid_argument_error("residual_B: derivative table too short");
    const double c = ((pair.l % 2 == 0) ? 1.0 : -1.0) / sqrt_factorial(pair.l);
    const double parity = (k % 2 == 0) ? -1.0 : 1.0;
    const double lam = pair.lambda.convert_to<double>();
    const auto& v0 = kern.deriv_table[std::size_t(pair.l)];
    const auto& v1 = kern.deriv_table[std::size_t(pair.l + 1)];
    const auto& vtop = kern.deriv_table[std::size_t(need)];
    double worst = 0.0;
    for (std::size_t i = 0; i < kern.grid.size(); ++i) {
        double y = kern.grid[i];
        if (std::abs(y) > window_half_width) continue;
        double Bv = parity * vtop[i] + (y * v1[i] + v0[i]) / double(2 * k + 1);
        worst = std::max(worst, std::abs(c * Bv - lam * c * v0[i]));
    }
    return worst;
}

enum class decay_class { compact_support, fast_exponential, slow };

// Integrable data with a declared decay class, used by the moment
// functionals and the evolution semigroups.
struct DataFunction {
    std::function<double(double)> f;
    double support_left = -1.0;
    double support_right = 1.0;
    decay_class decay = decay_class::fast_exponential;
};

// M_l = (1/sqrt(l!)) int z^l data(z) dz over the declared support.
inline double moments(const DataFunction& data, int l) {
    if (l < 0) throw invalid_argument_error("moments: index must be >= 0");
    if (data.decay == decay_class::slow)
        throw decay_class_violation_error(
            "moments: declared decay class does not give absolutely convergent moments");
    double raw = quadrature::integrate(
        [&](double z) { return std::pow(z, l) * data.f(z); }, data.support_left,
        data.support_right, 1e-13, 1e-12);
    return raw / sqrt_factorial(l);
}

enum class pairing_mode { analytic_case_split, filtered_quadrature };

// Truncation policy for expansions and pairings.  nu is the
// coefficient-growth exponent (2k-1)/(2(2k+1)) of admissible expansions.
struct TruncationPolicy {
    int max_index = 12;
    double nu = 0.0;
    pairing_mode regularization = pairing_mode::analytic_case_split;

    static TruncationPolicy defaults(int k, pairing_mode mode = pairing_mode::analytic_case_split) {
        asymptotics::require_order(k);
        TruncationPolicy t;
        t.nu = double(2 * k - 1) / double(2 * (2 * k + 1));
        t.regularization = mode;
        return t;
    }
};

namespace detail {

// Filtered evaluation of int f(y) g(-y) dy against a quartic cutoff
// exp(-(y/w)^4), extrapolated over cutoff widths anchored at the tail's
// half-oscillation stations (zero crossings of F and of F').  Consecutive
// stations alternate the residual ripple, so one averaging pass removes it;
// the remaining systematic error is a series in w^{-4} handled by Neville
// extrapolation to w = infinity.
inline double filtered_dual_integral(const KernelProfile& kern,
                                     const std::function<double(std::size_t, double)>& fg) {
    const auto& y = kern.grid;
    const auto& F = kern.values();
    const auto& F1 = kern.deriv_table.size() > 1 ? kern.deriv_table[1] : kern.values();
    const double yr = y.back();
    const double wlo = 0.20 * yr, whi = 0.50 * yr;
    std::vector<double> widths;
    for (std::size_t i = 0; i + 1 < y.size(); ++i) {
        if (y[i] < wlo || y[i] > whi) continue;
        if (F[i] * F[i + 1] < 0.0 || F1[i] * F1[i + 1] < 0.0) widths.push_back(y[i]);
    }
    if (widths.size() < 4)
        throw regularization_unsupported_error(
            "filtered pairing: too few tail oscillations for the cutoff extrapolation");
    if (widths.size() > 12) widths.erase(widths.begin(), widths.end() - 12);
    const double h = kern.spacing();
    std::vector<double> xs(widths.size()), Is(widths.size());
    for (std::size_t j = 0; j < widths.size(); ++j) {
        const double w = widths[j];
        double acc = 0.0;
        double prev = fg(0, y[0]) * std::exp(-std::pow(y[0] / w, 4.0));
        for (std::size_t i = 1; i < y.size(); ++i) {
            double cur = fg(i, y[i]) * std::exp(-std::pow(y[i] / w, 4.0));
            acc += 0.5 * (prev + cur) * h;
            prev = cur;
        }
        xs[j] = std::pow(w, -4.0);
        Is[j] = acc;
    }
    // ripple removal: average consecutive half-period stations
    for (std::size_t i = 0; i + 1 < Is.size(); ++i) {
        Is[i] = 0.5 * (Is[i] + Is[i + 1]);
        xs[i] = 0.5 * (xs[i] + xs[i + 1]);
    }
    Is.pop_back();
    xs.pop_back();
    if (Is.size() > 6) {
        Is.erase(Is.begin(), Is.end() - 6);
        xs.erase(xs.begin(), xs.end() - 6);
    }
    // Neville extrapolation to x = 0
    for (std::size_t level = 1; level < Is.size(); ++level)
        for (std::size_t i = 0; i + level < Is.size(); ++i)
            Is[i] = Is[i] + (Is[i] - Is[i + 1]) * xs[i] / (xs[i + level] - xs[i]);
    return Is[0];
}

}  // namespace detail

// Regularized pairing <f, g>_* = int f(y) g(-y) dy of an eigenfunction with
// an adjoint polynomial.  analytic_case_split encodes the exact case
// analysis: annihilation below the diagonal, the regularized kernel mass on
// it (times (-1)^l for the plain convention; the metric-adjusted factor
// cancels the sign), eigenvalue orthogonality above.  filtered_quadrature
// evaluates the same integral directly for validation.
inline double indefinite_pairing(const EigenPair& f, const AdjointPolynomial& g,
                                 const KernelProfile& kern,
                                 const TruncationPolicy& policy) {
    if (f.k != g.k || f.k != kern.k)
        throw invalid_argument_error("pairing: mismatched operator order");
    if (policy.regularization == pairing_mode::analytic_case_split) {
        if (f.l != g.l) return 0.0;
        const double sign =
            (g.convention == sign_convention::metric_adjusted || g.l % 2 == 0) ? 1.0
                                                                               : -1.0;
        return sign * kern.regularized_mass;
    }
    const auto& table = kern.deriv_table;
    if (std::size_t(f.l) >= table.size())
        throw invalid_argument_error("pairing: derivative table too short");
    const double c = ((f.l % 2 == 0) ? 1.0 : -1.0) / sqrt_factorial(f.l);
    const auto& row = table[std::size_t(f.l)];
    return detail::filtered_dual_integral(kern, [&](std::size_t i, double y) {
        return c * row[i] * g.evaluate(-y);
    });
}

// (L+1)x(L+1) matrix of pairings <psi_b, psi-hat*_g>_* in the metric-adjusted
// convention, under which the family is bi-orthonormal.  The analytic mode
// returns the exact identity (scaled by the kernel's regularized mass); the
// filtered mode validates it by quadrature.
inline std::vector<std::vector<double>> biorthonormality_matrix(
    int L, int k, const KernelProfile& kern, const TruncationPolicy& policy) {
    if (L < 0) throw invalid_argument_error("biorthonormality_matrix: L must be >= 0");
    std::vector<std::vector<double>> M(std::size_t(L) + 1,
                                       std::vector<double>(std::size_t(L) + 1, 0.0));
    std::vector<EigenPair> pairs;
    std::vector<AdjointPolynomial> polys;
    for (int l = 0; l <= L; ++l) {
        pairs.push_back(eigenfunction(l, kern));
        polys.push_back(adjoint_polynomial(l, k, sign_convention::metric_adjusted));
    }
    for (int b = 0; b <= L; ++b)
        for (int g = 0; g <= L; ++g)
            M[std::size_t(b)][std::size_t(g)] =
                indefinite_pairing(pairs[std::size_t(b)], polys[std::size_t(g)], kern,
                                   policy);
    return M;
}

}  // namespace dispersionlab::spectral
