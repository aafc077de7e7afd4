#pragma once

#include <cmath>
#include <vector>

#include "dispersionlab/asymptotics.hpp"
#include "dispersionlab/errors.hpp"
#include "dispersionlab/kernel.hpp"
#include "dispersionlab/parallel.hpp"
#include "dispersionlab/quadrature.hpp"
#include "dispersionlab/spectral.hpp"

namespace dispersionlab::majorant {

using kernel::KernelProfile;
using spectral::DataFunction;

// Strictly positive comparison kernel: algebraic envelope on the right,
// exponentially damped on the left, blended by logistic weights and rescaled
// to unit mass on the grid.
struct MajorantKernel {
    int k = 1;
    double a = 0.0;       // weight exponent coefficient of the damped side
    double omega1 = 0.0;  // 1 / int |F| over the tabulated window
    std::vector<double> grid;
    std::vector<double> values;

    double spacing() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
};

inline double majorant_shape(double y, int k, double a) {
    const double alpha = double(2 * k + 1) / double(2 * k);
    const double env = std::pow(1.0 + y * y, -double(2 * k - 1) / double(8 * k));
    const double sig_r = 1.0 / (1.0 + std::exp(-y));
    const double sig_l = 1.0 / (1.0 + std::exp(y));
    return env * (sig_r + sig_l * std::exp(-a * std::pow(1.0 + y * y, alpha / 2.0)));
}

inline MajorantKernel majorant_kernel(const KernelProfile& kern,
                                      const std::vector<double>& grid,
                                      double a = 0.0) {
    MajorantKernel m;
    m.k = kern.k;
    m.a = (a > 0.0) ? a : asymptotics::default_weight_coefficient(kern.k);
    m.grid = grid;
    // omega1 = 1/int|F| over the window (absolute integral, trapezoid)
    double absmass = 0.0;
    for (std::size_t i = 0; i + 1 < kern.grid.size(); ++i)
        absmass += 0.5 * (std::abs(kern.values()[i]) + std::abs(kern.values()[i + 1])) *
                   (kern.grid[i + 1] - kern.grid[i]);
    m.omega1 = 1.0 / absmass;
    m.values.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
        m.values[i] = m.omega1 * majorant_shape(grid[i], m.k, m.a);
    // rescale to unit mass exactly on the grid
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        mass += 0.5 * (m.values[i] + m.values[i + 1]) * (grid[i + 1] - grid[i]);
    for (double& v : m.values) v /= mass;
    return m;
}

// D-bar = max |F| / F-bar over the common grid; > 1 whenever F changes sign.
inline double majorant_constant(const KernelProfile& kern, const MajorantKernel& m) {
    if (kern.grid.size() != m.grid.size())
        throw invalid_argument_error("majorant_constant: grids differ");
    double dbar = 0.0;
    for (std::size_t i = 0; i < m.grid.size(); ++i)
        dbar = std::max(dbar, std::abs(kern.values()[i]) / m.values[i]);
    return dbar;
}

struct DerivativeBoundReport {
    int beta_max = 0;
    double a = 0.0;
    double c_bar = 0.0;  // smallest constant fitting both tail bounds
};

// Fit the smallest c-bar with |D^b F| <= c^b b^{((alpha-1)/alpha) b} e^{-a|y|^alpha}
// for y <= -1 and |D^b F| <= c^b y^{b/(2k)} for y >= 1, over 1 <= b <= beta_max.
inline DerivativeBoundReport derivative_bound_check(const KernelProfile& kern,
                                                    int beta_max, double a = 0.0) {
    if (beta_max < 1)
        throw invalid_argument_error("derivative_bound_check: beta_max must be >= 1");
    if (std::size_t(beta_max) >= kern.deriv_table.size())
        throw invalid_argument_error("derivative_bound_check: derivative table too short");
    DerivativeBoundReport rep;
    rep.beta_max = beta_max;
    rep.a = (a > 0.0) ? a : asymptotics::default_weight_coefficient(kern.k);
    const double alpha = kern.params.alpha;
    double cbar = 0.0;
    for (int b = 1; b <= beta_max; ++b) {
        const auto& row = kern.deriv_table[std::size_t(b)];
        const double bfac = std::pow(double(b), (alpha - 1.0) / alpha * double(b));
        for (std::size_t i = 0; i < kern.grid.size(); ++i) {
            const double y = kern.grid[i];
            double needed;
            if (y <= -1.0)
                needed = std::abs(row[i]) /
                         (bfac * std::exp(-rep.a * std::pow(-y, alpha)));
            else if (y >= 1.0)
                needed = std::abs(row[i]) / std::pow(y, double(b) / double(2 * kern.k));
            else
                continue;
            cbar = std::max(cbar, std::pow(needed, 1.0 / double(b)));
        }
    }
    rep.c_bar = cbar;
    return rep;
}

// Comparison evolution: convolution with the positive unit-mass kernel.
// The kernel is a grid object (its algebraic right tail is not integrable on
// the line, so unit mass only makes sense on the window); outside its window
// it is treated as zero, which keeps the windowed mass identity exact.
inline std::vector<double> majorant_evolution(const MajorantKernel& m,
                                              const DataFunction& u0bar, double t,
                                              const std::vector<double>& x_grid) {
    if (!(t > 0.0)) throw invalid_argument_error("majorant_evolution: t must be > 0");
    const double s = std::pow(t, -1.0 / double(2 * m.k + 1));
    const double h = m.spacing();
    auto interp = [&](double y) {
        if (y <= m.grid.front() || y >= m.grid.back()) return 0.0;
        auto i = std::min(std::size_t((y - m.grid.front()) / h), m.grid.size() - 2);
        double tt = (y - m.grid[i]) / h;
        return (1.0 - tt) * m.values[i] + tt * m.values[i + 1];
    };
    std::vector<double> out(x_grid.size());
    parallel_for(x_grid.size(), [&](std::size_t i) {
        out[i] = s * quadrature::integrate(
                         [&](double z) { return interp((x_grid[i] - z) * s) * u0bar.f(z); },
                         u0bar.support_left, u0bar.support_right, 1e-12, 1e-10);
    });
    return out;
}

// Check the comparison preconditions u0bar >= 0 and Dbar |u0| <= u0bar on a
// sample grid, then verify pointwise domination |u| <= ubar.
inline bool compare(const std::vector<double>& u, const std::vector<double>& ubar) {
    if (u.size() != ubar.size())
        throw invalid_argument_error("compare: sample lengths differ");
    for (std::size_t i = 0; i < u.size(); ++i)
        if (std::abs(u[i]) > ubar[i] + 1e-12) return false;
    return true;
}

inline void require_majorized_data(const DataFunction& u0, const DataFunction& u0bar,
                                   double dbar, int samples = 512) {
    const double lo = std::min(u0.support_left, u0bar.support_left);
    const double hi = std::max(u0.support_right, u0bar.support_right);
    for (int i = 0; i <= samples; ++i) {
        const double z = lo + (hi - lo) * double(i) / double(samples);
        const double bar = u0bar.f(z);
        if (bar < -1e-14)
            throw precondition_violation_error("majorant data must be nonnegative");
        if (dbar * std::abs(u0.f(z)) > bar + 1e-12)
            throw precondition_violation_error(
                "majorant data must dominate Dbar |u0| pointwise");
    }
}

}  // namespace dispersionlab::majorant
