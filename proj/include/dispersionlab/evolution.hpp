#pragma once

#include <cmath>
#include <vector>

#include "dispersionlab/errors.hpp"
#include "dispersionlab/kernel.hpp"
#include "dispersionlab/parallel.hpp"
#include "dispersionlab/quadrature.hpp"
#include "dispersionlab/spectral.hpp"

namespace dispersionlab::evolution {

using kernel::KernelInterpolant;
using kernel::KernelProfile;
using spectral::DataFunction;

// u(x,t) = t^{-1/(2k+1)} int F((x-z) t^{-1/(2k+1)}) u0(z) dz over the data's
// support.  Arguments outside the tabulated kernel window fall back to the
// envelope extrapolation; the count of such calls is reported through
// `extrapolations` when non-null.
inline std::vector<double> evolve_convolution(const KernelProfile& kern,
                                              const DataFunction& u0, double t,
                                              const std::vector<double>& x_grid,
                                              long* extrapolations = nullptr) {
    if (!(t > 0.0)) throw invalid_argument_error("evolve_convolution: t must be > 0");
    const double s = std::pow(t, -1.0 / double(2 * kern.k + 1));
    KernelInterpolant F(kern);
    std::vector<double> out(x_grid.size());
    parallel_for(x_grid.size(), [&](std::size_t i) {
        const double x = x_grid[i];
        out[i] = s * quadrature::integrate(
                         [&](double z) { return F((x - z) * s) * u0.f(z); },
                         u0.support_left, u0.support_right, 1e-12, 1e-10);
    });
    if (extrapolations) *extrapolations = F.extrapolation_count();
    return out;
}

// Rescaled state w(y, tau) together with its expansion coefficients.
struct EvolutionState {
    int k = 1;
    double tau = 0.0;
    std::vector<double> y_grid;
    std::vector<double> w;
    std::vector<double> coefficients;        // M_l(u0), l = 0..L
    double truncation_estimate = 0.0;        // geometric-majorant bound on the tail
};

// Coefficient-growth majorant base gamma_k = (1/(2k+1)) (2k/(2k+1))^{2k-1}.
inline double expansion_majorant_base(int k) {
    asymptotics::require_order(k);
    return std::pow(double(2 * k) / double(2 * k + 1), 2 * k - 1) / double(2 * k + 1);
}

// w(y,tau) = sum_{l<=L} e^{-l tau/(2k+1)} M_l(u0) psi_l(y).  The kernel must
// carry derivatives up to order L+1 (for Hermite evaluation off-grid).
inline EvolutionState evolve_expansion(const KernelProfile& kern, const DataFunction& u0,
                                       double tau, int L,
                                       const std::vector<double>& y_grid) {
    if (tau < 0.0) throw invalid_argument_error("evolve_expansion: tau must be >= 0");
    if (u0.decay == spectral::decay_class::slow)
        throw decay_class_violation_error("evolve_expansion: data decays too slowly");
    if (std::size_t(L + 1) >= kern.deriv_table.size())
        throw invalid_argument_error("evolve_expansion: derivative table too short");
    const int k = kern.k;
    EvolutionState st;
    st.k = k;
    st.tau = tau;
    st.y_grid = y_grid;
    st.w.assign(y_grid.size(), 0.0);
    st.coefficients.resize(std::size_t(L) + 1);

    const double gk = expansion_majorant_base(k);
    double majorant_scale = 0.0;
    for (int l = 0; l <= L; ++l) {
        const double M = spectral::moments(u0, l);
        st.coefficients[std::size_t(l)] = M;
        const double damp = std::exp(-double(l) * tau / double(2 * k + 1));
        const double c = ((l % 2 == 0) ? 1.0 : -1.0) / spectral::sqrt_factorial(l);
        // Hermite interpolation of D^l F via rows l and l+1
        const auto& Fl = kern.deriv_table[std::size_t(l)];
        const auto& Fl1 = kern.deriv_table[std::size_t(l) + 1];
        const double h = kern.spacing();
        double psi_max = 0.0;
        for (std::size_t i = 0; i < y_grid.size(); ++i) {
            const double y = y_grid[i];
            if (y < kern.grid.front() || y > kern.grid.back())
                throw kernel_domain_error("evolve_expansion: y outside kernel window");
            auto j = std::min(std::size_t((y - kern.grid.front()) / h),
                              kern.grid.size() - 2);
            const double u = (y - kern.grid[j]) / h;
            const double u2 = u * u, u3 = u2 * u;
            const double v = (2 * u3 - 3 * u2 + 1) * Fl[j] + (u3 - 2 * u2 + u) * h * Fl1[j] +
                             (-2 * u3 + 3 * u2) * Fl[j + 1] + (u3 - u2) * h * Fl1[j + 1];
            const double psi = c * v;
            st.w[i] += damp * M * psi;
            psi_max = std::max(psi_max, std::abs(psi));
        }
        const double envelope = std::pow(gk, double(l) / double(2 * k + 1));
        if (envelope > 0.0)
            majorant_scale = std::max(majorant_scale, std::abs(M) * psi_max / envelope);
    }
    const double q = std::pow(gk, 1.0 / double(2 * k + 1)) *
                     std::exp(-tau / double(2 * k + 1));
    st.truncation_estimate = majorant_scale * std::pow(q, double(L + 1)) / (1.0 - q);
    return st;
}

struct DecayClassification {
    int leading_index = 0;      // l*: first index with a non-vanishing moment
    double coefficient = 0.0;   // M_{l*}(u0)
    rational rate;              // -(1+l*)/(2k+1): sup-norm decay exponent of u
};

// Smallest l with |M_l(u0)| above a relative threshold; the threshold scale
// is the L1 norm of the data.
inline DecayClassification classify_decay(const DataFunction& u0, int L, int k,
                                          double threshold_rel = 1e-8) {
    asymptotics::require_order(k);
    const double scale = quadrature::integrate(
        [&](double z) { return std::abs(u0.f(z)); }, u0.support_left, u0.support_right,
        1e-12, 1e-10);
    if (scale <= 0.0)
        throw all_moments_vanish_error("classify_decay: data vanishes on its support");
    for (int l = 0; l <= L; ++l) {
        const double M = spectral::moments(u0, l);
        if (std::abs(M) > threshold_rel * scale) {
            DecayClassification c;
            c.leading_index = l;
            c.coefficient = M;
            c.rate = rational(-(1 + l), 2 * k + 1);
            return c;
        }
    }
    throw all_moments_vanish_error(
        "classify_decay: all moments below threshold; the solution is zero within "
        "numerical resolution");
}

// Blow-up frame evaluation: w(y,tau) with y = x/(1-t)^{1/(2k+1)},
// tau = -ln(1-t), blow-up time 1.  At tau = 0 the frame is the identity.
inline std::vector<double> blowup_frame(const KernelProfile& kern, const DataFunction& u0,
                                        double tau, const std::vector<double>& y_grid,
                                        long* extrapolations = nullptr) {
    if (tau < 0.0) throw invalid_argument_error("blowup_frame: tau must be >= 0");
    std::vector<double> out(y_grid.size());
    if (tau < 1e-12) {
        for (std::size_t i = 0; i < y_grid.size(); ++i) out[i] = u0.f(y_grid[i]);
        return out;
    }
    const int q = 2 * kern.k + 1;
    const double shrink = std::exp(-tau / double(q));
    const double spread = std::pow(1.0 - std::exp(-tau), -1.0 / double(q));
    KernelInterpolant F(kern);
    parallel_for(y_grid.size(), [&](std::size_t i) {
        const double y = y_grid[i];
        out[i] = spread * quadrature::integrate(
                              [&](double z) { return F((y * shrink - z) * spread) * u0.f(z); },
                              u0.support_left, u0.support_right, 1e-12, 1e-10);
    });
    if (extrapolations) *extrapolations = F.extrapolation_count();
    return out;
}

}  // namespace dispersionlab::evolution
