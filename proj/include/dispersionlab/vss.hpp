#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "dispersionlab/collocation.hpp"
#include "dispersionlab/errors.hpp"
#include "dispersionlab/kernel.hpp"
#include "dispersionlab/spectral.hpp"

namespace dispersionlab::vss {

using kernel::KernelProfile;
using kernel::ShootingConfig;

// p_l = 1 + (2k+1)/(l+1); p_0 = 2k+2 is the Fujita-type threshold.
inline std::vector<rational> critical_exponents(int k, int L) {
    asymptotics::require_order(k);
    if (L < 0) throw invalid_argument_error("critical_exponents: L must be >= 0");
    std::vector<rational> out;
    out.reserve(std::size_t(L) + 1);
    for (int l = 0; l <= L; ++l) out.push_back(1 + rational(2 * k + 1, l + 1));
    return out;
}

enum class stability_verdict { stable, unstable, critical };

struct StabilityReport {
    double p = 0.0;
    int k = 1;
    double d1 = 0.0;                    // 1/(p-1) - 1/(2k+1)
    std::vector<double> spectrum_head;  // d1 - l/(2k+1), l = 0..L
    stability_verdict verdict = stability_verdict::stable;
    std::optional<int> zero_index;      // index with an exactly zero eigenvalue
};

// Exact-rational spectrum of the shifted operator; at p = p_l exactly one
// eigenvalue vanishes (index l).
inline StabilityReport linearized_spectrum(const rational& p, int k, int L) {
    asymptotics::require_order(k);
    if (p <= 1) throw invalid_argument_error("linearized_spectrum requires p > 1");
    StabilityReport r;
    r.p = p.convert_to<double>();
    r.k = k;
    const rational d1 = rational(1) / (p - 1) - rational(1, 2 * k + 1);
    r.d1 = d1.convert_to<double>();
    for (int l = 0; l <= L; ++l) {
        rational lam = d1 - rational(l, 2 * k + 1);
        if (lam == 0) r.zero_index = l;
        r.spectrum_head.push_back(lam.convert_to<double>());
    }
    const rational p0 = 2 * k + 2;
    r.verdict = (p > p0)   ? stability_verdict::stable
                : (p < p0) ? stability_verdict::unstable
                           : stability_verdict::critical;
    return r;
}

inline StabilityReport linearized_spectrum(double p, int k, int L) {
    return linearized_spectrum(rational(p), k, L);
}

// Reflectional tail-symmetry score: mean relative deviation between the
// magnitudes of consecutive tail extrema.  0 means a perfectly symmetric
// envelope; a one-signed tail scores 1 (defined worst case).
struct TailSymmetry {
    double metric = 1.0;
    double onset = 0.0;  // abscissa from which the tail stays symmetric
};

inline TailSymmetry tail_symmetry_samples(const std::vector<double>& y,
                                          const std::vector<double>& f,
                                          double tail_start, double edge_margin = 1.0) {
    if (y.size() != f.size() || y.size() < 8)
        throw invalid_argument_error("tail_symmetry: bad sample arrays");
    bool has_crossing = false;
    for (std::size_t i = 0; i + 1 < y.size(); ++i)
        if (y[i] >= tail_start && f[i] * f[i + 1] < 0.0) has_crossing = true;
    if (!has_crossing) return {1.0, y.back()};  // one-signed tail: worst score
    std::vector<std::pair<double, double>> extrema;  // (abscissa, |f|)
    for (std::size_t i = 1; i + 1 < y.size(); ++i) {
        if (y[i] < tail_start || y[i] > y.back() - edge_margin) continue;
        if ((f[i] - f[i - 1]) * (f[i + 1] - f[i]) < 0.0)
            extrema.emplace_back(y[i], std::abs(f[i]));
    }
    if (extrema.size() < 3)
        throw tail_too_short_error("tail_symmetry: fewer than three tail extrema");
    std::vector<double> dev(extrema.size() - 1);
    for (std::size_t i = 0; i + 1 < extrema.size(); ++i) {
        double a = extrema[i].second, b = extrema[i + 1].second;
        dev[i] = std::abs(b - a) / (0.5 * (a + b) + 1e-300);
    }
    TailSymmetry ts;
    ts.metric = 0.0;
    for (double d : dev) ts.metric += d;
    ts.metric /= double(dev.size());
    // onset: earliest extremum after which deviations stay controlled
    const double gate = std::max(0.1, 1.5 * ts.metric);
    std::size_t onset_idx = dev.size();
    for (std::size_t i = dev.size(); i-- > 0;) {
        if (dev[i] <= gate)
            onset_idx = i;
        else
            break;
    }
    ts.onset = onset_idx < extrema.size() ? extrema[onset_idx].first : y.back();
    return ts;
}

// Solution of the semilinear profile ODE with shooting diagnostics.
struct VSSProfile {
    int k = 1;
    double p = 2.0;
    std::vector<double> grid;
    std::vector<std::vector<double>> states;  // [order 0..2k][node]
    double sup_norm = 0.0;
    double tail_metric = 1.0;
    double tail_onset = 0.0;
    double right_endpoint = 0.0;
    double residual_norm = 0.0;
    bool spurious_oscillation = false;

    const std::vector<double>& f() const { return states.at(0); }
};

namespace detail {

inline collocation::Problem vss_problem(int k, double p) {
    const int n = 2 * k + 1;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    collocation::Problem prob;
    prob.dim = n;
    prob.rhs = [k, p, sgn, n](double y, const Eigen::VectorXd& u, Eigen::VectorXd& du) {
        for (int i = 0; i + 1 < n; ++i) du(i) = u(i + 1);
        const double f = u(0);
        du(n - 1) = sgn * (y * u(1) / double(2 * k + 1) + f / (p - 1.0) -
                           std::pow(std::abs(f), p - 1.0) * f);
    };
    prob.jacobian = [k, p, sgn, n](double y, const Eigen::VectorXd& u, Eigen::MatrixXd& J) {
        J.setZero();
        for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = 1.0;
        const double f = u(0);
        J(n - 1, 0) = sgn * (1.0 / (p - 1.0) - p * std::pow(std::abs(f), p - 1.0));
        J(n - 1, 1) = sgn * y / double(2 * k + 1);
    };
    // left: f, f', ..., f^{(k)} = 0;  right: f, ..., f^{(k-1)} = 0
    prob.left_bc = Eigen::MatrixXd::Zero(k + 1, n);
    for (int r = 0; r <= k; ++r) prob.left_bc(r, r) = 1.0;
    prob.left_rhs = Eigen::VectorXd::Zero(k + 1);
    prob.right_bc = Eigen::MatrixXd::Zero(k, n);
    for (int r = 0; r < k; ++r) prob.right_bc(r, r) = 1.0;
    prob.right_rhs = Eigen::VectorXd::Zero(k);
    return prob;
}

inline std::vector<Eigen::VectorXd> kernel_seed_guess(int k, double p,
                                                      const KernelProfile& kern,
                                                      const std::vector<double>& grid) {
    const int n = 2 * k + 1;
    // amplitude balancing the zero-order terms: |f|^{p-1} ~ 1/(p-1)
    double A = std::pow(p - 1.0, -1.0 / (p - 1.0));
    const double p0 = double(2 * k + 2);
    if (p < p0 && p > p0 - 0.45) {
        // near the threshold the branch follows the pitchfork amplitude law
        const double eps = p0 - p;
        const double mass = kern.regularized_mass;
        const auto& F = kern.values();
        std::vector<double> g(F.size());
        double fmax_unit = 0.0;
        for (std::size_t i = 0; i < F.size(); ++i) {
            const double v = F[i] / mass;
            g[i] = std::pow(std::abs(v), p - 1.0) * v;
            fmax_unit = std::max(fmax_unit, std::abs(v));
        }
        const double kappa =
            quadrature::regularized_integral(kern.grid, g,
                                             std::max(6.0, 0.3 * kern.grid.back()))
                .value;
        if (kappa > 0.0) {
            const double a0 = 1.0 / double((2 * k + 1) * (2 * k + 1));
            A = std::pow(a0 * eps / kappa, 1.0 / (p - 1.0)) * fmax_unit;
        }
    }
    double fmax = 0.0;
    for (double v : kern.values()) fmax = std::max(fmax, std::abs(v));
    const double s = A / fmax;
    std::vector<Eigen::VectorXd> guess(grid.size(), Eigen::VectorXd::Zero(n));
    const double h = kern.spacing();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double y = grid[i];
        if (y <= kern.grid.front() || y >= kern.grid.back()) continue;
        auto j = std::min(std::size_t((y - kern.grid.front()) / h), kern.grid.size() - 2);
        for (int m = 0; m < n && std::size_t(m) < kern.deriv_table.size(); ++m) {
            const auto& row = kern.deriv_table[std::size_t(m)];
            double t = (y - kern.grid[j]) / h;
            guess[i](m) = s * ((1.0 - t) * row[j] + t * row[j + 1]);
        }
    }
    return guess;
}

inline VSSProfile pack_profile(int k, double p, const collocation::Result& res) {
    VSSProfile prof;
    prof.k = k;
    prof.p = p;
    prof.grid = res.y;
    const int n = 2 * k + 1;
    prof.states.assign(std::size_t(n), std::vector<double>(res.y.size()));
    for (std::size_t i = 0; i < res.y.size(); ++i)
        for (int m = 0; m < n; ++m) prof.states[std::size_t(m)][i] = res.u[i](m);
    for (double v : prof.f()) prof.sup_norm = std::max(prof.sup_norm, std::abs(v));
    prof.right_endpoint = res.y.back();
    prof.residual_norm = res.residual_norm;
    return prof;
}

inline void attach_tail_metrics(VSSProfile& prof, double threshold) {
    // tail starts at the first zero crossing past the global |f| maximum
    const auto& f = prof.f();
    std::size_t imax = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > std::abs(f[imax])) imax = i;
    double tail_start = prof.grid.back();
    for (std::size_t i = imax; i + 1 < f.size(); ++i)
        if (f[i] * f[i + 1] < 0.0) {
            tail_start = prof.grid[i];
            break;
        }
    try {
        auto ts = tail_symmetry_samples(prof.grid, f, tail_start);
        prof.tail_metric = ts.metric;
        prof.tail_onset = ts.onset;
    } catch (const tail_too_short_error&) {
        prof.tail_metric = 1.0;
        prof.tail_onset = prof.grid.back();
    }
    prof.spurious_oscillation = prof.tail_metric > threshold;
}

}  // namespace detail

inline TailSymmetry tail_symmetry(const VSSProfile& prof) {
    const auto& f = prof.f();
    std::size_t imax = 0;
    for (std::size_t i = 0; i < f.size(); ++i)
        if (std::abs(f[i]) > std::abs(f[imax])) imax = i;
    double tail_start = prof.grid.back();
    for (std::size_t i = imax; i + 1 < f.size(); ++i)
        if (f[i] * f[i + 1] < 0.0) {
            tail_start = prof.grid[i];
            break;
        }
    return tail_symmetry_samples(prof.grid, f, tail_start);
}

struct VSSOptions {
    double grid_spacing = 0.01;
    double tail_threshold = 0.1;    // spurious-oscillation gate
    bool tune_right_endpoint = true;
    int max_endpoint_candidates = 4;
};

// Solve the order-(2k+1) profile BVP by collocation with damped Newton.
// The first solve is seeded with a scaled kernel profile; warm gives a
// continuation start instead.  When tuning is enabled the right endpoint is
// shifted across candidate tail zero crossings and the profile with the
// smallest tail-symmetry metric is kept.
inline VSSProfile solve_vss(int k, double p, const ShootingConfig& cfg,
                            const KernelProfile& kern, const VSSOptions& opt = {},
                            const VSSProfile* warm = nullptr) {
    asymptotics::require_order(k);
    if (p <= 1.0) throw invalid_argument_error("solve_vss requires p > 1");
    const int n = 2 * k + 1;
    const double h = opt.grid_spacing;

    auto run = [&](double yl, double yr, const VSSProfile* seed) {
        auto nodes = std::size_t(std::llround((yr - yl) / h)) + 1;
        std::vector<double> grid(nodes);
        for (std::size_t i = 0; i < nodes; ++i) grid[i] = yl + double(i) * h;
        std::vector<Eigen::VectorXd> guess;
        if (seed) {
            guess.assign(nodes, Eigen::VectorXd::Zero(n));
            const double hs = seed->grid[1] - seed->grid[0];
            for (std::size_t i = 0; i < nodes; ++i) {
                double y = grid[i];
                if (y <= seed->grid.front() || y >= seed->grid.back()) continue;
                auto j = std::min(std::size_t((y - seed->grid.front()) / hs),
                                  seed->grid.size() - 2);
                double t = (y - seed->grid[j]) / hs;
                for (int m = 0; m < n; ++m)
                    guess[i](m) = (1.0 - t) * seed->states[std::size_t(m)][j] +
                                  t * seed->states[std::size_t(m)][j + 1];
            }
        } else {
            guess = detail::kernel_seed_guess(k, p, kern, grid);
        }
        collocation::Options copts;
        copts.max_iterations = std::max(20, cfg.max_match_iterations * 10);
        copts.tolerance = 1e-11;
        auto res = collocation::solve(detail::vss_problem(k, p), yl, yr, nodes, guess,
                                      copts);
        VSSProfile prof = detail::pack_profile(k, p, res);
        detail::attach_tail_metrics(prof, opt.tail_threshold);
        return prof;
    };

    // A cold start only converges when the endpoint clamp f(y_R) = 0 is
    // phase-compatible with the tail oscillation, so scan a ladder of right
    // endpoints and keep the converged profile with the cleanest tail.
    VSSProfile best;
    bool have = false;
    if (warm) {
        // continuation: keep the seed's grid so the tail phase stays pinned
        best = run(warm->grid.front(), warm->grid.back(), warm);
        have = true;
    } else {
        // Below the threshold prefer non-trivial profiles and fall back to
        // the zero solution only when the scan finds nothing else.  At or
        // above p_0 = 2k+2 no branch exists and the trivial profile is the
        // answer; any non-trivial windowed solution there is a truncation
        // artifact.
        const bool supercritical = p >= double(2 * k + 2);
        VSSProfile trivial;
        bool have_trivial = false;
        for (double yr = cfg.right_endpoint;
             yr > cfg.right_endpoint - 4.0 - 1e-9 && yr > 2.0; yr -= 0.25) {
            try {
                VSSProfile cand = run(cfg.left_endpoint, yr, nullptr);
                if (cand.sup_norm < 1e-6) {
                    if (!have_trivial) {
                        trivial = std::move(cand);
                        have_trivial = true;
                    }
                    if (supercritical) break;
                    continue;
                }
                if (!have || cand.tail_metric < best.tail_metric) {
                    best = std::move(cand);
                    have = true;
                }
                if (best.tail_metric < 0.5 * opt.tail_threshold && !opt.tune_right_endpoint)
                    break;
            } catch (const non_convergence_error&) {
                // wrong-phase endpoint; try the next rung
            }
        }
        if (have_trivial && (supercritical || !have)) {
            best = std::move(trivial);
            have = true;
        }
        if (!have)
            throw non_convergence_error(
                "solve_vss: no right endpoint in the scan window admitted a solution");
    }
    if (opt.tune_right_endpoint && best.sup_norm > 1e-8) {
        // refine: snap the endpoint to tail zero crossings of the best solve
        std::vector<double> cands;
        const auto& f = best.f();
        for (std::size_t i = 0; i + 1 < f.size(); ++i) {
            double y = best.grid[i];
            if (y > 0.55 * best.grid.back() && f[i] * f[i + 1] < 0.0)
                cands.push_back(y);
        }
        if (cands.size() > std::size_t(opt.max_endpoint_candidates))
            cands.erase(cands.begin(),
                        cands.end() - opt.max_endpoint_candidates);
        for (double yr : cands) {
            if (std::abs(yr - best.grid.back()) < h) continue;
            try {
                VSSProfile cand = run(cfg.left_endpoint, yr, &best);
                if (cand.tail_metric < best.tail_metric) best = std::move(cand);
            } catch (const non_convergence_error&) {
                // keep the current best
            }
        }
        // polish: slide the clamp onto the nearby true tail zero
        for (int round = 0; round < 2; ++round) {
            bool improved = false;
            for (double d : {-0.3, -0.2, -0.1, -0.05, 0.05, 0.1, 0.2, 0.3}) {
                try {
                    VSSProfile cand = run(cfg.left_endpoint, best.grid.back() + d, &best);
                    if (cand.tail_metric < best.tail_metric) {
                        best = std::move(cand);
                        improved = true;
                    }
                } catch (const non_convergence_error&) {
                }
            }
            if (!improved) break;
        }
    }
    return best;
}

// gamma_l = <|psi_l|^{(2k+1)/(l+1)} psi_l, psi*_l>.  For l = 0 the adjoint
// factor is 1 and the regularized integral of |F|^{2k+1} F is taken over the
// kernel grid (the kernel must be unit-integral normalized); l >= 1 pairs
// against the metric-adjusted polynomial through the filtered dual integral.
inline double gamma_l(int l, int k, const KernelProfile& kern,
                      const spectral::TruncationPolicy& policy) {
    if (l < 0) throw invalid_argument_error("gamma_l: index must be >= 0");
    (void)policy;
    const double q = double(2 * k + 1) / double(l + 1);
    if (l == 0) {
        const auto& F = kern.values();
        std::vector<double> g(F.size());
        for (std::size_t i = 0; i < F.size(); ++i)
            g[i] = std::pow(std::abs(F[i]), q) * F[i];
        return quadrature::regularized_integral(kern.grid, g,
                                                std::max(6.0, 0.3 * kern.grid.back()))
            .value;
    }
    auto pair = spectral::eigenfunction(l, kern);
    auto adj = spectral::adjoint_polynomial(l, k, spectral::sign_convention::metric_adjusted);
    return spectral::detail::filtered_dual_integral(kern, [&](std::size_t i, double y) {
        double v = pair.psi_samples[i];
        return std::pow(std::abs(v), q) * v * adj.evaluate(-y);
    });
}

// kappa_l at the current p: <|psi_l|^{p-1} psi_l, psi*_l>.
inline double kappa_l(int l, int k, const KernelProfile& kern, double p) {
    if (l == 0) {
        const auto& F = kern.values();
        std::vector<double> g(F.size());
        for (std::size_t i = 0; i < F.size(); ++i)
            g[i] = std::pow(std::abs(F[i]), p - 1.0) * F[i];
        return quadrature::regularized_integral(kern.grid, g,
                                                std::max(6.0, 0.3 * kern.grid.back()))
            .value;
    }
    auto pair = spectral::eigenfunction(l, kern);
    auto adj = spectral::adjoint_polynomial(l, k, spectral::sign_convention::metric_adjusted);
    return spectral::detail::filtered_dual_integral(kern, [&](std::size_t i, double y) {
        double v = pair.psi_samples[i];
        return std::pow(std::abs(v), p - 1.0) * v * adj.evaluate(-y);
    });
}

// |C| = (a0 eps / kappa_l)^{1/(p-1)} with a0 = ((l+1)/(2k+1))^2, p = p_l - eps:
// the amplitude of the branch emanating from the l-th eigenfunction.
inline double bifurcation_amplitude(int l, int k, double epsilon, double kappa) {
    if (l < 0) throw invalid_argument_error("bifurcation_amplitude: index must be >= 0");
    asymptotics::require_order(k);
    if (!(epsilon > 0.0))
        throw invalid_argument_error("bifurcation_amplitude: epsilon must be > 0");
    if (!(kappa > 0.0))
        throw invalid_argument_error("bifurcation_amplitude: kappa must be > 0");
    const double a0 = std::pow(double(l + 1) / double(2 * k + 1), 2.0);
    const double pl = 1.0 + double(2 * k + 1) / double(l + 1);
    const double p = pl - epsilon;
    return std::pow(a0 * epsilon / kappa, 1.0 / (p - 1.0));
}

// Predicted centre-subspace coefficient decay and the composed physical
// scale factor, sampled on a tau grid.
struct CentreDecay {
    std::vector<double> tau;
    std::vector<double> coefficient;   // c_l(tau)
    std::vector<double> physical_scale;  // (1+t)^{-(1+l)/(2k+1)} [ ... ln(1+t) ]^{-(l+1)/(2k+1)}
};

inline CentreDecay centre_decay(int l, int k, double gamma,
                                const std::vector<double>& tau_grid) {
    if (!(gamma > 0.0)) throw invalid_argument_error("centre_decay: gamma must be > 0");
    if (l < 0) throw invalid_argument_error("centre_decay: index must be >= 0");
    asymptotics::require_order(k);
    CentreDecay cd;
    cd.tau = tau_grid;
    const double expo = double(l + 1) / double(2 * k + 1);
    for (double tau : tau_grid) {
        if (!(tau > 0.0)) throw invalid_argument_error("centre_decay: tau must be > 0");
        const double core = double(2 * k + 1) / double(l + 1) * gamma * tau;
        cd.coefficient.push_back(std::pow(core, -expo));
        const double t = std::exp(tau) - 1.0;
        const double logc = double(2 * k + 1) / double(l + 1) * gamma * std::log(1.0 + t);
        cd.physical_scale.push_back(std::pow(1.0 + t, -expo) * std::pow(logc, -expo));
    }
    return cd;
}

// Natural-parameter continuation of a VSS branch in p, warm-starting every
// solve from the previous profile.  The step halves on failure (down to
// 1e-5) and a partial branch is returned when it cannot proceed.
struct Branch {
    int l = 0;
    int k = 1;
    std::vector<std::pair<double, double>> points;  // (p, sup_norm)
    std::vector<double> step_diffs;                 // max-norm diff of consecutive profiles
    bool complete = true;
    VSSProfile last_profile;
};

inline Branch trace_branch(int l, int k, double p_from, double p_to, double step,
                           const ShootingConfig& cfg, const KernelProfile& kern,
                           const VSSOptions& opt_in = {},
                           const VSSProfile* seed = nullptr) {
    if (l != 0)
        throw invalid_argument_error(
            "trace_branch: only the principal branch (l = 0) is traced numerically");
    if (step <= 0.0) throw invalid_argument_error("trace_branch: step must be > 0");
    Branch br;
    br.l = l;
    br.k = k;
    const double pl = double(2 * k + 2);
    if (p_from == p_to) return br;
    const double dir = (p_to > p_from) ? 1.0 : -1.0;
    VSSOptions opt = opt_in;
    opt.tune_right_endpoint = false;  // fixed grid keeps warm starts aligned

    double p = p_from;
    double cur_step = step;
    VSSProfile prof;
    try {
        prof = solve_vss(k, std::min(p, pl - 1e-9), cfg, kern, opt, seed);
    } catch (const non_convergence_error&) {
        br.complete = false;
        return br;
    }
    br.points.emplace_back(p, prof.sup_norm);
    long attempts = 0;
    const long max_attempts =
        4 * long(std::abs(p_to - p_from) / step + 1.0) + 200;
    while ((dir > 0 && p < p_to - 1e-12) || (dir < 0 && p > p_to + 1e-12)) {
        if (++attempts > max_attempts) {
            br.complete = false;
            break;
        }
        double next = p + dir * cur_step;
        if ((dir > 0 && next > p_to) || (dir < 0 && next < p_to)) next = p_to;
        if (next >= pl) next = pl - 1e-9;
        try {
            VSSProfile trial =
                solve_vss(k, next, cfg, kern, opt, &prof);
            if (trial.sup_norm < 0.5 * prof.sup_norm && prof.sup_norm > 1e-2)
                throw non_convergence_error("branch collapsed toward the zero solution");
            double diff = 0.0;
            const std::size_t nn = std::min(trial.f().size(), prof.f().size());
            for (std::size_t i = 0; i < nn; ++i)
                diff = std::max(diff, std::abs(trial.f()[i] - prof.f()[i]));
            br.step_diffs.push_back(diff);
            const bool died = trial.sup_norm < 5e-3 && prof.sup_norm < 2e-2;
            prof = std::move(trial);
            p = next;
            br.points.emplace_back(p, prof.sup_norm);
            if (died) break;  // amplitude floor reached: the branch terminated
            if (cur_step < step) cur_step = std::min(step, cur_step * 2.0);
        } catch (const non_convergence_error&) {
            cur_step *= 0.5;
            if (cur_step < 1e-5) {
                br.complete = false;
                break;
            }
        }
    }
    br.last_profile = std::move(prof);
    return br;
}

}  // namespace dispersionlab::vss
