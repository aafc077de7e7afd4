#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <vector>

#include "dispersionlab/asymptotics.hpp"
#include "dispersionlab/errors.hpp"
#include "dispersionlab/ode.hpp"
#include "dispersionlab/quadrature.hpp"

namespace dispersionlab::kernel {

using asymptotics::AsymptoticParams;
using asymptotics::side;

enum class normalization { unit_integral, unit_max };

// Sampled rescaled fundamental kernel on a uniform grid, with a derivative
// table.  Rows 0..2k-1 of deriv_table come from the solver state; higher
// rows are generated exactly from the ODE recurrence (see derivative_table).
struct KernelProfile {
    int k = 1;
    AsymptoticParams params;
    std::vector<double> grid;
    std::vector<std::vector<double>> deriv_table;  // [order][node]
    normalization norm_mode = normalization::unit_integral;
    double match_point = 0.0;      // abscissa of the global |F| maximum
    double regularized_mass = 0.0; // regularized integral of the current values

    const std::vector<double>& values() const { return deriv_table.at(0); }
    double spacing() const { return grid.size() > 1 ? grid[1] - grid[0] : 0.0; }
    std::size_t index_of(double y) const {
        double h = spacing();
        auto i = std::llround((y - grid.front()) / h);
        if (i < 0 || std::size_t(i) >= grid.size())
            throw kernel_domain_error("abscissa outside the tabulated kernel window");
        return std::size_t(i);
    }
};

struct ShootingConfig {
    double left_endpoint = -12.0;
    double right_endpoint = 30.0;
    double grid_spacing = 0.005;
    double match_tolerance = 1e-7;       // relative size of the matching defect
    double integrator_tolerance = 1e-8;  // accuracy budget of the marching scheme
    double bundle_amplitude = 1.0;       // seed amplitude on the decaying left bundle
    int max_match_iterations = 4;        // anchor retries for the matching solve

    static ShootingConfig defaults(int k) {
        asymptotics::require_order(k);
        ShootingConfig c;
        if (k > 1) {
            c.left_endpoint = -14.0 - 4.0 * (k - 1);
            c.right_endpoint = 30.0 + 3.0 * k;
        }
        return c;
    }
};

namespace detail {

// State vector (F, F', ..., F^{(2k-1)}) of the WKB mode exp(b |y|^alpha)
// |y|^{-nu}, up to the overall exponential factor (dropped, modes are
// normalized anyway).
inline Eigen::VectorXcd wkb_mode_state(std::complex<double> b, double y, int k,
                                       double alpha, double nu) {
    const int n = 2 * k;
    const double ay = std::abs(y), sg = y > 0 ? 1.0 : -1.0;
    std::vector<std::complex<double>> sder(n + 1);
    sder[0] = 0.0;  // constant part dropped
    double fact = 1.0;
    for (int i = 1; i <= n; ++i) {
        double c = alpha;
        for (int j = 1; j < i; ++j) c *= (alpha - j);
        std::complex<double> term = b * c * std::pow(ay, alpha - i) * std::pow(sg, i);
        fact *= (i > 1) ? (i - 1) : 1;
        term += -nu * ((i % 2 == 1) ? 1.0 : -1.0) * fact / std::pow(y, i);
        sder[i] = term;
    }
    // Taylor coefficients of s, then of exp(s) via the series exponential
    std::vector<std::complex<double>> a(n + 1), e(n + 1);
    double ifact = 1.0;
    for (int i = 0; i <= n; ++i) {
        if (i > 0) ifact *= i;
        a[i] = sder[i] / ifact;
    }
    e[0] = 1.0;
    for (int i = 1; i <= n; ++i) {
        std::complex<double> tot = 0.0;
        for (int j = 1; j <= i; ++j) tot += double(j) * a[j] * e[i - j];
        e[i] = tot / double(i);
    }
    Eigen::VectorXcd st(n);
    ifact = 1.0;
    for (int i = 0; i < n; ++i) {
        if (i > 0) ifact *= i;
        st(i) = e[i] * ifact;
    }
    return st;
}

struct ModeBasis {
    Eigen::MatrixXd columns;     // 2k x 2k, unit-norm realified mode states
    std::vector<bool> growing;   // per column
};

inline ModeBasis mode_basis(int k, double y, side s) {
    const auto params = asymptotics::dispersion_constants(k);
    const auto roots = asymptotics::bundle_roots(k, s);
    const int n = 2 * k;
    ModeBasis mb;
    mb.columns.resize(n, n);
    int col = 0;
    for (const auto& r : roots) {
        if (r.value.imag() < -1e-12 * params.d_k) continue;  // conjugate handled by pair
        Eigen::VectorXcd st = wkb_mode_state(r.value, y, k, params.alpha,
                                             params.envelope_exp);
        bool grows = r.classification == asymptotics::root_class::growing;
        if (r.value.imag() > 1e-12 * params.d_k) {
            Eigen::VectorXd re = st.real(), im = st.imag();
            mb.columns.col(col) = re / re.norm();
            mb.growing.push_back(grows);
            ++col;
            mb.columns.col(col) = im / im.norm();
            mb.growing.push_back(grows);
            ++col;
        } else {
            Eigen::VectorXd re = st.real();
            mb.columns.col(col) = re / re.norm();
            mb.growing.push_back(grows);
            ++col;
        }
    }
    if (col != n)
        throw degenerate_solution_error("bundle basis did not close to full rank");
    return mb;
}

// Rows extracting the coefficients of the growing modes at an endpoint.
inline Eigen::MatrixXd growing_extraction_rows(int k, double y, side s) {
    ModeBasis mb = mode_basis(k, y, s);
    Eigen::MatrixXd inv = mb.columns.inverse();
    int count = 0;
    for (bool g : mb.growing) count += g ? 1 : 0;
    Eigen::MatrixXd rows(count, 2 * k);
    int r = 0;
    for (int i = 0; i < 2 * k; ++i)
        if (mb.growing[std::size_t(i)]) {
            Eigen::RowVectorXd row = inv.row(i);
            rows.row(r++) = row / row.norm();
        }
    return rows;
}

// k = 1: integrate F'' = -yF/3 rightward from the decaying left bundle.
inline std::vector<std::vector<double>> march_k1(const ShootingConfig& cfg,
                                                 const AsymptoticParams& p,
                                                 std::size_t nodes) {
    const double yl = cfg.left_endpoint;
    double s = -p.d_k * std::pow(-yl, p.alpha) - p.envelope_exp * std::log(-yl);
    double sp = p.d_k * p.alpha * std::pow(-yl, p.alpha - 1.0) - p.envelope_exp / yl;
    double F0 = cfg.bundle_amplitude * std::exp(s);
    ode::state u0{F0, F0 * sp};
    auto states = ode::rk4_march(
        [](double y, const ode::state& u, ode::state& du) {
            du[0] = u[1];
            du[1] = -y * u[0] / 3.0;
        },
        yl, cfg.right_endpoint, nodes, u0, 2);
    std::vector<std::vector<double>> table(2, std::vector<double>(nodes));
    for (std::size_t i = 0; i < nodes; ++i) {
        table[0][i] = states[i][0];
        table[1][i] = states[i][1];
    }
    return table;
}

// k >= 2: global Hermite-Simpson collocation of the linear order-2k ODE
// F^{(2k)} = (-1)^k y F/(2k+1), with bundle-coefficient boundary rows (kill
// the k growing modes at -inf and the k-1 growing modes at +inf) plus one
// interior anchor row fixing the scale.  This is the two-sided construction:
// left- and right-admissible solutions matched across the whole interior
// with zero jump in every derivative order.
inline std::vector<std::vector<double>> march_general(int k, const ShootingConfig& cfg,
                                                      std::size_t nodes,
                                                      double anchor_y,
                                                      double* defect) {
    const int n = 2 * k;
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    const double h =
        (cfg.right_endpoint - cfg.left_endpoint) / double(nodes - 1);
    auto A = [&](double y, Eigen::MatrixXd& M) {
        M.setZero();
        for (int i = 0; i + 1 < n; ++i) M(i, i + 1) = 1.0;
        M(n - 1, 0) = sgn * y / double(2 * k + 1);
    };
    const std::size_t N = nodes - 1;
    const Eigen::Index total = Eigen::Index(n) * Eigen::Index(nodes);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(std::size_t(total) * std::size_t(2 * n));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(total);
    Eigen::MatrixXd Ai(n, n), Aip(n, n), Am(n, n), Ci(n, n), Cip(n, n);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
    Eigen::Index eqn = 0;
    for (std::size_t i = 0; i < N; ++i) {
        double yi = cfg.left_endpoint + double(i) * h;
        A(yi, Ai);
        A(yi + h, Aip);
        A(yi + 0.5 * h, Am);
        Ci = -I - (h / 6.0) * (Ai + 4.0 * Am * (0.5 * I + (h / 8.0) * Ai));
        Cip = I - (h / 6.0) * (Aip + 4.0 * Am * (0.5 * I - (h / 8.0) * Aip));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) {
                trip.emplace_back(eqn + a, Eigen::Index(n * i) + b, Ci(a, b));
                trip.emplace_back(eqn + a, Eigen::Index(n * (i + 1)) + b, Cip(a, b));
            }
        eqn += n;
    }
    Eigen::MatrixXd bl =
        growing_extraction_rows(k, cfg.left_endpoint, side::minus_infinity);
    Eigen::MatrixXd br =
        growing_extraction_rows(k, cfg.right_endpoint, side::plus_infinity);
    for (Eigen::Index r = 0; r < bl.rows(); ++r, ++eqn)
        for (int b = 0; b < n; ++b) trip.emplace_back(eqn, b, bl(r, b));
    for (Eigen::Index r = 0; r < br.rows(); ++r, ++eqn)
        for (int b = 0; b < n; ++b)
            trip.emplace_back(eqn, Eigen::Index(n * N) + b, br(r, b));
    // anchor row: F(anchor) = 1 fixes the scale of the one-dimensional family
    auto ia = std::size_t(std::llround((anchor_y - cfg.left_endpoint) / h));
    ia = std::min(ia, N);
    trip.emplace_back(eqn, Eigen::Index(n * ia), 1.0);
    rhs(eqn) = 1.0;
    ++eqn;
    if (eqn != total)
        throw degenerate_solution_error("kernel matching system is not square");

    Eigen::SparseMatrix<double> M(total, total);
    M.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(M);
    if (lu.info() != Eigen::Success)
        throw non_convergence_error("kernel matching system is singular");
    Eigen::VectorXd sol = lu.solve(rhs);
    if (defect) *defect = (M * sol - rhs).lpNorm<Eigen::Infinity>();

    std::vector<std::vector<double>> table(std::size_t(n),
                                           std::vector<double>(nodes, 0.0));
    for (std::size_t i = 0; i < nodes; ++i)
        for (int j = 0; j < n; ++j)
            table[std::size_t(j)][i] = sol(Eigen::Index(n * i) + j);
    return table;
}

inline double osc_start_for(const ShootingConfig& cfg) {
    return std::max(6.0, 0.3 * cfg.right_endpoint);
}

}  // namespace detail

// Regularized integral of the kernel's current values: trapezoid mass on the
// left plus zero-crossing truncation with repeated partial-sum averaging on
// the conditionally convergent oscillatory side.
inline double regularized_mass(const KernelProfile& p, double osc_start = 0.0) {
    if (osc_start == 0.0) osc_start = std::max(6.0, 0.3 * p.grid.back());
    return quadrature::regularized_integral(p.grid, p.values(), osc_start).value;
}

inline KernelProfile normalize(KernelProfile p, normalization mode) {
    double mass = regularized_mass(p);
    const auto& F = p.values();
    double fmax = 0.0;
    std::size_t imax = 0;
    for (std::size_t i = 0; i < F.size(); ++i)
        if (std::abs(F[i]) > fmax) { fmax = std::abs(F[i]); imax = i; }
    if (fmax == 0.0 || !std::isfinite(mass))
        throw degenerate_solution_error("normalize: profile is identically zero");
    double scale;
    if (mode == normalization::unit_integral) {
        if (std::abs(mass) < 1e-300)
            throw degenerate_solution_error("normalize: regularized mass vanishes");
        scale = 1.0 / mass;
    } else {
        scale = (mass < 0 ? -1.0 : 1.0) / fmax;  // orient so the mass is positive
    }
    for (auto& row : p.deriv_table)
        for (double& v : row) v *= scale;
    p.regularized_mass = mass * scale;
    p.norm_mode = mode;
    p.match_point = p.grid[imax];
    return p;
}

// Numerical construction of the rescaled kernel by shooting.  The k=1 path
// integrates the second-order reduced ODE rightward from the exponentially
// decaying left bundle; k >= 2 uses the two-sided matched construction.
inline KernelProfile solve_kernel(int k, ShootingConfig cfg,
                                  normalization mode = normalization::unit_integral) {
    asymptotics::require_order(k);
    if (!(cfg.left_endpoint < 0.0 && cfg.right_endpoint > 0.0))
        throw invalid_argument_error("shooting endpoints must bracket the origin");
    if (cfg.left_endpoint > -5.0 || cfg.right_endpoint < 5.0)
        throw invalid_argument_error("shooting endpoints too shallow for the tail asymptotics");
    if (cfg.grid_spacing <= 0.0 || cfg.match_tolerance <= 0.0 ||
        cfg.integrator_tolerance <= 0.0)
        throw invalid_argument_error("tolerances and grid spacing must be positive");

    KernelProfile p;
    p.k = k;
    p.params = asymptotics::dispersion_constants(k);
    const auto nodes =
        std::size_t(std::llround((cfg.right_endpoint - cfg.left_endpoint) /
                                 cfg.grid_spacing)) + 1;
    p.grid.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        p.grid[i] = cfg.left_endpoint + double(i) * cfg.grid_spacing;

    if (k == 1) {
        p.deriv_table = detail::march_k1(cfg, p.params, nodes);
    } else {
        double defect = 0.0;
        const double anchors[] = {1.0, 0.0, 2.0, 0.5};
        int tries = std::min<int>(cfg.max_match_iterations, 4);
        for (int t = 0; t < tries; ++t) {
            p.deriv_table = detail::march_general(k, cfg, nodes, anchors[t], &defect);
            double fmax = 0.0;
            for (double v : p.values()) fmax = std::max(fmax, std::abs(v));
            if (fmax > 1e-6 && defect < cfg.match_tolerance) break;
            if (t + 1 == tries)
                throw non_convergence_error(
          "kernel matching defect " + std::to_string(defect) +
          " exceeds match_tolerance");
        }
    }
    return normalize(std::move(p), mode);
}

// Extend the derivative table to max_order using the exact recurrence
//   F^{(2k)}   = (-1)^k y F/(2k+1),
//   F^{(2k+m)} = (-1)^k (y F^{(m)} + m F^{(m-1)})/(2k+1),
// i.e. no numerical differentiation of sampled data is ever performed.
inline KernelProfile derivative_table(KernelProfile p, int max_order) {
    const int k = p.k;
    const int base = 2 * k;
    if (int(p.deriv_table.size()) < base)
        throw invalid_argument_error(
            "derivative_table: profile lacks the integrator-state derivatives");
    if (max_order + 1 <= int(p.deriv_table.size())) return p;  // nothing to do
    const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
    const double c = sgn / double(2 * k + 1);
    const std::size_t nn = p.grid.size();
    p.deriv_table.resize(std::size_t(max_order) + 1);
    for (int order = base; order <= max_order; ++order) {
        auto& row = p.deriv_table[std::size_t(order)];
        if (!row.empty()) continue;
        row.resize(nn);
        const int m = order - base;
        const auto& fm = p.deriv_table[std::size_t(m)];
        if (m == 0) {
            for (std::size_t i = 0; i < nn; ++i) row[i] = c * p.grid[i] * fm[i];
        } else {
            const auto& fm1 = p.deriv_table[std::size_t(m - 1)];
            for (std::size_t i = 0; i < nn; ++i)
                row[i] = c * (p.grid[i] * fm[i] + double(m) * fm1[i]);
        }
    }
    return p;
}

// Fourier-integral evaluator: F(y) = (1/pi) Re int_0^inf e^{i(y xi - xi^{2k+1})} dxi.
// For y <= 0 the contour is rotated onto the steepest-descent ray
// xi = r e^{-i pi/(2(2k+1))}; for y > 0 the head is integrated directly and
// the oscillatory tail is truncated at phase crossings and accelerated.
// Serves as the independent oracle for solve_kernel.
inline double fourier_point(int k, double y, int deriv_order = 0,
                            double tail_tolerance = 1e-9) {
    const int q = 2 * k + 1;
    const std::complex<double> iu(0.0, 1.0);
    auto weight = [&](std::complex<double> xi) -> std::complex<double> {
        std::complex<double> w = 1.0;
        for (int j = 0; j < deriv_order; ++j) w *= iu * xi;
        return w;
    };
    if (y <= 0.0) {
        const double th = -std::numbers::pi / double(2 * q);
        const std::complex<double> eith = std::polar(1.0, th);
        double R = 1.0;
        while (std::abs(y) * R * std::sin(-th) + std::pow(R, q) < 45.0 + 5.0 * deriv_order)
            R *= 1.25;
        auto f = [&](double r) {
            std::complex<double> xi = r * eith;
            std::complex<double> ph = iu * (y * xi - std::pow(xi, q));
            return (weight(xi) * std::exp(ph) * eith).real();
        };
        return quadrature::integrate(f, 0.0, R, 1e-14, 1e-13) / std::numbers::pi;
    }
    auto phi = [&](double x) { return y * x - std::pow(x, q); };
    auto dphi = [&](double x) { return y - q * std::pow(x, q - 1); };
    auto f = [&](double x) {
        // real part of (i x)^m e^{i phi}
        std::complex<double> v = weight(std::complex<double>(x, 0.0)) *
                                 std::exp(iu * phi(x));
        return v.real();
    };
    const double xstar = std::pow(y / q, 1.0 / double(q - 1));
    const double xa = 1.5 * xstar + 0.5;
    double head = quadrature::integrate(f, 0.0, xa, 1e-14, 1e-13);
    // crossings of the phase through odd multiples of pi/2 (phi decreasing)
    double target = std::floor((phi(xa) - std::numbers::pi / 2) / std::numbers::pi) *
                        std::numbers::pi + std::numbers::pi / 2;
    std::vector<double> crossings;
    double x0 = xa;
    const int max_lobes = 64;
    for (int m = 0; m < max_lobes; ++m) {
        double x1 = x0;
        while (phi(x1) > target)
            x1 += 0.5 * std::min(0.5, std::numbers::pi / std::abs(dphi(x1))) + 1e-4;
        double lo = x0, hi = x1;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (phi(mid) > target ? lo : hi) = mid;
        }
        crossings.push_back(0.5 * (lo + hi));
        x0 = crossings.back();
        target -= std::numbers::pi;
    }
    double s = head + quadrature::integrate(f, xa, crossings[0], 1e-15, 1e-13);
    std::vector<double> partials{s};
    for (std::size_t i = 0; i + 1 < crossings.size(); ++i) {
        s += quadrature::integrate(f, crossings[i], crossings[i + 1], 1e-15, 1e-13);
        partials.push_back(s);
    }
    auto acc = quadrature::accelerate_partial_sums(std::move(partials));
    if (acc.error_estimate > tail_tolerance * (1.0 + std::abs(acc.value)))
        throw quadrature_failure_error("fourier tail truncation failed to settle");
    return acc.value / std::numbers::pi;
}

inline KernelProfile kernel_via_fourier(int k, std::vector<double> grid,
                                        bool with_derivatives = false) {
    asymptotics::require_order(k);
    if (grid.size() < 2) throw invalid_argument_error("kernel_via_fourier: empty grid");
    KernelProfile p;
    p.k = k;
    p.params = asymptotics::dispersion_constants(k);
    p.grid = std::move(grid);
    const int rows = with_derivatives ? 2 * k : 1;
    p.deriv_table.assign(std::size_t(rows), std::vector<double>(p.grid.size()));
    for (int m = 0; m < rows; ++m)
        for (std::size_t i = 0; i < p.grid.size(); ++i)
            p.deriv_table[std::size_t(m)][i] = fourier_point(k, p.grid[i], m);
    p.norm_mode = normalization::unit_integral;  // \hat F(0) = 1
    p.regularized_mass = 1.0;
    double fmax = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        if (std::abs(p.values()[i]) > fmax) {
            fmax = std::abs(p.values()[i]);
            p.match_point = p.grid[i];
        }
    return p;
}

// Cubic-Hermite evaluation of a profile at arbitrary abscissae, with
// envelope-model extrapolation past the tabulated window.  Extrapolated
// calls are counted so callers can surface a warning.
class KernelInterpolant {
public:
    explicit KernelInterpolant(const KernelProfile& p) : p_(&p) {
        if (p.deriv_table.size() < 2)
            throw invalid_argument_error("interpolant needs F and F' rows");
    }

    double operator()(double y) const {
        const auto& g = p_->grid;
        if (y < g.front() || y > g.back()) {
            ++extrapolations_;
            return extrapolate(y);
        }
        const double h = p_->spacing();
        auto i = std::min(std::size_t((y - g.front()) / h), g.size() - 2);
        const double t = (y - g[i]) / h;
        const auto& F = p_->deriv_table[0];
        const auto& D = p_->deriv_table[1];
        const double t2 = t * t, t3 = t2 * t;
        return (2 * t3 - 3 * t2 + 1) * F[i] + (t3 - 2 * t2 + t) * h * D[i] +
               (-2 * t3 + 3 * t2) * F[i + 1] + (t3 - t2) * h * D[i + 1];
    }

    long extrapolation_count() const { return extrapolations_.load(); }

private:
    double extrapolate(double y) const {
        const auto& prm = p_->params;
        const auto& g = p_->grid;
        const auto& F = p_->deriv_table[0];
        const auto& D = p_->deriv_table[1];
        if (y > g.back()) {
            // amplitude/phase fit of the oscillatory model at the right edge
            double ye = g.back();
            double theta_p = prm.d_k * prm.alpha * std::pow(ye, prm.alpha - 1.0);
            double amp_cos = F.back();
            double amp_sin = -(D.back() + prm.envelope_exp / ye * F.back()) / theta_p;
            double amp = std::hypot(amp_cos, amp_sin);
            double phase = std::atan2(amp_sin, amp_cos);
            double dtheta = prm.d_k * (std::pow(y, prm.alpha) - std::pow(ye, prm.alpha));
            return amp * std::pow(y / ye, -prm.envelope_exp) * std::cos(dtheta + phase);
        }
        double ye = g.front();
        double ratio = std::exp(-prm.d_hat_k *
                                (std::pow(-y, prm.alpha) - std::pow(-ye, prm.alpha))) *
                       std::pow(y / ye, -prm.envelope_exp);
        return F.front() * ratio;  // damped model scaled to the edge value
    }

    const KernelProfile* p_;
    mutable std::atomic<long> extrapolations_{0};
};

}  // namespace dispersionlab::kernel
