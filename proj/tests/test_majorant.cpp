#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "dispersionlab/evolution.hpp"
#include "dispersionlab/majorant.hpp"

using namespace dispersionlab;
using namespace dispersionlab::majorant;
using spectral::DataFunction;
using spectral::decay_class;

namespace {
const kernel::KernelProfile& k1_profile() {
    static kernel::KernelProfile p = kernel::derivative_table(
        kernel::solve_kernel(1, kernel::ShootingConfig::defaults(1)), 8);
    return p;
}
const MajorantKernel& k1_majorant() {
    static MajorantKernel m = majorant_kernel(k1_profile(), k1_profile().grid);
    return m;
}
}  // namespace

TEST_CASE("majorant kernel is positive with unit mass") {
    const auto& m = k1_majorant();
    for (double v : m.values) CHECK(v > 0.0);
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < m.grid.size(); ++i)
        mass += 0.5 * (m.values[i] + m.values[i + 1]) * (m.grid[i + 1] - m.grid[i]);
    CHECK(mass == Catch::Approx(1.0).margin(1e-6));
    // right tail follows the algebraic envelope
    double r1 = majorant_shape(20.0, 1, m.a) / std::pow(1.0 + 400.0, -1.0 / 8.0);
    CHECK(r1 == Catch::Approx(1.0).margin(1e-6));
    // blend weights are equal at the origin
    CHECK(1.0 / (1.0 + std::exp(-0.0)) == 0.5);
}

TEST_CASE("omega1 is the reciprocal absolute mass") {
    const auto& m = k1_majorant();
    // F changes sign, so int|F| strictly exceeds int F = 1 and omega1 < 1
    CHECK(m.omega1 > 0.0);
    CHECK(m.omega1 < 1.0);
    double absmass = 0.0;
    const auto& p = k1_profile();
    for (std::size_t i = 0; i + 1 < p.grid.size(); ++i)
        absmass += 0.5 * (std::abs(p.values()[i]) + std::abs(p.values()[i + 1])) *
                   (p.grid[i + 1] - p.grid[i]);
    CHECK(m.omega1 * absmass == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("majorant constant exceeds one and scales homogeneously") {
    const auto& m = k1_majorant();
    double dbar = majorant_constant(k1_profile(), m);
    CHECK(dbar > 1.0);
    MajorantKernel doubled = m;
    for (double& v : doubled.values) v *= 2.0;
    CHECK(majorant_constant(k1_profile(), doubled) == Catch::Approx(0.5 * dbar).epsilon(1e-12));
}

TEST_CASE("derivative bounds fit a finite constant") {
    auto rep = derivative_bound_check(k1_profile(), 6);
    CHECK(std::isfinite(rep.c_bar));
    CHECK(rep.c_bar > 0.0);
    auto rep3 = derivative_bound_check(k1_profile(), 3);
    CHECK(rep3.c_bar <= rep.c_bar);  // monotone in beta_max
}

TEST_CASE("comparison evolution dominates the true solution") {
    const auto& kern = k1_profile();
    const auto& m = k1_majorant();
    const double dbar = majorant_constant(kern, m);
    DataFunction u0{[](double z) { return std::exp(-z * z); }, -8.0, 8.0,
                    decay_class::fast_exponential};
    DataFunction u0bar{[dbar](double z) { return dbar * std::exp(-z * z); }, -8.0, 8.0,
                       decay_class::fast_exponential};
    require_majorized_data(u0, u0bar, dbar);

    std::vector<double> x;
    for (double t = -10.0; t <= 10.0 + 1e-9; t += 0.1) x.push_back(t);
    auto u = evolution::evolve_convolution(kern, u0, 2.0, x);
    auto ubar = majorant_evolution(m, u0bar, 2.0, x);
    CHECK(compare(u, ubar));

    // zero data is trivially dominated
    DataFunction zero{[](double) { return 0.0; }, -1.0, 1.0, decay_class::compact_support};
    auto uz = evolution::evolve_convolution(kern, zero, 2.0, x);
    auto uzbar = majorant_evolution(m, u0bar, 2.0, x);
    CHECK(compare(uz, uzbar));

    // violating the data precondition is rejected
    DataFunction thin{[](double z) { return 0.5 * std::exp(-z * z); }, -8.0, 8.0,
                      decay_class::fast_exponential};
    CHECK_THROWS_AS(require_majorized_data(u0, thin, dbar), precondition_violation_error);
}

TEST_CASE("majorant evolution preserves mass and order") {
    const auto& m = k1_majorant();
    DataFunction u0bar{[](double z) { return std::exp(-z * z); }, -8.0, 8.0,
                       decay_class::fast_exponential};
    DataFunction v0bar{[](double z) { return std::exp(-z * z) + 0.3 * std::exp(-4.0 * z * z); },
                       -8.0, 8.0, decay_class::fast_exponential};
    // window wide enough that every kernel argument stays inside its grid
    const double s = std::pow(2.0, -1.0 / 3.0);
    std::vector<double> x;
    for (double t = m.grid.front() / s - 8.0; t <= m.grid.back() / s + 8.0 + 1e-9;
         t += 0.02)
        x.push_back(t);
    auto ub = majorant_evolution(m, u0bar, 2.0, x);
    auto vb = majorant_evolution(m, v0bar, 2.0, x);
    // order preservation
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(ub[i] <= vb[i] + 1e-12);
    // mass conservation over the full reachable window (positive kernel,
    // unit mass on its grid)
    double mass = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        mass += 0.5 * (ub[i] + ub[i + 1]) * (x[i + 1] - x[i]);
    const double m0 = quadrature::integrate(u0bar.f, -8.0, 8.0);
    CHECK(mass == Catch::Approx(m0).epsilon(0.005));
}
