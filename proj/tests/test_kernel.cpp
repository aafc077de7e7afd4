#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "airy_reference.hpp"
#include "dispersionlab/kernel.hpp"

using namespace dispersionlab;
using namespace dispersionlab::kernel;

namespace {
const KernelProfile& k1_profile() {
    static KernelProfile p =
        derivative_table(solve_kernel(1, ShootingConfig::defaults(1)), 8);
    return p;
}
const KernelProfile& k2_profile() {
    static KernelProfile p =
        derivative_table(solve_kernel(2, ShootingConfig::defaults(2)), 8);
    return p;
}
}  // namespace

TEST_CASE("k=1 kernel matches the Airy closed form") {
    const auto& p = k1_profile();
    double worst = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        double y = p.grid[i];
        if (y < -8.0 || y > 15.0) continue;
        worst = std::max(worst, std::abs(p.values()[i] - airy_reference::k1_kernel(y)));
    }
    CHECK(worst < 1e-6);
    // F(0) = (1/3)/Gamma(2/3), frozen from the series oracle
    CHECK(p.values()[p.index_of(0.0)] == Catch::Approx(0.24616270387388277).margin(1e-8));
    CHECK(p.regularized_mass == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("kernel ODE residual vanishes on the grid") {
    for (const KernelProfile* pp : {&k1_profile(), &k2_profile()}) {
        const auto& p = *pp;
        const int k = p.k;
        const double sgn = (k % 2 == 0) ? 1.0 : -1.0;
        double worst = 0.0;
        const auto& top = p.deriv_table[std::size_t(2 * k)];
        for (std::size_t i = 0; i < p.grid.size(); ++i) {
            double lhs = top[i] - sgn * p.grid[i] * p.values()[i] / double(2 * k + 1);
            worst = std::max(worst, std::abs(lhs));
        }
        CHECK(worst < 1e-12);  // the table row is generated by the recurrence
    }
}

TEST_CASE("left-tail envelope dominance at k=1") {
    const auto& p = k1_profile();
    auto model = [&](double y) {
        return std::pow(-y, -0.25) *
               std::exp(-2.0 * std::pow(3.0, -1.5) * std::pow(-y, 1.5));
    };
    const double ref = std::abs(p.values()[p.index_of(-3.0)]) / model(-3.0);
    for (double y = -3.0; y >= p.grid.front() + 0.5; y -= 0.25)
        CHECK(std::abs(p.values()[p.index_of(y)]) <= 1.1 * model(y) * ref + 1e-14);
}

TEST_CASE("oscillatory tail persists at k=1") {
    const auto& p = k1_profile();
    int sign_changes = 0;
    for (std::size_t i = p.index_of(0.0); i + 1 < p.grid.size(); ++i) {
        if (p.grid[i] > 20.0) break;
        if (p.values()[i] * p.values()[i + 1] < 0.0) ++sign_changes;
    }
    CHECK(sign_changes >= 5);
}

TEST_CASE("oscillation amplitude decays faster at k=2") {
    // fit the envelope exponent of tail extrema magnitudes; expect about
    // -(2k-1)/(4k): -1/4 at k=1 and -3/8 at k=2
    auto fit = [](const KernelProfile& p) {
        std::vector<double> ly, lv;
        const auto& F = p.values();
        for (std::size_t i = 1; i + 1 < p.grid.size(); ++i) {
            if (p.grid[i] < 8.0 || p.grid[i] > 0.9 * p.grid.back()) continue;
            if ((F[i] - F[i - 1]) * (F[i + 1] - F[i]) < 0.0) {
                ly.push_back(std::log(p.grid[i]));
                lv.push_back(std::log(std::abs(F[i])));
            }
        }
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < ly.size(); ++i) {
            sx += ly[i]; sy += lv[i]; sxx += ly[i] * ly[i]; sxy += ly[i] * lv[i];
        }
        double n = double(ly.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    double s1 = fit(k1_profile());
    double s2 = fit(k2_profile());
    CHECK(s1 == Catch::Approx(-0.25).margin(0.03));
    CHECK(s2 == Catch::Approx(-0.375).margin(0.03));
    CHECK(s2 < s1);
}

TEST_CASE("fourier oracle equals the Airy closed form at k=1") {
    double worst = 0.0;
    for (double y = -8.0; y <= 15.0; y += 0.37) {
        double fo = fourier_point(1, y);
        worst = std::max(worst, std::abs(fo - airy_reference::k1_kernel(y)));
    }
    CHECK(worst < 1e-6);
    CHECK(fourier_point(1, 0.0) == Catch::Approx(0.24616270387388277).margin(1e-10));
}

TEST_CASE("fourier profile carries unit mass by construction") {
    std::vector<double> grid;
    for (double y = -14.0; y <= 28.0; y += 0.005) grid.push_back(y);
    for (int k : {1, 2}) {
        auto p = kernel_via_fourier(k, grid);
        CHECK(p.norm_mode == normalization::unit_integral);
        double mass = regularized_mass(p);
        CHECK(mass == Catch::Approx(1.0).margin(1e-4));  // window-truncated tails
    }
}

TEST_CASE("cross-oracle agreement between shooting and fourier") {
    for (int k : {1, 2}) {
        const auto& p = (k == 1) ? k1_profile() : k2_profile();
        double worst = 0.0;
        for (double y = -8.0; y <= 15.0; y += 0.5) {
            double a = p.values()[p.index_of(y)];
            double b = fourier_point(k, y);
            worst = std::max(worst, std::abs(a - b));
        }
        CHECK(worst < 1e-6);
    }
}

TEST_CASE("derivative table recurrence identities at k=1") {
    const auto& p = k1_profile();
    const auto& F = p.values();
    const auto& F1 = p.deriv_table[1];
    const auto& F2 = p.deriv_table[2];
    const auto& F3 = p.deriv_table[3];
    for (std::size_t i = 0; i < p.grid.size(); i += 97) {
        double y = p.grid[i];
        CHECK(F2[i] == Catch::Approx(-y * F[i] / 3.0).margin(1e-14));
        CHECK(F3[i] == Catch::Approx(-(F[i] + y * F1[i]) / 3.0).margin(1e-14));
    }
    // order 2k at y=0 vanishes for any k (recurrence has a factor y)
    CHECK(std::abs(F2[p.index_of(0.0)]) < 1e-15);
    CHECK(std::abs(k2_profile().deriv_table[4][k2_profile().index_of(0.0)]) < 1e-15);
}

TEST_CASE("normalize is mode-idempotent and scale-free") {
    auto p = k1_profile();  // copy, unit integral
    auto scaled = p;
    for (auto& row : scaled.deriv_table)
        for (double& v : row) v *= 3.7;
    auto back = normalize(scaled, normalization::unit_integral);
    double worst = 0.0;
    for (std::size_t i = 0; i < p.grid.size(); ++i)
        worst = std::max(worst, std::abs(back.values()[i] - p.values()[i]));
    CHECK(worst < 1e-12);

    auto pm = normalize(p, normalization::unit_max);
    double fmax = 0.0;
    for (double v : pm.values()) fmax = std::max(fmax, std::abs(v));
    CHECK(fmax == Catch::Approx(1.0).epsilon(1e-12));
    // conversion factor between the modes is the regularized mass
    CHECK(pm.regularized_mass == Catch::Approx(regularized_mass(pm)).margin(1e-7));
    // max of the unit-integral kernel sits near the matching point
    CHECK(p.match_point == Catch::Approx(1.4694).margin(0.01));
    double expect_max = airy_reference::k1_kernel(p.match_point);
    double got_max = 0.0;
    for (double v : p.values()) got_max = std::max(got_max, std::abs(v));
    CHECK(got_max == Catch::Approx(expect_max).margin(1e-5));
}

TEST_CASE("shooting rejects bad configurations") {
    ShootingConfig bad = ShootingConfig::defaults(1);
    bad.left_endpoint = -2.0;
    CHECK_THROWS_AS(solve_kernel(1, bad), invalid_argument_error);
    CHECK_THROWS_AS(solve_kernel(0, ShootingConfig::defaults(1)), invalid_argument_error);
}

TEST_CASE("interpolant matches the oracle and flags extrapolation") {
    const auto& p = k1_profile();
    KernelInterpolant F(p);
    for (double y = -7.3; y < 14.0; y += 0.613)
        CHECK(F(y) == Catch::Approx(airy_reference::k1_kernel(y)).margin(2e-6));
    CHECK(F.extrapolation_count() == 0);
    (void)F(p.grid.back() + 5.0);
    CHECK(F.extrapolation_count() == 1);
}
