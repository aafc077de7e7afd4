#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "airy_reference.hpp"
#include "dispersionlab/spectral.hpp"

using namespace dispersionlab;
using namespace dispersionlab::spectral;
using kernel::KernelProfile;
using kernel::ShootingConfig;

namespace {
const KernelProfile& k1_profile(int table_order = 16) {
    static KernelProfile p = kernel::derivative_table(
        kernel::solve_kernel(1, ShootingConfig::defaults(1)), 16);
    (void)table_order;
    return p;
}
}  // namespace

TEST_CASE("eigenvalues are exact rationals") {
    CHECK(eigenvalue(0, 1) == 0);
    CHECK(eigenvalue(3, 1) == rational(-1));
    CHECK(eigenvalue(2, 2) == rational(-2, 5));
    CHECK_THROWS_AS(eigenvalue(-1, 1), invalid_argument_error);
}

TEST_CASE("eigenfunctions from the derivative table") {
    const auto& kern = k1_profile();
    auto psi0 = eigenfunction(0, kern);
    for (std::size_t i = 0; i < kern.grid.size(); i += 111)
        CHECK(psi0.psi_samples[i] == kern.values()[i]);

    auto psi1 = eigenfunction(1, kern);
    // psi_1 = -F'; at the origin F' = 0.12442739... from the series oracle
    double fp0 = airy_reference::k1_kernel_prime(0.0);
    CHECK(psi1.psi_samples[kern.index_of(0.0)] == Catch::Approx(-fp0).margin(1e-7));

    auto psi2 = eigenfunction(2, kern);
    for (std::size_t i = 0; i < kern.grid.size(); i += 97) {
        double expect = -(kern.grid[i] * kern.values()[i] / 3.0) / std::sqrt(2.0);
        CHECK(psi2.psi_samples[i] == Catch::Approx(expect).margin(1e-13));
    }
    CHECK_THROWS_AS(eigenfunction(40, kern), invalid_argument_error);
}

TEST_CASE("adjoint polynomials have the exact coefficients") {
    auto a0 = adjoint_polynomial(0, 1);
    CHECK(a0.poly.degree() == 0);
    CHECK(a0.poly.coeff(0) == 1);

    auto a1 = adjoint_polynomial(1, 3);
    CHECK(a1.poly.degree() == 1);
    CHECK(a1.poly.coeff(1) == 1);
    CHECK(a1.poly.coeff(0) == 0);

    // l=3, k=1, plain: (1/sqrt 6)(y^3 - 6).  Direct substitution into the
    // adjoint eigen-equation forces the minus sign on the correction term:
    // B*(y^3 + c) = 6 - y^3 must equal -(y^3 + c), so c = -6.
    auto a3 = adjoint_polynomial(3, 1);
    CHECK(a3.poly.coeff(3) == 1);
    CHECK(a3.poly.coeff(0) == -6);
    CHECK(a3.poly.coeffs.size() == 2);

    auto a3m = adjoint_polynomial(3, 1, sign_convention::metric_adjusted);
    CHECK(a3m.poly.coeff(3) == -1);
    CHECK(a3m.poly.coeff(0) == 6);

    // even k: corrections enter with the plus sign at every order
    auto a5k2 = adjoint_polynomial(5, 2);
    CHECK(a5k2.poly.coeff(5) == 1);
    CHECK(a5k2.poly.coeff(0) == 120);

    // term structure: nonzero degrees only at l - (2k+1) j
    for (int k = 1; k <= 3; ++k)
        for (int l = 0; l <= 30; ++l) {
            auto a = adjoint_polynomial(l, k);
            for (const auto& [d, c] : a.poly.coeffs) {
                CHECK((l - d) % (2 * k + 1) == 0);
                CHECK(c != 0);
            }
            CHECK(int(a.poly.coeffs.size()) <= l / (2 * k + 1) + 1);
            CHECK(a.poly.coeff(l) == 1);
        }
}

TEST_CASE("adjoint eigen-equation holds with zero rational residual") {
    // B* psi*_l = (-l/(2k+1)) psi*_l exactly, l <= 30, k in {1,2,3}
    for (int k = 1; k <= 3; ++k)
        for (int l = 0; l <= 30; ++l) {
            auto a = adjoint_polynomial(l, k);
            auto lhs = apply_B_star(a);
            auto rhs = a.poly.scaled(eigenvalue(l, k));
            CHECK(lhs.poly == rhs);
        }
}

TEST_CASE("apply_B_star worked examples") {
    auto a0 = adjoint_polynomial(0, 1);
    CHECK(apply_B_star(a0).poly.is_zero());

    // y at k=1 maps to -(1/3) y
    AdjointPolynomial lin;
    lin.l = 1;
    lin.k = 1;
    lin.poly.set(1, 1);
    auto out = apply_B_star(lin);
    CHECK(out.poly.coeff(1) == rational(-1, 3));
    CHECK(out.poly.coeffs.size() == 1);
}

TEST_CASE("residual of the forward eigen-equation follows the tolerance schedule") {
    const auto& kern = k1_profile();
    const double tol = 1e-8;  // integrator accuracy budget
    for (int l = 0; l <= 8; ++l) {
        auto pair = eigenfunction(l, kern);
        double r = residual_B(pair, kern);
        CHECK(r <= tol * std::pow(10.0, l / 2.0));
    }
}

TEST_CASE("moments of Gaussian data") {
    DataFunction gauss{[](double z) { return std::exp(-z * z); }, -9.0, 9.0,
                       decay_class::fast_exponential};
    const double rpi = std::sqrt(std::numbers::pi);
    CHECK(moments(gauss, 0) == Catch::Approx(rpi).epsilon(1e-10));
    CHECK(moments(gauss, 1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(moments(gauss, 2) == Catch::Approx(rpi / 2.0 / std::sqrt(2.0)).epsilon(1e-10));

    DataFunction slow = gauss;
    slow.decay = decay_class::slow;
    CHECK_THROWS_AS(moments(slow, 0), decay_class_violation_error);
}

TEST_CASE("moment functional is linear") {
    DataFunction u{[](double z) { return std::exp(-z * z); }, -9.0, 9.0,
                   decay_class::fast_exponential};
    DataFunction v{[](double z) { return z * std::exp(-2.0 * z * z); }, -9.0, 9.0,
                   decay_class::fast_exponential};
    DataFunction w{[](double z) {
                       return 2.5 * std::exp(-z * z) - 1.25 * z * std::exp(-2.0 * z * z);
                   },
                   -9.0, 9.0, decay_class::fast_exponential};
    for (int l = 0; l <= 5; ++l)
        CHECK(moments(w, l) ==
              Catch::Approx(2.5 * moments(u, l) - 1.25 * moments(v, l)).margin(1e-9));
}

TEST_CASE("analytic pairing reproduces the stated case split") {
    const auto& kern = k1_profile();
    auto policy = TruncationPolicy::defaults(1);
    for (int b = 0; b <= 5; ++b)
        for (int g = 0; g <= 5; ++g) {
            auto pair = eigenfunction(b, kern);
            auto adj = adjoint_polynomial(g, 1, sign_convention::metric_adjusted);
            double v = indefinite_pairing(pair, adj, kern, policy);
            if (b == g)
                CHECK(v == Catch::Approx(1.0).margin(1e-9));  // regularized mass
            else
                CHECK(v == 0.0);
        }
    // the plain convention carries the parity sign on the diagonal
    auto p3 = eigenfunction(3, kern);
    auto a3 = adjoint_polynomial(3, 1, sign_convention::plain);
    CHECK(indefinite_pairing(p3, a3, kern, policy) == Catch::Approx(-1.0).margin(1e-9));
}

TEST_CASE("filtered quadrature validates the diagonal mass") {
    const auto& kern = k1_profile();
    auto policy = TruncationPolicy::defaults(1, pairing_mode::filtered_quadrature);
    auto pair = eigenfunction(0, kern);
    auto adj = adjoint_polynomial(0, 1, sign_convention::metric_adjusted);
    CHECK(indefinite_pairing(pair, adj, kern, policy) == Catch::Approx(1.0).margin(1e-3));
}

TEST_CASE("biorthonormality matrix") {
    const auto& kern = k1_profile();
    auto analytic = biorthonormality_matrix(10, 1, kern,
                                            TruncationPolicy::defaults(1));
    for (int b = 0; b <= 10; ++b)
        for (int g = 0; g <= 10; ++g) {
            if (b == g)
                CHECK(analytic[b][g] == Catch::Approx(1.0).margin(1e-9));
            else
                CHECK(analytic[b][g] == 0.0);
        }

    auto single = biorthonormality_matrix(0, 1, kern, TruncationPolicy::defaults(1));
    REQUIRE(single.size() == 1);
    CHECK(single[0][0] == Catch::Approx(1.0).margin(1e-9));

    auto filtered = biorthonormality_matrix(
        3, 1, kern, TruncationPolicy::defaults(1, pairing_mode::filtered_quadrature));
    for (int b = 0; b <= 3; ++b)
        for (int g = 0; g <= 3; ++g)
            CHECK(std::abs(filtered[b][g] - (b == g ? 1.0 : 0.0)) < 1e-2);
}

TEST_CASE("spectra of the pair coincide") {
    // the lambda from apply_B_star's coefficient identity equals eigenvalue()
    for (int k = 1; k <= 3; ++k)
        for (int l = 1; l <= 12; ++l) {
            auto a = adjoint_polynomial(l, k);
            auto img = apply_B_star(a);
            rational lam = img.poly.coeff(l);  // leading coefficient of image = lambda
            CHECK(lam == eigenvalue(l, k));
        }
}
