#pragma once

// Test-only reference implementation of the classical Airy function via its
// everywhere-convergent Maclaurin series.  Independent of the library's
// kernel construction paths; used as the ground-truth oracle for k = 1.

#include <cmath>
#include <stdexcept>

namespace airy_reference {

inline constexpr double kGammaOneThird = 2.6789385347077476337;
inline constexpr double kGammaTwoThirds = 1.3541179394264004169;

// Ai(z) = c1 f(z) - c2 g(z) with the standard first/second solutions
//   f = sum t_n,  t_0 = 1,      t_{n+1} = t_n z^3 / ((3n+2)(3n+3))
//   g = sum s_n,  s_0 = z,      s_{n+1} = s_n z^3 / ((3n+3)(3n+4))
inline double airy_ai(double z) {
    const double c1 = std::pow(3.0, -2.0 / 3.0) / kGammaTwoThirds;
    const double c2 = std::pow(3.0, -1.0 / 3.0) / kGammaOneThird;
    const double z3 = z * z * z;
    double t = 1.0, s = z, f = t, g = s;
    for (int n = 0; n < 400; ++n) {
        t *= z3 / ((3 * n + 2) * (3 * n + 3));
        s *= z3 / ((3 * n + 3) * (3 * n + 4));
        f += t;
        g += s;
        if (std::abs(t) < 1e-300 && std::abs(s) < 1e-300) break;
    }
    return c1 * f - c2 * g;
}

inline double airy_ai_prime(double z) {
    const double c1 = std::pow(3.0, -2.0 / 3.0) / kGammaTwoThirds;
    const double c2 = std::pow(3.0, -1.0 / 3.0) / kGammaOneThird;
    const double z3 = z * z * z;
    // termwise derivative: f' = sum 3n a_n z^{3n-1}, g' = sum (3n+1) b_n z^{3n}
    double a = 1.0, b = 1.0;
    double fp = 0.0, gp = 1.0;
    double w = z * z;  // z^{3n-1} at n=1
    double v = z3;     // z^{3n}   at n=1
    for (int n = 1; n < 400; ++n) {
        a /= (3 * n - 1) * (3 * n);
        b /= (3 * n) * (3 * n + 1);
        fp += 3 * n * a * w;
        gp += (3 * n + 1) * b * v;
        w *= z3;
        v *= z3;
        if (std::abs(a * w) < 1e-300 && std::abs(b * v) < 1e-300) break;
    }
    return c1 * fp - c2 * gp;
}

// Closed form of the unit-integral rescaled kernel at k = 1:
// F(y) = 3^{-1/3} Ai(-3^{-1/3} y).
inline double k1_kernel(double y) {
    const double r = std::pow(3.0, -1.0 / 3.0);
    return r * airy_ai(-r * y);
}

inline double k1_kernel_prime(double y) {
    const double r = std::pow(3.0, -1.0 / 3.0);
    return -r * r * airy_ai_prime(-r * y);
}

}  // namespace airy_reference
