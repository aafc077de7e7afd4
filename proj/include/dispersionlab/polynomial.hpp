#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <map>

#include "dispersionlab/errors.hpp"

namespace dispersionlab {

using rational = boost::multiprecision::cpp_rational;

// Sparse polynomial with exact rational coefficients, indexed by degree.
struct RationalPolynomial {
    std::map<int, rational> coeffs;

    void set(int degree, rational c) {
        if (c == 0)
            coeffs.erase(degree);
        else
            coeffs[degree] = std::move(c);
    }
    rational coeff(int degree) const {
        auto it = coeffs.find(degree);
        return it == coeffs.end() ? rational(0) : it->second;
    }
    int degree() const { return coeffs.empty() ? -1 : coeffs.rbegin()->first; }
    bool is_zero() const { return coeffs.empty(); }

    RationalPolynomial derivative(int times = 1) const {
        RationalPolynomial out = *this;
        for (int t = 0; t < times; ++t) {
            RationalPolynomial next;
            for (const auto& [d, c] : out.coeffs)
                if (d > 0) next.set(d - 1, c * d);
            out = std::move(next);
        }
        return out;
    }

    RationalPolynomial times_y() const {
        RationalPolynomial out;
        for (const auto& [d, c] : coeffs) out.set(d + 1, c);
        return out;
    }

    RationalPolynomial scaled(const rational& s) const {
        RationalPolynomial out;
        if (s == 0) return out;
        for (const auto& [d, c] : coeffs) out.set(d, c * s);
        return out;
    }

    RationalPolynomial operator+(const RationalPolynomial& o) const {
        RationalPolynomial out = *this;
        for (const auto& [d, c] : o.coeffs) out.set(d, out.coeff(d) + c);
        return out;
    }
    RationalPolynomial operator-(const RationalPolynomial& o) const {
        return *this + o.scaled(rational(-1));
    }
    bool operator==(const RationalPolynomial& o) const { return coeffs == o.coeffs; }

    double evaluate(double y) const {
        if (coeffs.empty()) return 0.0;
        double acc = 0.0;
        int d = degree();
        for (int i = d; i >= 0; --i) {
            acc *= y;
            auto it = coeffs.find(i);
            if (it != coeffs.end()) acc += it->second.convert_to<double>();
        }
        return acc;
    }
};

}  // namespace dispersionlab
