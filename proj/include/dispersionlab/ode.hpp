#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dispersionlab/errors.hpp"

namespace dispersionlab::ode {

using state = std::vector<double>;

// Classical RK4 march with dense output at every grid node.  `substeps`
// internal steps are taken per node interval.  Works in either direction
// (y1 < y0 allowed).  The right-hand side is f(y, u, du).
template <class F>
std::vector<state> rk4_march(const F& f, double y0, double y1, std::size_t nodes,
                             const state& u0, int substeps = 2) {
    if (nodes < 2) throw invalid_argument_error("rk4_march needs at least two nodes");
    const std::size_t dim = u0.size();
    std::vector<state> out(nodes, state(dim));
    out[0] = u0;
    state u = u0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    const double H = (y1 - y0) / double(nodes - 1);
    const double h = H / substeps;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
        double y = y0 + double(i) * H;
        for (int s = 0; s < substeps; ++s) {
            double ys = y + s * h;
            f(ys, u, k1);
            for (std::size_t j = 0; j < dim; ++j) tmp[j] = u[j] + 0.5 * h * k1[j];
            f(ys + 0.5 * h, tmp, k2);
            for (std::size_t j = 0; j < dim; ++j) tmp[j] = u[j] + 0.5 * h * k2[j];
            f(ys + 0.5 * h, tmp, k3);
            for (std::size_t j = 0; j < dim; ++j) tmp[j] = u[j] + h * k3[j];
            f(ys + h, tmp, k4);
            for (std::size_t j = 0; j < dim; ++j)
                u[j] += h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        out[i + 1] = u;
    }
    return out;
}

}  // namespace dispersionlab::ode
