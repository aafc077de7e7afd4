#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdio>
#include <functional>
#include <vector>

#include "dispersionlab/errors.hpp"

namespace dispersionlab::collocation {

// Two-point boundary value problem u' = f(y, u) on a uniform mesh,
// discretized with the Hermite-Simpson (Lobatto IIIA, fourth order) scheme
// and solved by an affine-invariant damped Newton iteration (the damping
// monitors the simplified Newton correction, which stays meaningful when the
// linearization is nearly singular along weakly determined tail modes).
// Boundary conditions are linear rows applied to the endpoint states:
//     left_bc  * u(y0) = left_rhs,   right_bc * u(y1) = right_rhs.
struct Problem {
    int dim = 0;
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)> rhs;
    std::function<void(double, const Eigen::VectorXd&, Eigen::MatrixXd&)> jacobian;
    Eigen::MatrixXd left_bc, right_bc;
    Eigen::VectorXd left_rhs, right_rhs;
};

struct Options {
    int max_iterations = 60;
    double tolerance = 1e-10;        // residual max-norm target
    double step_tolerance = 1e-11;   // Newton correction max-norm target
    double min_damping = 1.0 / 1024.0;
    bool trace = false;
};

struct Result {
    std::vector<double> y;
    std::vector<Eigen::VectorXd> u;  // state per node
    double residual_norm = 0.0;
    int iterations = 0;
};

namespace detail {

class Discretization {
public:
    Discretization(const Problem& prob, std::vector<double> y)
        : prob_(&prob), y_(std::move(y)), n_(prob.dim),
          h_((y_.back() - y_.front()) / double(y_.size() - 1)) {}

    const std::vector<double>& grid() const { return y_; }

    void residual(const std::vector<Eigen::VectorXd>& u, Eigen::VectorXd& R) const {
        const std::size_t N = y_.size() - 1;
        Eigen::VectorXd fi(n_), fip(n_), fm(n_), um(n_);
        Eigen::Index eqn = 0;
        for (std::size_t i = 0; i < N; ++i) {
            prob_->rhs(y_[i], u[i], fi);
            prob_->rhs(y_[i + 1], u[i + 1], fip);
            um = 0.5 * (u[i] + u[i + 1]) + (h_ / 8.0) * (fi - fip);
            prob_->rhs(0.5 * (y_[i] + y_[i + 1]), um, fm);
            R.segment(eqn, n_) = u[i + 1] - u[i] - (h_ / 6.0) * (fi + 4.0 * fm + fip);
            eqn += n_;
        }
        R.segment(eqn, prob_->left_bc.rows()) =
            prob_->left_bc * u.front() - prob_->left_rhs;
        eqn += prob_->left_bc.rows();
        R.segment(eqn, prob_->right_bc.rows()) =
            prob_->right_bc * u.back() - prob_->right_rhs;
    }

    void assemble(const std::vector<Eigen::VectorXd>& u,
                  Eigen::SparseMatrix<double>& J) const {
        const std::size_t N = y_.size() - 1;
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(std::size_t(4 * n_ * n_) * (N + 1));
        Eigen::VectorXd fi(n_), fip(n_), um(n_);
        Eigen::MatrixXd Ji(n_, n_), Jip(n_, n_), Jm(n_, n_), Ci(n_, n_), Cip(n_, n_);
        const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n_, n_);
        Eigen::Index eqn = 0;
        for (std::size_t i = 0; i < N; ++i) {
            prob_->rhs(y_[i], u[i], fi);
            prob_->rhs(y_[i + 1], u[i + 1], fip);
            um = 0.5 * (u[i] + u[i + 1]) + (h_ / 8.0) * (fi - fip);
            prob_->jacobian(y_[i], u[i], Ji);
            prob_->jacobian(y_[i + 1], u[i + 1], Jip);
            prob_->jacobian(0.5 * (y_[i] + y_[i + 1]), um, Jm);
            Ci = -I - (h_ / 6.0) * (Ji + 4.0 * Jm * (0.5 * I + (h_ / 8.0) * Ji));
            Cip = I - (h_ / 6.0) * (Jip + 4.0 * Jm * (0.5 * I - (h_ / 8.0) * Jip));
            for (int a = 0; a < n_; ++a)
                for (int b = 0; b < n_; ++b) {
                    trip.emplace_back(eqn + a, Eigen::Index(n_ * i) + b, Ci(a, b));
                    trip.emplace_back(eqn + a, Eigen::Index(n_ * (i + 1)) + b, Cip(a, b));
                }
            eqn += n_;
        }
        for (Eigen::Index r = 0; r < prob_->left_bc.rows(); ++r, ++eqn)
            for (int b = 0; b < n_; ++b)
                trip.emplace_back(eqn, b, prob_->left_bc(r, b));
        for (Eigen::Index r = 0; r < prob_->right_bc.rows(); ++r, ++eqn)
            for (int b = 0; b < n_; ++b)
                trip.emplace_back(eqn, Eigen::Index(n_ * N) + b, prob_->right_bc(r, b));
        J.setFromTriplets(trip.begin(), trip.end());
    }

private:
    const Problem* prob_;
    std::vector<double> y_;
    int n_;
    double h_;
};

}  // namespace detail

inline Result solve(const Problem& prob, double y0, double y1, std::size_t nodes,
                    const std::vector<Eigen::VectorXd>& initial_guess,
                    const Options& opt = {}) {
    const int n = prob.dim;
    if (initial_guess.size() != nodes)
        throw invalid_argument_error("collocation: initial guess size mismatch");
    if (prob.left_bc.rows() + prob.right_bc.rows() != n)
        throw invalid_argument_error("collocation: boundary rows do not close the system");

    Result res;
    res.y.resize(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        res.y[i] = y0 + double(i) * (y1 - y0) / double(nodes - 1);
    res.u = initial_guess;
    detail::Discretization disc(prob, res.y);

    const Eigen::Index total = Eigen::Index(n) * Eigen::Index(nodes);
    Eigen::SparseMatrix<double> J(total, total);
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    Eigen::VectorXd R(total), Rt(total);
    std::vector<Eigen::VectorXd> trial(nodes, Eigen::VectorXd(n));

    disc.residual(res.u, R);
    double rnorm = R.lpNorm<Eigen::Infinity>();
    for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
        if (rnorm < opt.tolerance) break;
        disc.assemble(res.u, J);
        lu.compute(J);
        if (lu.info() != Eigen::Success)
            throw non_convergence_error("collocation: singular Newton matrix");
        Eigen::VectorXd d = lu.solve(-R);
        const double dnorm = d.lpNorm<Eigen::Infinity>();
        if (!std::isfinite(dnorm))
            throw non_convergence_error("collocation: non-finite Newton step");
        if (dnorm < opt.step_tolerance) {
            disc.residual(res.u, R);
            rnorm = R.lpNorm<Eigen::Infinity>();
            break;
        }
        // affine-invariant damping: require the simplified correction
        // |J(u)^{-1} R(u + lambda d)| to contract
        double lambda = 1.0;
        double accepted = -1.0;
        while (lambda >= opt.min_damping) {
            for (std::size_t i = 0; i < nodes; ++i)
                trial[i] = res.u[i] + lambda * d.segment(Eigen::Index(n) * Eigen::Index(i), n);
            disc.residual(trial, Rt);
            Eigen::VectorXd dbar = lu.solve(-Rt);
            double contract = dbar.lpNorm<Eigen::Infinity>() / dnorm;
            if (contract <= 1.0 - 0.5 * lambda || Rt.lpNorm<Eigen::Infinity>() < opt.tolerance) {
                accepted = lambda;
                break;
            }
            lambda *= 0.5;
        }
        if (accepted < 0.0)
            throw non_convergence_error("collocation: damping failed to find a descent step");
        res.u.swap(trial);
        R.swap(Rt);
        rnorm = R.lpNorm<Eigen::Infinity>();
        if (opt.trace)
            std::fprintf(stderr, "newton it=%d |R|=%.3e |d|=%.3e lambda=%.4g\n",
                         res.iterations, rnorm, dnorm, accepted);
        if (!std::isfinite(rnorm))
            throw non_convergence_error("collocation: diverged to non-finite state");
    }
    res.residual_norm = rnorm;
    if (rnorm > std::max(opt.tolerance * 10.0, 1e-8))
        throw non_convergence_error("collocation: Newton iteration did not converge");
    return res;
}

}  // namespace dispersionlab::collocation
