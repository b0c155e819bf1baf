#pragma once

/**
 * @file collocation.hpp
 * @brief Chebyshev collocation restricted to even (or odd) functions on [0, 1].
 *
 * The 2M+1 Chebyshev extrema on [-1, 1] are folded onto the M+1 nonnegative
 * nodes, ordered so that rho[0] = 0 and rho[M] = 1.
 */

#include <Eigen/Dense>

namespace skyrme {

struct EvenChebyshev {
    int M = 0;
    Eigen::VectorXd rho;
    Eigen::MatrixXd D;       // even -> odd
    Eigen::MatrixXd D_odd;   // odd -> even
    Eigen::MatrixXd D2;      // even -> even
    Eigen::VectorXd weights; // integral over [0, 1]

    static EvenChebyshev build(int M);

    int size() const { return M + 1; }

    /// Barycentric interpolation of nodal values; parity selects the extension.
    double interpolate(const Eigen::VectorXd& f, double r, bool odd = false) const;

    /// Radial 7D Laplacian f'' + 6 f'/rho with the regular limit 7 f'' at rho = 0.
    Eigen::MatrixXd laplacian7() const;
};

}  // namespace skyrme
