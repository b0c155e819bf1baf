#pragma once

/**
 * @file spectral.hpp
 * @brief Collocation discretisation of the linearised generator around the
 *        profile and its two-grid filtered spectrum.
 *
 *   L (u1, u2) = ( -rho u1' - u1 + u2,
 *                  Lap7 u1 - rho u2' - 4 u2 + V1 u1 + V2 rho (rho u2 - u1') )
 *
 * acting on even radial representatives; no boundary row at rho = 1.
 */

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "skyrme/collocation.hpp"

namespace skyrme {

struct OperatorMatrix {
    int n = 0;  // collocation parameter M, nodes 0..M per block
    bool include_potential = true;
    EvenChebyshev grid;
    Eigen::MatrixXd A;  // (2(M+1))^2, block order (u1, u2)
};

/// Throws ResolutionError if n < 32 or the grid interpolates V1, V2 worse than 1e-8.
OperatorMatrix assemble_L(int n, bool include_potential = true);

/// Symmetry mode ((1+Lambda)U1, (2+Lambda)U2) sampled on the grid.
Eigen::VectorXd symmetry_mode(const EvenChebyshev& grid);

/// Weighted discrete L2 inner product with weight rho^6 on both blocks.
double weighted_dot(const EvenChebyshev& grid, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// |L g - g| / |g| for the sampled symmetry mode.
double symmetry_residual(int n);

struct SpectrumReport {
    int n_coarse = 0;
    int n_fine = 0;
    double match_tol = 0.0;
    bool include_potential = true;
    std::vector<std::complex<double>> eigenvalues;       // coarse, sorted by real part descending
    std::vector<bool> resolved;
    std::vector<std::complex<double>> eigenvalues_fine;
    std::vector<std::complex<double>> unstable_list;     // resolved with Re >= 0
    bool has_gap = false;
    double gap = 0.0;  // max Re over resolved eigenvalues other than the one nearest 1
    bool has_unit = false;
    std::complex<double> unit_eigenvalue{0.0, 0.0};
    double unit_separation = 0.0;  // distance to the nearest other resolved eigenvalue
    double symmetry_residual = 0.0;
    double unit_residual = 0.0;    // |A g_h - mu g_h| / |g_h|
    double symmetry_angle = 0.0;   // angle between g_h and the symmetry mode
    Eigen::VectorXd g_h;
    Eigen::VectorXd g_adj;
};

SpectrumReport compute_spectrum(int n_coarse, int n_fine, double match_tol,
                                bool include_potential = true);

struct Projection {
    int n = 0;
    Eigen::VectorXd g_h;
    Eigen::VectorXd g_adj;
    double normalization = 1.0;  // raw pairing before rescaling g_adj
};

/// Requires a resolved eigenvalue within 1e-4 of 1; throws DependencyError otherwise.
Projection export_projection(const SpectrumReport& report);

/// Right eigenvectors of the coarse operator for the resolved eigenvalues (columns).
Eigen::MatrixXcd resolved_eigenvectors(const SpectrumReport& report);

}  // namespace skyrme
