#pragma once

/**
 * @file diagnostics.hpp
 * @brief Weighted radial norms, exponential rate fits and equation residuals.
 */

#include <vector>

#include <Eigen/Dense>

#include "skyrme/collocation.hpp"
#include "skyrme/field.hpp"
#include "skyrme/model_rhs.hpp"

namespace skyrme {

struct NormSpec {
    int k = 0;
    int weight_exponent = 6;
};

inline constexpr int kMaxNormOrder = 5;
inline constexpr int kMaxUniformNormOrder = 2;

/**
 * (sum_{j<=k} int_0^1 |d^j u|^2 rho^w drho)^{1/2} for an even radial function.
 * Uniform grid: nodes j*h on [0, 1], second-order differences, Simpson.
 */
double radial_norm(const std::vector<double>& u, double h, const NormSpec& spec);

/// Collocation version: spectral derivatives and Clenshaw-Curtis weights.
double radial_norm(const Eigen::VectorXd& u, const EvenChebyshev& grid, const NormSpec& spec);

/// Norm of a pair, sqrt(|u1|_k^2 + |u2|_{k-1}^2) with the second order floored at 0.
double pair_norm(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2, const EvenChebyshev& grid,
                 int k);

struct RateFit {
    double exponent = 0.0;   // slope of log(value) in the time variable
    double amplitude = 0.0;
    double residual = 0.0;   // rms of log-residuals
    double t0 = 0.0;
    double t1 = 0.0;
    int n_points = 0;
};

/// Least squares of log(value) against tau over tau in [t0, t1].
RateFit fit_exponential_decay(const std::vector<double>& tau, const std::vector<double>& value,
                              double t0, double t1);

enum class Equation { full, strong_field, semilinear, similarity };

/**
 * Max |residual| of the selected physical equation over nodes 2..n-2 of the
 * middle snapshot.  The three snapshots must be equally spaced in time.  The
 * equations are used in undivided form so a zero field gives exactly zero.
 * The angle-form residuals are also multiplied by r.
 */
double residual_check(const FieldState& prev, const FieldState& cur, const FieldState& next,
                      const RadialGrid& grid, Equation eq, const ModelParams& params);

/**
 * Stationary residual of the strong field similarity system at
 * (psi1, psi2) = (U1, U2) + state (about_profile) or = state.  Requires a
 * uniform rho grid on [0, 1].
 */
double residual_check(const SimilarityState& state, Equation eq, bool about_profile = true);

/// Second-order derivative on a uniform grid starting at 0; parity +1 even, -1 odd.
std::vector<double> fd_derivative(const std::vector<double>& f, double h, int parity);

}  // namespace skyrme
