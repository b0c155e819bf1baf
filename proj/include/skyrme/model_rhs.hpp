#pragma once

/**
 * @file model_rhs.hpp
 * @brief Nonlinearities of the semilinear 7D reformulation and the energy
 *        functionals of the radial Skyrme model.
 *
 * With x = r u, y = r u_r, z = r u_t the strong field nonlinearity is
 *
 *   f_SF = -cot(x)(z^2 - y^2)/r - 2(1 - x cot x) y/r^2
 *          - (3/2 sin 2x - 2x - x^2 cot x)/r^3
 *
 * and f_WM = (4x - 2 sin 2x)/r^3.  The "reduced" entry points take (u, u_r,
 * u_t, r) instead and stay finite as r -> 0.
 */

#include "skyrme/field.hpp"

namespace skyrme {

enum class Model { full, strong_field, semilinear };

struct ModelParams {
    double alpha = 1.0;
    double beta = 1.0;
    double lambda = 1.0;
    Model model = Model::full;
    double T = 1.0;

    /// Throws ConfigError on a violated invariant.
    void validate() const;

    /// Coefficient of the wave-maps part in the lambda-rescaled equation.
    double alpha_eff() const { return model == Model::strong_field ? 0.0 : alpha * lambda * lambda; }
};

struct NonlinArgs {
    double zeta1 = 0.0;  // r u
    double zeta2 = 0.0;  // r u_r
    double zeta3 = 0.0;  // r u_t
    double r = 1.0;
};

inline constexpr double kNonlinSeriesThreshold = 1e-2;

/// Even functions of x used to build the nonlinearities; each switches to a
/// Maclaurin series for |x| < kNonlinSeriesThreshold.
namespace kernels {
double xcot(double x);          // x cot x
double one_minus_xcot(double x);// (1 - x cot x)/x^2
double sf_cubic(double x);      // (3/2 sin 2x - 2x - x^2 cot x)/x^3
double wm_cubic(double x);      // (4x - 2 sin 2x)/x^3
double sinc2(double x);         // (sin x / x)^2
}  // namespace kernels

double f_wm(double x, double r);
double f_sf(const NonlinArgs& args);
double g_difference(const NonlinArgs& args);
double g_lambda_weight(double zeta1, double r, double lambda);

/// u-variable forms, finite at r = 0.
double f_wm_reduced(double u, double r);
double f_sf_reduced(double u, double p, double q, double r);
double g_lambda_weight_reduced(double u, double r, double lambda);

/// (4 sin^2(ru)/r^2) * f_SF(ru, r p, r q, r); regular also where u = 0.
double sf_weighted_reduced(double u, double p, double q, double r);

/// Domain guard A = (pi - sup_{[0,2]} rho U1) / 2 for the correction nonlinearity.
double guard_A();

struct Energies {
    double E2 = 0.0;
    double E4 = 0.0;
    double E = 0.0;
};

/**
 * Simpson quadrature of E2, E4 with weight r^{d-1} on the state's grid.
 * E = alpha_eff E2 + beta E4.  Gradients are second-order finite differences,
 * odd extension at the origin.
 */
Energies energies(const FieldState& state, const RadialGrid& grid, const ModelParams& params,
                  int d = 5);

/// Composite Simpson on a uniform grid (3/8 rule on the last panel for odd n).
double simpson(const std::vector<double>& f, double h);

}  // namespace skyrme
