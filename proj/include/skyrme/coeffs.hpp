#pragma once

/**
 * @file coeffs.hpp
 * @brief Linearization potentials V1, V2 and first-order Taylor coefficients
 *        of the lambda-correction nonlinearity around the d = 5 profile.
 *
 * G1w and G3w are the |xi|-weighted coefficients; the raw G1, G3 carry a
 * removable 1/|xi| and are not exposed.
 */

#include <string>
#include <vector>

namespace skyrme {

double v1(double rho);
double v2(double rho);

struct TaylorCoeffs {
    double G0 = 0.0;
    double dG0_dsigma = 0.0;
    double G1w = 0.0;
    double G2 = 0.0;
    double G3w = 0.0;
};

/// Requires sigma >= 0 and 0 <= rho <= 1.
TaylorCoeffs taylor_coeffs(double sigma, double rho);

/**
 * Correction nonlinearity around the profile,
 *   g(rho U1 + z1, sigma, rho) * G(rho U1 + z1, Lambda U1 + z2, rho U2 + z3, rho),
 * with g = (sigma^2 + 4 sin^2(x)/rho^2)^-1 and G = f_WM - f_SF.  Requires rho > 0.
 */
double script_G(double z1, double z2, double z3, double sigma, double rho);

/// Same quantity from u-variables (u = psi1, p = d psi1/drho, q = psi2); valid at rho = 0.
double script_G_reduced(double u, double p, double q, double sigma, double rho);

struct CoeffTable {
    std::vector<double> rho_grid;
    std::vector<double> sigma_grid;
    std::vector<double> V1, V2;
    // row-major, sigma index outer
    std::vector<double> G0, dG0_dsigma, G1w, G2, G3w;
};

CoeffTable make_coeff_table(const std::vector<double>& sigma_grid,
                            const std::vector<double>& rho_grid);

struct CoeffCheckReport {
    double max_rel_err = 0.0;
    int n_samples = 0;
    int n_checks = 0;
    bool pass = false;
    std::string worst_quantity;
    double worst_sigma = 0.0;
    double worst_rho = 0.0;
};

/// Error is |fd - exact| / max(|exact|, floor) for a coefficient-scale floor.
inline constexpr double kCoeffRelFloor = 1e-4;

/**
 * Compare V1, V2 and the Taylor coefficients with Richardson-extrapolated
 * central differences of f_SF and script_G on a deterministic (sigma, rho)
 * sample set of at least n_samples points.
 */
CoeffCheckReport verify_coeffs_fd(int n_samples, double tol);

}  // namespace skyrme
