#pragma once

/**
 * @file profile.hpp
 * @brief Closed-form self-similar blowup profile of the co-rotational strong
 *        field Skyrme model.
 *
 *   U(rho) = arccos((a - b rho^2) / (a + rho^2)),   0 <= rho <= rho_star,
 *
 * with a = (2(d-4) + sqrt(3(d-4)(d-2)))/3, b = 2 sqrt((d-4)/(3(d-2))) + 1 and
 * rho_star = sqrt(2a/(b-1)).  U(0) = 0 and U(rho_star) = pi.  In similarity
 * variables the profile pair is U1 = U/rho and U2 = (1 + rho d/drho) U1 = U'.
 */

#include <utility>

namespace skyrme {

struct ProfileParams {
    int d = 5;
    double a = 0.0;
    double b = 0.0;
    double rho_star = 0.0;
};

struct ProfileValue {
    double rho = 0.0;
    double U = 0.0;
    double U_tilde = 0.0;
    double U1 = 0.0;
    double U2 = 0.0;
};

/// Throws DomainError for d < 5.
ProfileParams profile_constants(int d);

/// Rho below which U/rho and its derivative are evaluated from the Maclaurin series.
inline constexpr double kProfileSeriesThreshold = 1e-2;

double eval_U(const ProfileParams& p, double rho);
double eval_U_tilde(const ProfileParams& p, double rho);

/// (U1, U2) on the similarity cone 0 <= rho <= 1.
std::pair<double, double> eval_profile_pair(const ProfileParams& p, double rho);

double eval_U_prime(const ProfileParams& p, double rho);
double eval_U_second(const ProfileParams& p, double rho);

/// d/drho of U/rho, smooth through the origin.
double eval_U_tilde_prime(const ProfileParams& p, double rho);

/// Full record at one radius; requires rho <= rho_star.
ProfileValue eval_profile(const ProfileParams& p, double rho);

}  // namespace skyrme
