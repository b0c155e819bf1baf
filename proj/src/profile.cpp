#include "skyrme/profile.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "skyrme/errors.hpp"

namespace skyrme {

namespace {

constexpr double kEndpointTol = 1e-12;

void check_range(const ProfileParams& p, double rho, double upper) {
    if (!(rho >= 0.0) || rho > upper + kEndpointTol) {
        throw DomainError("profile evaluated at rho = " + std::to_string(rho) +
                          " outside [0, " + std::to_string(upper) + "]");
    }
    (void)p;
}

// 2a - (b-1) rho^2 in factored form so it vanishes exactly at rho*
double inner_factor(const ProfileParams& p, double rho) {
    return (p.b - 1.0) * (p.rho_star - rho) * (p.rho_star + rho);
}

// sqrt((1+b)(2a - (b-1) rho^2)), clamped at the endpoint.
double sine_factor(const ProfileParams& p, double rho) {
    const double inner = inner_factor(p, rho);
    return std::sqrt((1.0 + p.b) * std::max(inner, 0.0));
}

// U'(rho) = U'(0) (1 + e1 rho^2 + e2 rho^4 + ...)
struct SeriesCoeffs {
    double slope0;
    double e1;
    double e2;
};

SeriesCoeffs series(const ProfileParams& p) {
    const double a = p.a;
    const double bm1 = p.b - 1.0;
    return {std::sqrt(2.0 * (1.0 + p.b) / a), bm1 / (4.0 * a) - 1.0 / a,
            1.0 / (a * a) - bm1 / (4.0 * a * a) + 3.0 * bm1 * bm1 / (32.0 * a * a)};
}

}  // namespace

ProfileParams profile_constants(int d) {
    if (d < 5) {
        throw DomainError("profile requires d >= 5 (got d = " + std::to_string(d) + ")");
    }
    ProfileParams p;
    p.d = d;
    if (d == 5) {
        p.a = 5.0 / 3.0;
        p.b = 5.0 / 3.0;
        p.rho_star = std::sqrt(5.0);
        return p;
    }
    const double dm4 = d - 4.0;
    const double dm2 = d - 2.0;
    p.a = (2.0 * dm4 + std::sqrt(3.0 * dm4 * dm2)) / 3.0;
    p.b = 2.0 * std::sqrt(dm4 / (3.0 * dm2)) + 1.0;
    p.rho_star = std::sqrt(2.0 * p.a / (p.b - 1.0));
    return p;
}

double eval_U(const ProfileParams& p, double rho) {
    check_range(p, rho, p.rho_star);
    rho = std::min(rho, p.rho_star);
    // atan2 form of arccos((a - b rho^2)/(a + rho^2)); exact at both endpoints.
    const double c = p.a - p.b * rho * rho;
    const double s = rho * sine_factor(p, rho);
    return std::atan2(s, c);
}

double eval_U_tilde(const ProfileParams& p, double rho) {
    check_range(p, rho, p.rho_star);
    if (rho < kProfileSeriesThreshold) {
        const auto sc = series(p);
        const double r2 = rho * rho;
        return sc.slope0 * (1.0 + sc.e1 * r2 / 3.0 + sc.e2 * r2 * r2 / 5.0);
    }
    return eval_U(p, rho) / rho;
}

double eval_U_prime(const ProfileParams& p, double rho) {
    check_range(p, rho, p.rho_star);
    const double s = sine_factor(p, rho);
    if (s == 0.0) return std::numeric_limits<double>::infinity();
    return 2.0 * p.a * (1.0 + p.b) / ((p.a + rho * rho) * s);
}

double eval_U_second(const ProfileParams& p, double rho) {
    const double up = eval_U_prime(p, rho);
    const double inner = inner_factor(p, rho);
    return up * (-2.0 * rho / (p.a + rho * rho) + (p.b - 1.0) * rho / inner);
}

double eval_U_tilde_prime(const ProfileParams& p, double rho) {
    check_range(p, rho, p.rho_star);
    if (rho < kProfileSeriesThreshold) {
        const auto sc = series(p);
        return sc.slope0 * (2.0 * sc.e1 * rho / 3.0 + 4.0 * sc.e2 * rho * rho * rho / 5.0);
    }
    return (eval_U_prime(p, rho) - eval_U(p, rho) / rho) / rho;
}

std::pair<double, double> eval_profile_pair(const ProfileParams& p, double rho) {
    if (!(rho >= 0.0) || rho > 1.0) {
        throw DomainError("profile pair is defined on the cone 0 <= rho <= 1, got " +
                          std::to_string(rho));
    }
    return {eval_U_tilde(p, rho), eval_U_prime(p, rho)};
}

ProfileValue eval_profile(const ProfileParams& p, double rho) {
    ProfileValue v;
    v.rho = rho;
    v.U = eval_U(p, rho);
    v.U_tilde = eval_U_tilde(p, rho);
    v.U1 = v.U_tilde;
    v.U2 = eval_U_prime(p, rho);
    return v;
}

}  // namespace skyrme
