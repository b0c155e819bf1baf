#include "skyrme/coeffs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "skyrme/errors.hpp"
#include "skyrme/model_rhs.hpp"
#include "skyrme/profile.hpp"

namespace skyrme {

namespace {

void check_rho(double rho) {
    if (!(rho >= 0.0) || rho > 1.0) {
        throw DomainError("coefficients are defined for 0 <= rho <= 1, got " + std::to_string(rho));
    }
}

const ProfileParams& d5() {
    static const ProfileParams p = profile_constants(5);
    return p;
}

double richardson(const std::function<double(double)>& f, double h) {
    const double d1 = (f(h) - f(-h)) / (2.0 * h);
    const double d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
    return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double v1(double rho) {
    check_rho(rho);
    const double r2 = rho * rho;
    const double num = 21.0 * r2 * r2 * r2 - 375.0 * r2 * r2 + 1455.0 * r2 - 2125.0;
    const double a = 5.0 + 3.0 * r2;
    const double b = 5.0 - r2;
    return -5.0 * num / (a * a * b * b);
}

double v2(double rho) {
    check_rho(rho);
    const double r2 = rho * rho;
    return -2.0 * (3.0 * r2 - 35.0) / ((5.0 + 3.0 * r2) * (5.0 - r2));
}

TaylorCoeffs taylor_coeffs(double sigma, double rho) {
    check_rho(rho);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw DomainError("sigma must be finite and >= 0");
    }
    const double r2 = rho * rho;
    const double s2 = sigma * sigma;
    const double a = 5.0 + 3.0 * r2;
    const double b = 5.0 - r2;
    const double D = 64.0 * b + s2 * a * a;
    const double b32 = b * std::sqrt(b);
    const double q = 105.0 - 42.0 * r2 + r2 * r2;
    const double p1 = 64.0 * (27.0 * r2 * r2 * r2 * r2 - 2240.0 * r2 * r2 * r2 + 15550.0 * r2 * r2 -
                              25000.0 * r2 - 625.0);
    const double p2 = a * a * (23.0 * r2 * r2 * r2 - 45.0 * r2 * r2 + 2325.0 * r2 - 5375.0);

    TaylorCoeffs c;
    c.G0 = 20.0 * q / (b32 * D);
    c.dG0_dsigma = -40.0 * a * a * q * sigma / (b32 * D * D);
    c.G1w = -(p1 + s2 * p2) / (b * b * D * D);
    c.G2 = 2.0 * (35.0 - 3.0 * r2) * a / (b * D);
    c.G3w = 50.0 * (1.0 - r2) * a / (b * D);
    return c;
}

double script_G(double z1, double z2, double z3, double sigma, double rho) {
    if (!(rho > 0.0)) throw DomainError("script_G needs rho > 0; use script_G_reduced at the origin");
    const auto [U1, U2] = eval_profile_pair(d5(), rho);
    const NonlinArgs args{rho * U1 + z1, (U2 - U1) + z2, rho * U2 + z3, rho};
    const double gdiff = g_difference(args);
    const double s = std::sin(args.zeta1);
    const double w = 1.0 / (sigma * sigma + 4.0 * s * s / (rho * rho));
    return w * gdiff;
}

double script_G_reduced(double u, double p, double q, double sigma, double rho) {
    const double w = g_lambda_weight_reduced(u, rho, sigma);
    return w * (f_wm_reduced(u, rho) - f_sf_reduced(u, p, q, rho));
}

CoeffTable make_coeff_table(const std::vector<double>& sigma_grid,
                            const std::vector<double>& rho_grid) {
    CoeffTable t;
    t.rho_grid = rho_grid;
    t.sigma_grid = sigma_grid;
    for (double r : rho_grid) {
        t.V1.push_back(v1(r));
        t.V2.push_back(v2(r));
    }
    for (double s : sigma_grid) {
        for (double r : rho_grid) {
            const auto c = taylor_coeffs(s, r);
            t.G0.push_back(c.G0);
            t.dG0_dsigma.push_back(c.dG0_dsigma);
            t.G1w.push_back(c.G1w);
            t.G2.push_back(c.G2);
            t.G3w.push_back(c.G3w);
        }
    }
    return t;
}

CoeffCheckReport verify_coeffs_fd(int n_samples, double tol) {
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    if (n_samples < 1) throw DomainError("n_samples must be positive");

    constexpr double hz = 1e-5;
    constexpr double hs = 1e-6;

    // sigma: 0 plus a log-spaced ladder; rho: uniform on [0, 1].
    const int n_sigma = std::max(2, static_cast<int>(std::ceil(std::sqrt(n_samples / 2.0))));
    const int n_rho = std::max(2, (n_samples + n_sigma - 1) / n_sigma);
    std::vector<double> sigmas{0.0};
    for (int j = 1; j < n_sigma; ++j) {
        sigmas.push_back(std::pow(10.0, -2.0 + 3.0 * (j - 1) / std::max(1, n_sigma - 2)));
    }

    CoeffCheckReport rep;
    auto record = [&](const char* what, double fd, double exact, double s, double r) {
        const double err = std::abs(fd - exact) / std::max(std::abs(exact), kCoeffRelFloor);
        ++rep.n_checks;
        if (err > rep.max_rel_err || !std::isfinite(err)) {
            rep.max_rel_err = std::isfinite(err) ? err : INFINITY;
            rep.worst_quantity = what;
            rep.worst_sigma = s;
            rep.worst_rho = r;
        }
    };

    for (double s : sigmas) {
        for (int i = 0; i < n_rho; ++i) {
            const double r = static_cast<double>(i) / (n_rho - 1);
            ++rep.n_samples;
            const auto c = taylor_coeffs(s, r);
            if (r == 0.0) {
                // Scaled slots: rho * d/dz1 = d/du and rho * d/dz3 = d/dq.
                const double u0 = eval_U_tilde(d5(), 0.0);
                const double q0 = eval_U_prime(d5(), 0.0);
                record("G0", script_G_reduced(u0, 0.0, q0, s, 0.0), c.G0, s, r);
                record("G1w",
                       richardson([&](double e) { return script_G_reduced(u0 + e, 0.0, q0, s, 0.0); }, hz),
                       c.G1w, s, r);
                record("G3w",
                       richardson([&](double e) { return script_G_reduced(u0, 0.0, q0 + e, s, 0.0); }, hz),
                       c.G3w, s, r);
                record("dG0_dsigma",
                       richardson([&](double e) { return script_G_reduced(u0, 0.0, q0, std::abs(s + e), 0.0); }, hs),
                       c.dG0_dsigma, s, r);
                continue;
            }
            record("G0", script_G(0, 0, 0, s, r), c.G0, s, r);
            record("G1w", r * richardson([&](double e) { return script_G(e, 0, 0, s, r); }, hz), c.G1w, s, r);
            record("G2", richardson([&](double e) { return script_G(0, e, 0, s, r); }, hz), c.G2, s, r);
            record("G3w", r * richardson([&](double e) { return script_G(0, 0, e, s, r); }, hz), c.G3w, s, r);
            if (s > 0.0) {
                record("dG0_dsigma", richardson([&](double e) { return script_G(0, 0, 0, s + e, r); }, hs),
                       c.dG0_dsigma, s, r);
            }
            if (s == 0.0) {
                const auto [U1, U2] = eval_profile_pair(d5(), r);
                const NonlinArgs base{r * U1, U2 - U1, r * U2, r};
                auto fx = [&](double e) { auto a = base; a.zeta1 += e; return f_sf(a); };
                auto fy = [&](double e) { auto a = base; a.zeta2 += e; return f_sf(a); };
                record("V1", r * richardson(fx, hz), v1(r), s, r);
                record("V2", -richardson(fy, hz), v2(r), s, r);
            }
        }
    }
    rep.pass = rep.max_rel_err <= tol;
    return rep;
}

}  // namespace skyrme
