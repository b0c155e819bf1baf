#include "skyrme/model_rhs.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "skyrme/errors.hpp"
#include "skyrme/profile.hpp"

namespace skyrme {

namespace {

using std::numbers::pi;

// Maclaurin coefficients in powers of x^2, orders x^0 .. x^10.
constexpr std::array<double, 6> kXcot = {1.0, -1.0 / 3, -1.0 / 45, -2.0 / 945, -1.0 / 4725,
                                         -2.0 / 93555};
constexpr std::array<double, 6> kOneMinusXcot = {1.0 / 3,      1.0 / 45,     2.0 / 945,
                                                 1.0 / 4725,   2.0 / 93555,  1382.0 / 638512875};
constexpr std::array<double, 6> kSfCubic = {-5.0 / 3,      19.0 / 45,     -34.0 / 945,
                                            11.0 / 4725,   -26.0 / 467775, 2642.0 / 638512875};
constexpr std::array<double, 6> kWmCubic = {8.0 / 3,        -8.0 / 15,      16.0 / 315,
                                            -8.0 / 2835,    16.0 / 155925,  -16.0 / 6081075};
constexpr std::array<double, 6> kSinc2 = {1.0,         -1.0 / 3,       2.0 / 45,
                                          -1.0 / 315,  2.0 / 14175,    -2.0 / 467775};

double even_series(const std::array<double, 6>& c, double x) {
    const double x2 = x * x;
    double acc = c[5];
    for (int k = 4; k >= 0; --k) acc = acc * x2 + c[k];
    return acc;
}

bool small(double x) { return std::abs(x) < kNonlinSeriesThreshold; }

// Nonzero multiple of pi within 1e-12.
void check_cot_pole(double x) {
    const double k = std::round(x / pi);
    if (k != 0.0 && std::abs(x - k * pi) < 1e-12) {
        throw SingularInputError("cot pole: zeta1 = " + std::to_string(x) +
                                 " is a nonzero multiple of pi");
    }
}

void check_radius(double r) {
    if (!(r > 0.0)) throw DomainError("radius must be positive, got " + std::to_string(r));
}

// sin(2x)/(2x)
double sin2x_over_2x(double x) {
    if (small(x)) {
        const double x2 = x * x;
        return 1.0 - 2.0 * x2 / 3.0 + 2.0 * x2 * x2 / 15.0 - 4.0 * x2 * x2 * x2 / 315.0 +
               2.0 * x2 * x2 * x2 * x2 / 2835.0;
    }
    return std::sin(2.0 * x) / (2.0 * x);
}

}  // namespace

void ModelParams::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0) throw ConfigError("alpha", "must be finite and >= 0");
    if (!std::isfinite(beta) || beta < 0.0) throw ConfigError("beta", "must be finite and >= 0");
    if (!std::isfinite(lambda) || lambda <= 0.0) throw ConfigError("lambda", "must be finite and > 0");
    if (!std::isfinite(T) || T <= 0.0) throw ConfigError("T", "must be finite and > 0");
    if (alpha == 0.0 && beta == 0.0) throw ConfigError("alpha", "alpha and beta cannot both vanish");
    if (model == Model::strong_field && beta == 0.0)
        throw ConfigError("beta", "strong field model needs beta > 0");
}

namespace kernels {

double xcot(double x) {
    if (small(x)) return even_series(kXcot, x);
    return x * std::cos(x) / std::sin(x);
}

double one_minus_xcot(double x) {
    if (small(x)) return even_series(kOneMinusXcot, x);
    return (1.0 - x * std::cos(x) / std::sin(x)) / (x * x);
}

double sf_cubic(double x) {
    if (small(x)) return even_series(kSfCubic, x);
    return (1.5 * std::sin(2.0 * x) - 2.0 * x - x * x * std::cos(x) / std::sin(x)) / (x * x * x);
}

double wm_cubic(double x) {
    if (small(x)) return even_series(kWmCubic, x);
    return (4.0 * x - 2.0 * std::sin(2.0 * x)) / (x * x * x);
}

double sinc2(double x) {
    if (small(x)) return even_series(kSinc2, x);
    const double s = std::sin(x) / x;
    return s * s;
}

}  // namespace kernels

double f_wm(double x, double r) {
    check_radius(r);
    const double s = x / r;
    return kernels::wm_cubic(x) * s * s * s;
}

double f_wm_reduced(double u, double r) {
    if (r < 0.0) throw DomainError("negative radius");
    return kernels::wm_cubic(r * u) * u * u * u;
}

double f_sf(const NonlinArgs& a) {
    check_radius(a.r);
    const double x = a.zeta1;
    check_cot_pole(x);
    const double dq = a.zeta3 * a.zeta3 - a.zeta2 * a.zeta2;
    double t1 = 0.0;
    if (dq != 0.0) {
        if (x == 0.0) throw SingularInputError("cot(0) with zeta3^2 != zeta2^2");
        t1 = -kernels::xcot(x) / x * dq / a.r;
    }
    const double u = x / a.r;
    const double t2 = -2.0 * kernels::one_minus_xcot(x) * u * u * a.zeta2;
    const double t3 = -kernels::sf_cubic(x) * u * u * u;
    return t1 + t2 + t3;
}

double f_sf_reduced(double u, double p, double q, double r) {
    if (r < 0.0) throw DomainError("negative radius");
    const double x = r * u;
    check_cot_pole(x);
    const double dq = q * q - p * p;
    double t1 = 0.0;
    if (dq != 0.0) {
        if (u == 0.0) throw SingularInputError("cot(0) with u_t^2 != u_r^2");
        t1 = -kernels::xcot(x) * dq / u;
    }
    return t1 - 2.0 * u * u * kernels::one_minus_xcot(x) * r * p - u * u * u * kernels::sf_cubic(x);
}

double g_difference(const NonlinArgs& a) { return f_wm(a.zeta1, a.r) - f_sf(a); }

double g_lambda_weight(double zeta1, double r, double lambda) {
    check_radius(r);
    if (lambda < 0.0) throw DomainError("lambda must be >= 0");
    const double s = std::sin(zeta1);
    const double k = std::round(zeta1 / pi);
    if (lambda == 0.0 && std::abs(zeta1 - k * pi) < 1e-12) {
        throw SingularInputError("weight singular: lambda = 0 and sin(zeta1) = 0");
    }
    return 1.0 / (lambda * lambda + 4.0 * s * s / (r * r));
}

double g_lambda_weight_reduced(double u, double r, double lambda) {
    if (r < 0.0) throw DomainError("negative radius");
    if (lambda < 0.0) throw DomainError("lambda must be >= 0");
    const double den = lambda * lambda + 4.0 * u * u * kernels::sinc2(r * u);
    if (!(den > 0.0)) throw SingularInputError("weight singular: lambda = 0 and sin(ru) = 0");
    return 1.0 / den;
}

double sf_weighted_reduced(double u, double p, double q, double r) {
    if (r < 0.0) throw DomainError("negative radius");
    const double x = r * u;
    const double dq = q * q - p * p;
    if (std::abs(x) < 1.0) {
        const double s2 = 4.0 * u * u * kernels::sinc2(x);
        const double rest = -2.0 * u * u * kernels::one_minus_xcot(x) * r * p -
                            u * u * u * kernels::sf_cubic(x);
        return s2 * rest - 4.0 * u * sin2x_over_2x(x) * dq;
    }
    // Away from the origin of x every term is regular once multiplied out.
    const double sx = std::sin(x);
    const double cx = std::cos(x);
    const double y = r * p;
    const double r2 = r * r;
    const double inner = -sx * cx * dq * r -
                         2.0 * (sx * sx - x * sx * cx) * y / r2 -
                         (3.0 * sx * cx * sx * sx - 2.0 * x * sx * sx - x * x * sx * cx) / (r2 * r);
    return 4.0 * inner / r2;
}

double guard_A() {
    static const double value = [] {
        const auto p = profile_constants(5);
        double sup = 0.0;
        constexpr int n = 4000;
        for (int i = 0; i <= n; ++i) {
            const double rho = 2.0 * i / n;
            sup = std::max(sup, eval_U(p, rho));
        }
        return 0.5 * (pi - sup);
    }();
    return value;
}

double simpson(const std::vector<double>& f, double h) {
    const std::size_t n = f.size() - 1;
    if (f.size() < 3) throw ShapeError("simpson needs at least 3 nodes");
    auto panel = [&](std::size_t a, std::size_t b) {
        double acc = f[a] + f[b];
        for (std::size_t i = a + 1; i < b; ++i) acc += (((i - a) % 2) ? 4.0 : 2.0) * f[i];
        return acc * h / 3.0;
    };
    if (n % 2 == 0) return panel(0, n);
    if (n < 3) throw ShapeError("simpson needs at least 3 intervals for odd counts");
    const double tail = 3.0 * h / 8.0 * (f[n - 3] + 3.0 * f[n - 2] + 3.0 * f[n - 1] + f[n]);
    return (n - 3 > 0 ? panel(0, n - 3) : 0.0) + tail;
}

Energies energies(const FieldState& state, const RadialGrid& grid, const ModelParams& params,
                  int d) {
    const std::size_t m = grid.size();
    if (state.value.size() != m || state.rate.size() != m) {
        throw ShapeError("field size does not match grid");
    }
    const double h = grid.spacing;
    std::vector<double> psi(m), pt(m), pr(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double r = grid.nodes[i];
        const double v = state.value[i];
        const double w = state.rate[i];
        if (!std::isfinite(v) || !std::isfinite(w)) {
            throw DataError("non-finite field value at node " + std::to_string(i));
        }
        psi[i] = state.form == FieldForm::reduced ? r * v : v;
        pt[i] = state.form == FieldForm::reduced ? r * w : w;
    }
    pr[0] = psi[1] / h;
    for (std::size_t i = 1; i + 1 < m; ++i) pr[i] = (psi[i + 1] - psi[i - 1]) / (2.0 * h);
    pr[m - 1] = (3.0 * psi[m - 1] - 4.0 * psi[m - 2] + psi[m - 3]) / (2.0 * h);

    std::vector<double> f2(m, 0.0), f4(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) {
        const double r = grid.nodes[i];
        const double s2 = std::sin(psi[i]) * std::sin(psi[i]);
        const double kin = pt[i] * pt[i] + pr[i] * pr[i];
        f2[i] = 0.5 * (kin + (d - 1) * s2 / (r * r)) * std::pow(r, d - 1);
        f4[i] = 0.5 * (d - 1) * s2 * (kin + 0.5 * (d - 2) * s2 / (r * r)) * std::pow(r, d - 3);
    }
    Energies e;
    e.E2 = simpson(f2, h);
    e.E4 = simpson(f4, h);
    e.E = params.alpha_eff() * e.E2 + params.beta * e.E4;
    return e;
}

RadialGrid RadialGrid::uniform(double r_max, int n) {
    if (!(r_max > 0.0)) throw DomainError("r_max must be positive");
    if (n < 4) throw DomainError("grid needs at least 4 cells");
    RadialGrid g;
    g.r_max = r_max;
    g.n = n;
    g.spacing = r_max / n;
    g.nodes.resize(n + 1);
    for (int i = 0; i <= n; ++i) g.nodes[i] = i * g.spacing;
    return g;
}

}  // namespace skyrme
