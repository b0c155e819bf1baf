#include "skyrme/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skyrme/errors.hpp"
#include "skyrme/profile.hpp"

namespace skyrme {

namespace {

void check_order(int k, int limit) {
    if (k < 0 || k > limit) {
        throw OrderError("norm order " + std::to_string(k) + " outside supported range [0, " +
                         std::to_string(limit) + "]");
    }
}

void check_finite(const double* v, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(v[i])) throw DataError("non-finite value in norm input");
    }
}

}  // namespace

std::vector<double> fd_derivative(const std::vector<double>& f, double h, int parity) {
    const std::size_t n = f.size();
    if (n < 3) throw ShapeError("derivative needs at least 3 nodes");
    std::vector<double> d(n);
    const double ghost = parity > 0 ? f[1] : -f[1];
    d[0] = (f[1] - ghost) / (2.0 * h);
    for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

double radial_norm(const std::vector<double>& u, double h, const NormSpec& spec) {
    check_order(spec.k, kMaxUniformNormOrder);
    check_finite(u.data(), u.size());
    std::vector<double> w(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) w[i] = std::pow(i * h, spec.weight_exponent);
    double total = 0.0;
    std::vector<double> d = u;
    int parity = 1;
    for (int j = 0; j <= spec.k; ++j) {
        if (j > 0) {
            d = fd_derivative(d, h, parity);
            parity = -parity;
        }
        std::vector<double> f(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) f[i] = d[i] * d[i] * w[i];
        total += simpson(f, h);
    }
    return std::sqrt(total);
}

double radial_norm(const Eigen::VectorXd& u, const EvenChebyshev& grid, const NormSpec& spec) {
    check_order(spec.k, kMaxNormOrder);
    if (u.size() != grid.size()) throw ShapeError("norm input does not match collocation grid");
    check_finite(u.data(), static_cast<std::size_t>(u.size()));
    const Eigen::VectorXd w = grid.weights.cwiseProduct(grid.rho.array().pow(spec.weight_exponent).matrix());
    double total = 0.0;
    Eigen::VectorXd d = u;
    bool odd = false;
    for (int j = 0; j <= spec.k; ++j) {
        if (j > 0) {
            d = odd ? Eigen::VectorXd(grid.D_odd * d) : Eigen::VectorXd(grid.D * d);
            odd = !odd;
        }
        total += w.dot(d.cwiseAbs2());
    }
    return std::sqrt(total);
}

double pair_norm(const Eigen::VectorXd& u1, const Eigen::VectorXd& u2, const EvenChebyshev& grid,
                 int k) {
    const double a = radial_norm(u1, grid, {k, 6});
    const double b = radial_norm(u2, grid, {std::max(0, k - 1), 6});
    return std::sqrt(a * a + b * b);
}

RateFit fit_exponential_decay(const std::vector<double>& tau, const std::vector<double>& value,
                              double t0, double t1) {
    if (tau.size() != value.size()) throw ShapeError("series lengths differ");
    if (!(t1 > t0)) throw FitError("empty fit window");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < t0 || tau[i] > t1) continue;
        if (!(value[i] > 0.0) || !std::isfinite(value[i])) {
            throw FitError("nonpositive value at tau = " + std::to_string(tau[i]));
        }
        const double y = std::log(value[i]);
        pts.emplace_back(tau[i], y);
        sx += tau[i];
        sy += y;
        sxx += tau[i] * tau[i];
        sxy += tau[i] * y;
        ++n;
    }
    if (n < 2) throw FitError("fewer than two points in the fit window");
    const double mx = sx / n;
    const double my = sy / n;
    const double vxx = sxx / n - mx * mx;
    if (!(vxx > 0.0)) throw FitError("degenerate fit window");
    RateFit fit;
    fit.exponent = (sxy / n - mx * my) / vxx;
    const double intercept = my - fit.exponent * mx;
    fit.amplitude = std::exp(intercept);
    double ss = 0.0;
    for (const auto& [x, y] : pts) {
        const double e = y - (intercept + fit.exponent * x);
        ss += e * e;
    }
    fit.residual = std::sqrt(ss / n);
    fit.t0 = pts.front().first;
    fit.t1 = pts.back().first;
    fit.n_points = n;
    return fit;
}

double residual_check(const FieldState& prev, const FieldState& cur, const FieldState& next,
                      const RadialGrid& grid, Equation eq, const ModelParams& params) {
    if (eq == Equation::similarity) throw ShapeError("similarity equation needs a similarity state");
    const FieldForm want = eq == Equation::semilinear ? FieldForm::reduced : FieldForm::angle;
    for (const FieldState* s : {&prev, &cur, &next}) {
        if (s->form != want) throw ShapeError("field form does not match the selected equation");
        if (s->value.size() != grid.size()) throw ShapeError("field size does not match grid");
    }
    const double dt = cur.t - prev.t;
    if (!(dt > 0.0) || std::abs((next.t - cur.t) - dt) > 1e-9 * std::max(1.0, dt)) {
        throw ShapeError("snapshots must be equally spaced in time");
    }
    const double h = grid.spacing;
    const double a = params.alpha_eff();
    const double b = params.beta;
    const std::size_t n = grid.size() - 1;
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 <= n; ++i) {
        const double r = grid.nodes[i];
        const double f = cur.value[i];
        const double ft = (next.value[i] - prev.value[i]) / (2.0 * dt);
        const double ftt = (next.value[i] - 2.0 * f + prev.value[i]) / (dt * dt);
        const double fr = (cur.value[i + 1] - cur.value[i - 1]) / (2.0 * h);
        const double frr = (cur.value[i + 1] - 2.0 * f + cur.value[i - 1]) / (h * h);
        double res = 0.0;
        if (eq == Equation::semilinear) {
            const double lap = frr + 6.0 / r * fr;
            const double w = 4.0 * f * f * kernels::sinc2(r * f);
            res = (a + b * w) * (ftt - lap) - b * sf_weighted_reduced(f, fr, ft, r) -
                  a * f_wm_reduced(f, r);
        } else {
            const double s = std::sin(f);
            const double s2 = s * s / (r * r);
            const double s2f = std::sin(2.0 * f) / (2.0 * r * r);
            if (eq == Equation::strong_field) {
                res = s2 * (ftt - frr - 2.0 / r * fr) + s2f * (ft * ft - fr * fr + 3.0 * s2);
            } else {
                res = (a + 4.0 * b * s2) * (ftt - frr) - 4.0 / r * (a + 2.0 * b * s2) * fr +
                      4.0 * s2f * (a + b * (ft * ft - fr * fr + 3.0 * s2));
            }
            // the 1/r coefficients would leave an O(h^2/r) truncation next to the origin
            res *= r;
        }
        worst = std::max(worst, std::abs(res));
    }
    return worst;
}

double residual_check(const SimilarityState& state, Equation eq, bool about_profile) {
    if (eq != Equation::similarity) throw ShapeError("similarity state needs the similarity equation");
    const std::size_t m = state.rho.size();
    if (m < 5 || state.phi1.size() != m || state.phi2.size() != m) {
        throw ShapeError("similarity state arrays inconsistent");
    }
    const double h = state.rho[1] - state.rho[0];
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(state.rho[i] - i * h) > 1e-12) throw ShapeError("residual needs a uniform rho grid");
    }
    const auto p = profile_constants(5);
    std::vector<double> a(m), b(m);
    for (std::size_t i = 0; i < m; ++i) {
        a[i] = state.phi1[i];
        b[i] = state.phi2[i];
        if (about_profile) {
            const auto [U1, U2] = eval_profile_pair(p, std::min(state.rho[i], 1.0));
            a[i] += U1;
            b[i] += U2;
        }
    }
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < m; ++i) {
        const double r = state.rho[i];
        const double a1 = (a[i + 1] - a[i - 1]) / (2.0 * h);
        const double a2 = (a[i + 1] - 2.0 * a[i] + a[i - 1]) / (h * h);
        const double b1 = (b[i + 1] - b[i - 1]) / (2.0 * h);
        const double r1 = -r * a1 - a[i] + b[i];
        const double fsf = f_sf_reduced(a[i], a1, b[i], r);
        const double r2 = a2 + 6.0 / r * a1 - r * b1 - 2.0 * b[i] + fsf;
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return worst;
}

}  // namespace skyrme
