#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "skyrme/errors.hpp"
#include "skyrme/model_rhs.hpp"
#include "skyrme/physical.hpp"

using namespace skyrme;
using doctest::Approx;

namespace {

using ld = long double;

ld sf_direct(ld x) { return (1.5L * std::sin(2 * x) - 2 * x - x * x * std::cos(x) / std::sin(x)) / (x * x * x); }
ld wm_direct(ld x) { return (4 * x - 2 * std::sin(2 * x)) / (x * x * x); }
ld xcot_direct(ld x) { return x * std::cos(x) / std::sin(x); }

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("wave-map nonlinearity values") {
    CHECK(f_wm(0.0, 1.0) == 0.0);
    CHECK(f_wm(M_PI / 2, 1.0) == Approx(2 * M_PI).epsilon(1e-14));
    CHECK(rel(f_wm(1e-4, 1e-4), 8.0 / 3.0) <= 1e-6);
    CHECK_THROWS_AS(f_wm(0.1, 0.0), DomainError);
    CHECK_THROWS_AS(f_wm(0.1, -1.0), DomainError);
}

TEST_CASE("strong-field nonlinearity values") {
    CHECK(f_sf({M_PI / 2, 0.0, 0.0, 1.0}) == Approx(M_PI).epsilon(1e-14));
    const double x = 1e-3;
    CHECK(rel(f_sf({x, 0.0, 0.0, 1.0}), 5.0 / 3.0 * x * x * x) <= 1e-6);
}

TEST_CASE("equal gradient slots remove the cotangent term") {
    for (double s : {0.0, 0.3, -1.7, 4.0}) {
        const double a = f_sf({0.8, s, s, 0.6});
        const double b = f_sf({0.8, s, -s, 0.6});
        CHECK(a == Approx(b).epsilon(1e-15));
    }
    // at zeta1 = 0 the cotangent is only harmless when that term vanishes
    CHECK_NOTHROW(f_sf({0.0, 0.5, 0.5, 1.0}));
    CHECK_THROWS_AS(f_sf({0.0, 0.5, 0.2, 1.0}), SingularInputError);
}

TEST_CASE("cotangent poles are rejected") {
    CHECK_THROWS_AS(f_sf({M_PI, 0.1, 0.2, 1.0}), SingularInputError);
    CHECK_THROWS_AS(f_sf({-2 * M_PI + 1e-14, 0.1, 0.2, 1.0}), SingularInputError);
    CHECK_THROWS_AS(f_sf({0.3, 0.1, 0.2, 0.0}), DomainError);
}

TEST_CASE("difference nonlinearity") {
    CHECK(g_difference({M_PI / 2, 0.0, 0.0, 1.0}) == Approx(M_PI).epsilon(1e-14));
    for (double r : {1e-6, 0.1, 1.0, 30.0}) CHECK(g_difference({0.0, 0.0, 0.0, r}) == 0.0);
    const double r = 1e-4;
    CHECK(rel(g_difference({r * 1.0, 0.0, 0.0, r}), 1.0) <= 1e-6);
}

TEST_CASE("difference nonlinearity has a bounded slope at zero") {
    double prev = NAN;
    for (double h = 1e-2; h >= 1e-6; h /= 10) {
        const double d = (g_difference({h, 0.0, 0.0, 1.0}) - g_difference({-h, 0.0, 0.0, 1.0})) / (2 * h);
        CHECK(std::isfinite(d));
        CHECK(std::abs(d) <= 1.0);
        prev = d;
    }
    CHECK(std::abs(prev) <= 1e-9);
}

TEST_CASE("lambda weight values") {
    CHECK(g_lambda_weight(M_PI / 2, 1.0, 0.0) == Approx(0.25).epsilon(1e-15));
    CHECK(g_lambda_weight(0.0, 1.0, 2.0) == Approx(0.25).epsilon(1e-15));
    const double r = 1e-7;
    CHECK(g_lambda_weight(r * 1.0, r, 1.0) == Approx(0.2).epsilon(1e-10));
    CHECK_THROWS_AS(g_lambda_weight(0.0, 1.0, 0.0), SingularInputError);
    CHECK_THROWS_AS(g_lambda_weight(M_PI, 1.0, 0.0), SingularInputError);
    CHECK_THROWS_AS(g_lambda_weight(0.3, 1.0, -1.0), DomainError);
}

TEST_CASE("lambda weight is positive and decreasing in lambda") {
    for (double z : {-2.0, -0.1, 0.0, 0.4, 1.5, 3.0}) {
        for (double r : {0.01, 0.5, 2.0}) {
            double prev = INFINITY;
            for (double lam : {0.01, 0.1, 0.5, 1.0, 4.0}) {
                const double w = g_lambda_weight(z, r, lam);
                CHECK(w > 0.0);
                CHECK(w < prev);
                prev = w;
            }
        }
    }
}

TEST_CASE("series and direct kernels agree across the switch") {
    for (double x = 1e-3; x <= 1e-1; x *= 1.05) {
        CHECK(rel(kernels::sf_cubic(x), static_cast<double>(sf_direct(x))) <= 1e-9);
        CHECK(rel(kernels::wm_cubic(x), static_cast<double>(wm_direct(x))) <= 1e-9);
        CHECK(rel(kernels::xcot(x), static_cast<double>(xcot_direct(x))) <= 1e-9);
        CHECK(rel(kernels::sinc2(x), static_cast<double>(std::pow(std::sin((ld)x) / x, 2))) <= 1e-9);
    }
}

TEST_CASE("reduced forms match the angle forms") {
    const double u = 0.9, p = -0.3, q = 0.7, r = 0.4;
    const double z1 = r * u, z2 = r * p, z3 = r * q;
    CHECK(f_wm_reduced(u, r) == Approx(f_wm(z1, r)).epsilon(1e-13));
    CHECK(f_sf_reduced(u, p, q, r) == Approx(f_sf({z1, z2, z3, r})).epsilon(1e-13));
    CHECK(g_lambda_weight_reduced(u, r, 0.3) == Approx(g_lambda_weight(z1, r, 0.3)).epsilon(1e-13));
    CHECK(g_lambda_weight_reduced(1.0, 0.0, 1.0) == Approx(0.2).epsilon(1e-15));
}

TEST_CASE("guard radius") {
    CHECK(guard_A() == Approx(0.244979).epsilon(1e-5));
    CHECK(guard_A() > 0.0);
}

TEST_CASE("model parameter validation") {
    ModelParams p;
    CHECK_NOTHROW(p.validate());
    p.alpha = 0.0;
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.lambda = -1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.model = Model::strong_field;
    CHECK(p.alpha_eff() == 0.0);
    p.beta = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("energies of the zero field vanish") {
    const auto g = RadialGrid::uniform(1.0, 64);
    FieldState s;
    s.value.assign(g.size(), 0.0);
    s.rate.assign(g.size(), 0.0);
    const auto e = energies(s, g, ModelParams{});
    CHECK(e.E2 == 0.0);
    CHECK(e.E4 == 0.0);
    CHECK(e.E == 0.0);
}

TEST_CASE("total energy is assembled from its parts") {
    const auto g = RadialGrid::uniform(3.0, 300);
    FieldState s;
    for (double r : g.nodes) {
        s.value.push_back(2.0 * r * std::exp(-r * r));
        s.rate.push_back(0.3 * r * r * std::exp(-r * r));
    }
    ModelParams p;
    p.alpha = 0.7;
    p.beta = 1.3;
    p.lambda = 0.9;
    const auto e = energies(s, g, p);
    CHECK(e.E == p.alpha_eff() * e.E2 + p.beta * e.E4);
}

TEST_CASE("non-finite fields are rejected") {
    const auto g = RadialGrid::uniform(1.0, 64);
    FieldState s;
    s.value.assign(g.size(), 0.0);
    s.rate.assign(g.size(), 0.0);
    s.value[10] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(energies(s, g, ModelParams{}), DataError);
}

TEST_CASE("energy rescaling law in five dimensions") {
    const double mu = 1.5, R = 12.0;
    const auto psi = [](double r) { return 2.5 * r * std::exp(-r * r); };
    const auto psit = [](double r) { return 0.4 * r * r * std::exp(-r * r); };
    ModelParams p;
    // mismatch of the scaled energies; gradients are second-order differences
    auto mismatch = [&](int n) {
        const auto g = RadialGrid::uniform(R, n);
        FieldState a, b;
        for (double r : g.nodes) {
            a.value.push_back(psi(r));
            a.rate.push_back(psit(r));
            b.value.push_back(psi(r / mu));
            b.rate.push_back(psit(r / mu) / mu);
        }
        const auto ea = energies(a, g, p);
        const auto eb = energies(b, g, p);
        const double want = p.alpha * mu * mu * mu * ea.E2 + p.beta * mu * ea.E4;
        return std::max({std::abs(eb.E2 / (mu * mu * mu * ea.E2) - 1.0), std::abs(eb.E4 / (mu * ea.E4) - 1.0),
                         std::abs(eb.E / want - 1.0)});
    };
    const double m1 = mismatch(2400), m2 = mismatch(4800);
    CHECK(m2 <= 1e-5);
    CHECK(m1 / m2 >= 3.5);
}

TEST_CASE("quartic energy of the self-similar solution scales with T - t") {
    ModelParams p;
    p.model = Model::strong_field;
    double prev = NAN;
    for (double t : {0.0, 0.5, 0.75}) {
        const auto g = RadialGrid::uniform(1.0 - t, 4000);
        const auto s = self_similar_state(g, t, 1.0, FieldForm::angle);
        const double e4 = energies(s, g, p).E4 / (1.0 - t);
        CHECK(std::isfinite(e4));
        CHECK(e4 > 0.0);
        if (!std::isnan(prev)) CHECK(e4 == Approx(prev).epsilon(1e-6));
        prev = e4;
    }
}

TEST_CASE("simpson integrates cubics exactly") {
    const int n = 10;
    const double h = 1.0 / n;
    std::vector<double> f;
    for (int i = 0; i <= n; ++i) f.push_back(std::pow(i * h, 3));
    CHECK(simpson(f, h) == Approx(0.25).epsilon(1e-14));
    f.push_back(std::pow(1.1, 3));
    CHECK(simpson(f, h) == Approx(std::pow(1.1, 4) / 4).epsilon(1e-13));
    CHECK_THROWS_AS(simpson({1.0, 2.0}, 0.1), ShapeError);
}
