#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "skyrme/errors.hpp"
#include "skyrme/physical.hpp"

using namespace skyrme;
using doctest::Approx;

namespace {

ModelParams strong_field() {
    ModelParams p;
    p.model = Model::strong_field;
    return p;
}

FieldState zeros(const RadialGrid& g, FieldForm form) {
    FieldState s;
    s.form = form;
    s.value.assign(g.size(), 0.0);
    s.rate.assign(g.size(), 0.0);
    return s;
}

// Max error against the exact solution inside the cone over the landed snapshots.
double cone_error(const Trajectory& tr, const RadialGrid& g, FieldForm form) {
    double err = 0.0;
    for (const auto& s : tr.snapshots) {
        const auto ex = self_similar_state(g, s.t, 1.0, form);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.nodes[i] <= 1.0 - s.t) err = std::max(err, std::abs(s.value[i] - ex.value[i]));
        }
    }
    return err;
}

}  // namespace

TEST_CASE("uniform radial grid") {
    const auto g = RadialGrid::uniform(1.05, 105);
    CHECK(g.size() == 106);
    CHECK(g.nodes.front() == 0.0);
    CHECK(g.nodes.back() == Approx(1.05).epsilon(1e-15));
    CHECK(g.spacing == Approx(0.01).epsilon(1e-15));
    CHECK_THROWS_AS(RadialGrid::uniform(0.0, 64), DomainError);
}

TEST_CASE("zero data stays zero") {
    const auto g = RadialGrid::uniform(1.0, 64);
    const auto a = evolve_physical(ModelParams{}, g, zeros(g, FieldForm::angle), 0.5);
    CHECK(a.stop_reason == "t_end");
    for (double v : a.final_state.value) CHECK(v == 0.0);
    const auto b = evolve_semilinear(ModelParams{}, g, zeros(g, FieldForm::reduced), 0.5);
    for (double v : b.final_state.value) CHECK(v == 0.0);
    for (double v : b.final_state.rate) CHECK(v == 0.0);
}

TEST_CASE("strong-field principal part degenerates on zero data") {
    const auto g = RadialGrid::uniform(1.0, 64);
    CHECK_THROWS_AS(evolve_physical(strong_field(), g, zeros(g, FieldForm::angle), 0.5), DegeneracyError);
    CHECK_THROWS_AS(evolve_semilinear(strong_field(), g, zeros(g, FieldForm::reduced), 0.5), DegeneracyError);
}

TEST_CASE("bad controls and inputs are rejected") {
    const auto g = RadialGrid::uniform(1.05, 64);
    const auto s = self_similar_state(g, 0.0, 1.0, FieldForm::angle);
    EvolveControls c;
    c.cfl = 0.0;
    CHECK_THROWS_AS(evolve_physical(ModelParams{}, g, s, 0.1, c), StabilityError);
    c.cfl = 1.5;
    CHECK_THROWS_AS(evolve_physical(ModelParams{}, g, s, 0.1, c), StabilityError);
    c = {};
    c.dissipation = 2.0;
    CHECK_THROWS_AS(evolve_physical(ModelParams{}, g, s, 0.1, c), StabilityError);
    CHECK_THROWS_AS(evolve_semilinear(ModelParams{}, g, s, 0.1), ShapeError);
    ModelParams semi;
    semi.model = Model::semilinear;
    CHECK_THROWS_AS(evolve_physical(semi, g, s, 0.1), ShapeError);
    auto bad = s;
    bad.value[3] = NAN;
    CHECK_THROWS_AS(evolve_physical(ModelParams{}, g, bad, 0.1), DataError);
    CHECK_THROWS_AS(self_similar_state(g, 1.0, 1.0, FieldForm::angle), DomainError);
}

TEST_CASE("strong-field run tracks the exact solution at second order") {
    std::vector<double> errs;
    for (int n : {128, 256, 512}) {
        const auto g = RadialGrid::uniform(1.05, n);
        EvolveControls c;
        c.output_times = {0.1, 0.2, 0.3, 0.4, 0.5};
        const auto tr = evolve_physical(strong_field(), g, self_similar_state(g, 0.0, 1.0, FieldForm::angle), 0.5, c);
        REQUIRE(tr.snapshots.size() == 5);
        errs.push_back(cone_error(tr, g, FieldForm::angle));
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.125));
    CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.125));
}

TEST_CASE("reduced strong-field run reproduces the rescaled profile") {
    std::vector<double> errs;
    for (int n : {128, 256}) {
        const auto g = RadialGrid::uniform(1.05, n);
        EvolveControls c;
        c.output_times = {0.25, 0.5};
        const auto tr =
            evolve_semilinear(strong_field(), g, self_similar_state(g, 0.0, 1.0, FieldForm::reduced), 0.5, c);
        errs.push_back(cone_error(tr, g, FieldForm::reduced));
        CHECK(errs.back() <= 5.0 * g.spacing * g.spacing);
    }
    CHECK(errs[0] / errs[1] > 3.0);
}

TEST_CASE("reduced run times r matches the angle run") {
    ModelParams full;
    const auto g = RadialGrid::uniform(1.05, 256);
    EvolveControls c;
    c.output_times = {0.25, 0.5};
    const auto a = evolve_physical(full, g, self_similar_state(g, 0.0, 1.0, FieldForm::angle), 0.5, c);
    const auto b = evolve_semilinear(full, g, self_similar_state(g, 0.0, 1.0, FieldForm::reduced), 0.5, c);
    double err = 0.0;
    for (int k = 0; k < 2; ++k) {
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.nodes[i] <= 1.0 - a.snapshots[k].t) {
                err = std::max(err, std::abs(g.nodes[i] * b.snapshots[k].value[i] - a.snapshots[k].value[i]));
            }
        }
    }
    CHECK(err <= 5.0 * g.spacing * g.spacing);
}

TEST_CASE("lambda rescaling maps runs onto each other") {
    // lambda = 1/2 with data U(r/2) against lambda = 1 with data U(r) on the half-size grid
    const int n = 256;
    const auto ga = RadialGrid::uniform(1.05, n);
    const auto gb = RadialGrid::uniform(0.525, n);
    ModelParams pa;
    pa.lambda = 0.5;
    ModelParams pb;
    EvolveControls ca, cb;
    ca.output_times = {0.4};
    cb.output_times = {0.2};
    const auto a = evolve_physical(pa, ga, self_similar_state(ga, 0.0, 2.0, FieldForm::angle), 0.4, ca);
    const auto b = evolve_physical(pb, gb, self_similar_state(gb, 0.0, 1.0, FieldForm::angle), 0.2, cb);
    REQUIRE(a.snapshots.size() == 1);
    REQUIRE(b.snapshots.size() == 1);
    double dv = 0.0, dr = 0.0;
    for (std::size_t i = 0; i < ga.size(); ++i) {
        dv = std::max(dv, std::abs(a.snapshots[0].value[i] - b.snapshots[0].value[i]));
        dr = std::max(dr, std::abs(2.0 * a.snapshots[0].rate[i] - b.snapshots[0].rate[i]));
    }
    CHECK(dv <= 1e-10);
    CHECK(dr <= 1e-9);
}

TEST_CASE("perturbations outside r0 do not reach the origin before t = r0") {
    // smooth bump on (r0, r0 + 0.3); precursors ahead of the light cone must vanish under refinement
    const double r0 = 0.5;
    auto leak = [r0](int n) {
        const auto g = RadialGrid::uniform(1.05, n);
        const auto base = self_similar_state(g, 0.0, 2.0, FieldForm::angle);
        auto pert = base;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double x = (g.nodes[i] - r0) / 0.3;
            if (x > 0.0 && x < 1.0) pert.value[i] += 0.05 * std::exp(4.0 - 1.0 / (x * (1.0 - x)));
        }
        const double t_end = r0 - 4.0 * g.spacing;
        const auto a = evolve_physical(ModelParams{}, g, base, t_end);
        const auto b = evolve_physical(ModelParams{}, g, pert, t_end);
        REQUIRE(a.origin_gradient.size() == b.origin_gradient.size());
        double d = 0.0;
        for (std::size_t k = 0; k < a.origin_gradient.size(); ++k) {
            d = std::max(d, std::abs(a.origin_gradient[k] - b.origin_gradient[k]));
        }
        return d;
    };
    const double d1 = leak(512), d2 = leak(1024);
    CHECK(d2 <= 1e-4);
    CHECK(d2 < d1 / 4.0);
}

TEST_CASE("exact self-similar data blows up at T with rate (T - t)^-1") {
    const auto g = RadialGrid::uniform(1.05, 512);
    const auto tr = evolve_physical(strong_field(), g, self_similar_state(g, 0.0, 1.0, FieldForm::angle), 2.0);
    CHECK(tr.truncated);
    CHECK(tr.stop_reason != "t_end");
    const auto rep = fit_blowup_rate(tr, 0.5);
    CHECK(rep.detected);
    CHECK(rep.exponent_fit == Approx(-1.0).epsilon(0.02));
    CHECK(rep.c_fit == Approx(4.0 / std::sqrt(5.0)).epsilon(0.02));
    CHECK(rep.T_fit == Approx(1.0).epsilon(1e-3));
    CHECK(rep.window_end > rep.window_start);
}

TEST_CASE("full model with small lambda blows up at the self-similar rate") {
    const auto g = RadialGrid::uniform(1.05, 512);
    ModelParams p;
    p.lambda = 0.05;
    const auto tr = evolve_physical(p, g, self_similar_state(g, 0.0, 1.0, FieldForm::angle), 2.0);
    const auto rep = fit_blowup_rate(tr, 0.5);
    CHECK(rep.detected);
    CHECK(rep.exponent_fit == Approx(-1.0).epsilon(0.05));
    // the origin gradient grows monotonically across the fit window
    for (std::size_t k = 1; k < tr.t.size(); ++k) {
        if (tr.t[k] >= rep.window_start) CHECK(tr.origin_gradient[k] >= tr.origin_gradient[k - 1]);
    }
}

TEST_CASE("rate fit on a synthetic self-similar series") {
    const double c = 4.0 / std::sqrt(5.0);
    std::vector<double> t, g;
    for (int k = 0; k <= 4000; ++k) {
        t.push_back(0.9999 * k / 4000);
        g.push_back(c / (1.0 - t.back()));
    }
    const auto rep = fit_blowup_rate(t, g, 0.5);
    CHECK(rep.detected);
    CHECK(std::abs(rep.exponent_fit + 1.0) <= 1e-6);
    CHECK(std::abs(rep.T_fit - 1.0) <= 1e-6);
    CHECK(rep.c_fit == Approx(c).epsilon(1e-6));
    CHECK(rep.residual >= 0.0);
}

TEST_CASE("rate fit reports no blowup for oscillating data") {
    std::vector<double> t, g;
    for (int k = 0; k <= 500; ++k) {
        t.push_back(k * 0.01);
        g.push_back(1.0 + 0.3 * std::sin(6.0 * t.back()));
    }
    CHECK_FALSE(fit_blowup_rate(t, g, 0.5).detected);
    CHECK_THROWS_AS(fit_blowup_rate(t, g, 0.0), DomainError);
    g.pop_back();
    CHECK_THROWS_AS(fit_blowup_rate(t, g, 0.5), ShapeError);
}

TEST_CASE("small data disperses without blowup") {
    const auto g = RadialGrid::uniform(1.05, 256);
    auto s = self_similar_state(g, 0.0, 1.0, FieldForm::angle);
    for (auto& v : s.value) v *= 1e-3;
    for (auto& v : s.rate) v *= 1e-3;
    const auto tr = evolve_physical(ModelParams{}, g, s, 1.0);
    CHECK(tr.stop_reason == "t_end");
    CHECK_FALSE(fit_blowup_rate(tr, 0.5).detected);
}

TEST_CASE("snapshots honour stride and landing times") {
    const auto g = RadialGrid::uniform(1.05, 128);
    EvolveControls c;
    c.stride = 10;
    c.output_times = {0.123};
    const auto tr = evolve_physical(ModelParams{}, g, self_similar_state(g, 0.0, 1.0, FieldForm::angle), 0.2, c);
    const bool landed = std::any_of(tr.snapshots.begin(), tr.snapshots.end(),
                                    [](const FieldState& s) { return std::abs(s.t - 0.123) <= 1e-14; });
    CHECK(landed);
    CHECK(tr.snapshots.size() > 2);
    CHECK(tr.t.front() == 0.0);
    CHECK(tr.t.back() == Approx(0.2).epsilon(1e-14));
}
