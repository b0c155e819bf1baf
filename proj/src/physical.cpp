#include "skyrme/physical.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>

#include "skyrme/errors.hpp"
#include "skyrme/profile.hpp"

namespace skyrme {

namespace {

using Vec = std::vector<double>;

struct Workspace {
    Vec k1v, k1a, k2v, k2a, k3v, k3a, k4v, k4a, tv, ta;
    explicit Workspace(std::size_t m)
        : k1v(m), k1a(m), k2v(m), k2a(m), k3v(m), k3a(m), k4v(m), k4a(m), tv(m), ta(m) {}
};

using Rhs = std::function<void(const Vec& f, const Vec& ft, Vec& dv, Vec& da)>;

void rk4_step(const Rhs& rhs, Vec& f, Vec& ft, double dt, Workspace& w) {
    const std::size_t m = f.size();
    rhs(f, ft, w.k1v, w.k1a);
    for (std::size_t i = 0; i < m; ++i) {
        w.tv[i] = f[i] + 0.5 * dt * w.k1v[i];
        w.ta[i] = ft[i] + 0.5 * dt * w.k1a[i];
    }
    rhs(w.tv, w.ta, w.k2v, w.k2a);
    for (std::size_t i = 0; i < m; ++i) {
        w.tv[i] = f[i] + 0.5 * dt * w.k2v[i];
        w.ta[i] = ft[i] + 0.5 * dt * w.k2a[i];
    }
    rhs(w.tv, w.ta, w.k3v, w.k3a);
    for (std::size_t i = 0; i < m; ++i) {
        w.tv[i] = f[i] + dt * w.k3v[i];
        w.ta[i] = ft[i] + dt * w.k3a[i];
    }
    rhs(w.tv, w.ta, w.k4v, w.k4a);
    for (std::size_t i = 0; i < m; ++i) {
        f[i] += dt / 6.0 * (w.k1v[i] + 2.0 * w.k2v[i] + 2.0 * w.k3v[i] + w.k4v[i]);
        ft[i] += dt / 6.0 * (w.k1a[i] + 2.0 * w.k2a[i] + 2.0 * w.k3a[i] + w.k4a[i]);
    }
}

// First and second derivative at node i, one-sided at the active edge nb.
struct Deriv {
    double d1, d2;
};

Deriv derivs(const Vec& f, std::size_t i, std::size_t nb, double h, OuterBoundary bc, bool at_grid_end,
             int parity) {
    if (i == 0) {
        const double ghost = parity > 0 ? f[1] : -f[1];
        return {(f[1] - ghost) / (2.0 * h), (f[1] - 2.0 * f[0] + ghost) / (h * h)};
    }
    if (i < nb) {
        return {(f[i + 1] - f[i - 1]) / (2.0 * h), (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)};
    }
    if (at_grid_end && bc == OuterBoundary::reflect) {
        return {0.0, 2.0 * (f[i - 1] - f[i]) / (h * h)};
    }
    return {(3.0 * f[i] - 4.0 * f[i - 1] + f[i - 2]) / (2.0 * h),
            (2.0 * f[i] - 5.0 * f[i - 1] + 4.0 * f[i - 2] - f[i - 3]) / (h * h)};
}

void check_inputs(const ModelParams& params, const RadialGrid& grid, const FieldState& init,
                  FieldForm form, double t_end, const EvolveControls& c) {
    params.validate();
    if (init.form != form) throw ShapeError("initial state has the wrong field form");
    if (init.value.size() != grid.size() || init.rate.size() != grid.size()) {
        throw ShapeError("initial state does not match grid");
    }
    if (!(c.cfl > 0.0) || c.cfl > 1.0) {
        throw StabilityError("cfl must lie in (0, 1], got " + std::to_string(c.cfl));
    }
    if (!(c.dissipation >= 0.0) || c.dissipation > 1.0) {
        throw StabilityError("dissipation must lie in [0, 1]");
    }
    if (!(t_end >= init.t)) throw DomainError("t_end before initial time");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(init.value[i]) || !std::isfinite(init.rate[i])) {
            throw DataError("non-finite initial data");
        }
    }
}

struct Driver {
    const RadialGrid& grid;
    const EvolveControls& c;
    FieldForm form;
    std::function<double(const Vec&)> gauge;        // origin quantity
    std::function<bool(const Vec&, std::size_t)> degenerate;
    std::function<Rhs(std::size_t)> make_rhs;
    std::function<std::size_t(const Vec&, std::size_t)> excision;

    // Adds -eps/(16h) D4 to both equations, using the parity ghosts at the
    // origin and skipping the two nodes next to the active edge.
    Rhs damped(const Rhs& base, std::size_t nb) const {
        const double k = c.dissipation / (16.0 * grid.spacing);
        const double parity = form == FieldForm::angle ? -1.0 : 1.0;
        return [base, nb, k, parity](const Vec& f, const Vec& ft, Vec& dv, Vec& da) {
            base(f, ft, dv, da);
            if (nb < 4) return;
            auto at = [parity](const Vec& v, long j) {
                return j < 0 ? parity * v[static_cast<std::size_t>(-j)] : v[static_cast<std::size_t>(j)];
            };
            for (std::size_t i = 0; i + 2 <= nb; ++i) {
                const long j = static_cast<long>(i);
                const double d4f = at(f, j + 2) - 4.0 * at(f, j + 1) + 6.0 * f[i] - 4.0 * at(f, j - 1) + at(f, j - 2);
                const double d4t = at(ft, j + 2) - 4.0 * at(ft, j + 1) + 6.0 * ft[i] - 4.0 * at(ft, j - 1) +
                                   at(ft, j - 2);
                dv[i] -= k * d4f;
                da[i] -= k * d4t;
            }
        };
    }

    Trajectory run(const FieldState& init, double t_end) {
        Trajectory tr;
        Vec f = init.value;
        Vec ft = init.rate;
        const double h = grid.spacing;
        std::size_t nb = grid.size() - 1;
        if (degenerate(f, nb)) {
            throw DegeneracyError("principal coefficient degenerate in the initial data");
        }
        double t = init.t;
        const double g0 = std::abs(gauge(f));
        tr.t.push_back(t);
        tr.origin_gradient.push_back(gauge(f));
        Vec outs = c.output_times;
        std::sort(outs.begin(), outs.end());
        std::size_t next_out = 0;
        while (next_out < outs.size() && outs[next_out] < t - 1e-14) ++next_out;
        auto snap = [&] { tr.snapshots.push_back(FieldState{t, form, f, ft}); };
        if (next_out < outs.size() && std::abs(outs[next_out] - t) < 1e-14) {
            snap();
            ++next_out;
        }
        Workspace ws(f.size());
        const double dt0 = c.cfl * h;
        long step = 0;
        tr.stop_reason = "t_end";
        while (t < t_end - 1e-14) {
            if (++step > c.max_steps) throw StabilityError("step budget exhausted");
            if (c.excise) nb = excision(f, nb);
            if (nb < static_cast<std::size_t>(std::max(4, c.min_active))) {
                tr.truncated = true;
                tr.stop_reason = "excised";
                break;
            }
            double dt = std::min(dt0, t_end - t);
            bool hit = false;
            if (next_out < outs.size() && outs[next_out] - t <= dt + 1e-14) {
                dt = outs[next_out] - t;
                hit = true;
            }
            const Rhs base = make_rhs(nb);
            const Rhs rhs = c.dissipation > 0.0 ? damped(base, nb) : base;
            rk4_step(rhs, f, ft, dt, ws);
            t = hit ? outs[next_out] : t + dt;
            for (std::size_t i = 0; i <= nb; ++i) {
                if (!std::isfinite(f[i]) || !std::isfinite(ft[i])) {
                    throw StabilityError("non-finite solution at t = " + std::to_string(t));
                }
            }
            const double g = gauge(f);
            tr.t.push_back(t);
            tr.origin_gradient.push_back(g);
            if (hit) {
                snap();
                ++next_out;
            } else if (c.stride > 0 && step % c.stride == 0) {
                snap();
            }
            if (degenerate(f, nb)) {
                tr.truncated = true;
                tr.stop_reason = "degenerate";
                break;
            }
            if (g0 > 0.0 && std::abs(g) > c.ceiling_factor * g0) {
                tr.truncated = true;
                tr.stop_reason = "ceiling";
                break;
            }
            if (std::abs(g) * h > c.resolution_limit) {
                tr.truncated = true;
                tr.stop_reason = "under_resolved";
                break;
            }
        }
        tr.final_state = FieldState{t, form, f, ft};
        tr.active_outer = static_cast<int>(nb);
        return tr;
    }
};

std::size_t excise_at(const Vec& psi, std::size_t nb, double angle) {
    for (std::size_t i = 1; i <= nb; ++i) {
        if (std::abs(psi[i]) >= angle) return i - 1;
    }
    return nb;
}

}  // namespace

Trajectory evolve_physical(const ModelParams& params, const RadialGrid& grid, const FieldState& init,
                           double t_end, const EvolveControls& c) {
    check_inputs(params, grid, init, FieldForm::angle, t_end, c);
    if (params.model == Model::semilinear) {
        throw ShapeError("semilinear model runs through evolve_semilinear");
    }
    const double a = params.alpha_eff();
    const double b = params.beta;
    const double h = grid.spacing;
    const auto& r = grid.nodes;
    const std::size_t n = grid.size() - 1;

    Driver d{grid, c, FieldForm::angle, {}, {}, {}, {}};
    d.gauge = [h](const Vec& psi) { return (8.0 * psi[1] - psi[2]) / (6.0 * h); };
    d.degenerate = [&, a](const Vec& psi, std::size_t nb) {
        if (a > 0.0) return false;
        double lo = INFINITY, hi = 0.0;
        for (std::size_t i = 1; i <= nb; ++i) {
            const double s = std::abs(std::sin(psi[i])) / r[i];
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        return !(hi > 0.0) || lo < 1e-10 * hi;
    };
    d.excision = [&c](const Vec& psi, std::size_t nb) { return excise_at(psi, nb, c.excision_angle); };
    d.make_rhs = [&, a, b, h, n](std::size_t nb) -> Rhs {
        return [&, a, b, h, n, nb](const Vec& psi, const Vec& pt, Vec& dv, Vec& da) {
            dv[0] = 0.0;
            da[0] = 0.0;
            for (std::size_t i = 1; i <= nb; ++i) {
                const auto [pr, prr] = derivs(psi, i, nb, h, c.boundary, nb == n, -1);
                const double ri = r[i];
                const double s = std::sin(psi[i]);
                const double s2 = s * s / (ri * ri);
                const double coef = a + 4.0 * b * s2;
                const double q = pt[i];
                dv[i] = q;
                da[i] = prr + ((4.0 / ri) * (a + 2.0 * b * s2) * pr -
                               2.0 * std::sin(2.0 * psi[i]) / (ri * ri) *
                                   (a + b * (q * q - pr * pr + 3.0 * s2))) /
                                  coef;
            }
            for (std::size_t i = nb + 1; i < psi.size(); ++i) {
                dv[i] = 0.0;
                da[i] = 0.0;
            }
        };
    };
    FieldState start = init;
    start.value[0] = 0.0;
    return d.run(start, t_end);
}

Trajectory evolve_semilinear(const ModelParams& params, const RadialGrid& grid,
                             const FieldState& init, double t_end, const EvolveControls& c) {
    check_inputs(params, grid, init, FieldForm::reduced, t_end, c);
    const double a = params.alpha_eff();
    const double b = params.beta;
    const double h = grid.spacing;
    const auto& r = grid.nodes;
    const std::size_t n = grid.size() - 1;

    Driver d{grid, c, FieldForm::reduced, {}, {}, {}, {}};
    d.gauge = [](const Vec& u) { return u[0]; };
    d.degenerate = [&, a](const Vec& u, std::size_t nb) {
        if (a > 0.0) return false;
        double lo = INFINITY, hi = 0.0;
        for (std::size_t i = 0; i <= nb; ++i) {
            const double w = u[i] * u[i] * kernels::sinc2(r[i] * u[i]);
            lo = std::min(lo, w);
            hi = std::max(hi, w);
        }
        return !(hi > 0.0) || lo < 1e-20 * hi;
    };
    d.excision = [&](const Vec& u, std::size_t nb) {
        for (std::size_t i = 1; i <= nb; ++i) {
            if (std::abs(r[i] * u[i]) >= c.excision_angle) return i - 1;
        }
        return nb;
    };
    // The plain centred 7D Laplacian has complex modes on its first rows
    // (off-diagonal products change sign for i < 3). Those rows use the
    // volume-weighted stencil instead.
    constexpr std::size_t kInner = 3;
    Vec cp(kInner), cm(kInner);
    for (std::size_t i = 0; i < kInner; ++i) {
        const double hi = i + 0.5;
        const double lo = static_cast<double>(i) - 0.5;
        const double vol = std::pow(hi, 7) - std::pow(lo, 7);
        cp[i] = 7.0 * std::pow(hi, 6) / (vol * h * h);
        cm[i] = 7.0 * std::pow(lo, 6) / (vol * h * h);
    }
    d.make_rhs = [&, a, b, h, n, cp, cm](std::size_t nb) -> Rhs {
        return [&, a, b, h, n, nb](const Vec& u, const Vec& ut, Vec& dv, Vec& da) {
            for (std::size_t i = 0; i <= nb; ++i) {
                const auto [ur, urr] = derivs(u, i, nb, h, c.boundary, nb == n, 1);
                const double ri = r[i];
                double lap;
                if (i < kInner && i < nb) {
                    const double left = i == 0 ? u[1] : u[i - 1];
                    lap = cp[i] * (u[i + 1] - u[i]) - cm[i] * (u[i] - left);
                } else {
                    lap = urr + 6.0 / ri * ur;
                }
                const double w = 4.0 * u[i] * u[i] * kernels::sinc2(ri * u[i]);
                const double src = b * sf_weighted_reduced(u[i], ur, ut[i], ri) + a * f_wm_reduced(u[i], ri);
                dv[i] = ut[i];
                da[i] = lap + src / (a + b * w);
            }
            for (std::size_t i = nb + 1; i < u.size(); ++i) {
                dv[i] = 0.0;
                da[i] = 0.0;
            }
        };
    };
    return d.run(init, t_end);
}

FieldState self_similar_state(const RadialGrid& grid, double t, double T, FieldForm form) {
    if (!(T > t)) throw DomainError("self-similar state needs t < T");
    const auto p = profile_constants(5);
    const double tau = T - t;
    FieldState s;
    s.t = t;
    s.form = form;
    s.value.resize(grid.size());
    s.rate.resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = grid.nodes[i] / tau;
        if (rho >= p.rho_star) {
            s.value[i] = form == FieldForm::angle ? std::numbers::pi : std::numbers::pi / grid.nodes[i];
            s.rate[i] = 0.0;
            continue;
        }
        if (form == FieldForm::angle) {
            s.value[i] = eval_U(p, rho);
            s.rate[i] = rho * eval_U_prime(p, rho) / tau;
        } else {
            s.value[i] = eval_U_tilde(p, rho) / tau;
            s.rate[i] = eval_U_prime(p, rho) / (tau * tau);
        }
    }
    return s;
}

BlowupReport fit_blowup_rate(const std::vector<double>& t, const std::vector<double>& g,
                             double frac) {
    if (t.size() != g.size()) throw ShapeError("series lengths differ");
    if (!(frac > 0.0) || frac > 1.0) throw DomainError("fit window fraction must lie in (0, 1]");
    BlowupReport rep;
    if (t.size() < 8) {
        rep.note = "too few samples";
        return rep;
    }
    const double t_last = t.back();
    const double t_start = t_last - frac * (t_last - t.front());
    std::vector<double> tw, yw;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_start) continue;
        if (!(std::abs(g[i]) > 0.0) || !std::isfinite(g[i])) {
            rep.note = "nonpositive gradient in window";
            return rep;
        }
        tw.push_back(t[i]);
        yw.push_back(std::log(std::abs(g[i])));
    }
    rep.window_start = tw.front();
    rep.window_end = tw.back();
    rep.n_points = static_cast<int>(tw.size());
    if (tw.size() < 8) {
        rep.note = "too few samples in window";
        return rep;
    }
    for (std::size_t i = 1; i < yw.size(); ++i) {
        if (!(yw[i] > yw[i - 1])) {
            rep.note = "origin gradient not monotonically growing";
            return rep;
        }
    }
    const double span = tw.back() - tw.front();
    struct Line {
        double slope, intercept, rss;
    };
    auto regress = [&](double T) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(tw.size());
        for (std::size_t i = 0; i < tw.size(); ++i) {
            const double x = std::log(T - tw[i]);
            sx += x;
            sy += yw[i];
            sxx += x * x;
            sxy += x * yw[i];
        }
        const double mx = sx / m, my = sy / m;
        const double slope = (sxy / m - mx * my) / (sxx / m - mx * mx);
        const double icpt = my - slope * mx;
        double rss = 0.0;
        for (std::size_t i = 0; i < tw.size(); ++i) {
            const double e = yw[i] - (icpt + slope * std::log(T - tw[i]));
            rss += e * e;
        }
        return Line{slope, icpt, rss};
    };
    // golden section in s = log(T - t_last)
    double lo = std::log(1e-9 * std::max(span, 1e-12));
    double hi = std::log(10.0 * std::max(span, 1e-12));
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
    double f1 = regress(t_last + std::exp(x1)).rss, f2 = regress(t_last + std::exp(x2)).rss;
    for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = regress(t_last + std::exp(x1)).rss;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = regress(t_last + std::exp(x2)).rss;
        }
    }
    const double T = t_last + std::exp(0.5 * (lo + hi));
    const Line best = regress(T);
    rep.detected = true;
    rep.T_fit = T;
    rep.exponent_fit = best.slope;
    rep.c_fit = std::exp(best.intercept);
    rep.residual = std::sqrt(best.rss / tw.size());
    return rep;
}

BlowupReport fit_blowup_rate(const Trajectory& traj, double frac) {
    return fit_blowup_rate(traj.t, traj.origin_gradient, frac);
}

}  // namespace skyrme
