#include "skyrme/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "skyrme/coeffs.hpp"
#include "skyrme/diagnostics.hpp"
#include "skyrme/errors.hpp"
#include "skyrme/model_rhs.hpp"
#include "skyrme/profile.hpp"

namespace skyrme {

namespace {

Eigen::VectorXd as_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> as_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

void check_state(const SimilarityContext& ctx, const SimilarityState& s) {
    const auto m = static_cast<std::size_t>(ctx.size());
    if (s.phi1.size() != m || s.phi2.size() != m) {
        throw ShapeError("similarity state does not match the collocation grid");
    }
}

}  // namespace

SimilarityContext SimilarityContext::make(int M) {
    SimilarityContext c;
    c.grid = EvenChebyshev::build(M);
    c.lap = c.grid.laplacian7();
    const auto p = profile_constants(5);
    const int m = c.grid.size();
    c.U1.resize(m);
    c.U2.resize(m);
    c.dU1.resize(m);
    c.V1.resize(m);
    c.V2.resize(m);
    for (int k = 0; k < m; ++k) {
        const double r = c.grid.rho(k);
        const auto [u1, u2] = eval_profile_pair(p, r);
        c.U1(k) = u1;
        c.U2(k) = u2;
        c.dU1(k) = eval_U_tilde_prime(p, r);
        c.V1(k) = v1(r);
        c.V2(k) = v2(r);
    }
    return c;
}

SimilarityContext SimilarityContext::with_projection(int M, double match_tol) {
    SimilarityContext c = make(M);
    const int fine = static_cast<int>(std::ceil(1.5 * M));
    c.projection = export_projection(compute_spectrum(M, fine, match_tol));
    return c;
}

SimilarityState zero_state(const SimilarityContext& ctx) {
    SimilarityState s;
    s.rho = as_std(ctx.grid.rho);
    s.phi1.assign(ctx.size(), 0.0);
    s.phi2.assign(ctx.size(), 0.0);
    return s;
}

SimilarityState initial_data(const SimilarityContext& ctx, const RadialFn& f1, const RadialFn& f2,
                             double T, double v_radius) {
    if (!(T >= 0.5 && T <= 1.5)) throw DomainError("T must lie in [1/2, 3/2], got " + std::to_string(T));
    const auto p = profile_constants(5);
    SimilarityState s = zero_state(ctx);
    for (int k = 0; k < ctx.size(); ++k) {
        const double r = ctx.grid.rho(k);
        const double x = T * r;
        if (x > v_radius + 1e-14) {
            throw DomainError("T rho = " + std::to_string(x) + " outside the data radius");
        }
        s.phi1[k] = T * f1(x) + T * eval_U_tilde(p, x) - ctx.U1(k);
        s.phi2[k] = T * T * f2(x) + T * T * eval_U_prime(p, x) - ctx.U2(k);
    }
    return s;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> rhs_similarity(const SimilarityContext& ctx,
                                                           const SimilarityState& state,
                                                           double lambda, double T,
                                                           const RhsParts& parts) {
    check_state(ctx, state);
    if (lambda < 0.0) throw DomainError("lambda must be >= 0");
    const auto& g = ctx.grid;
    const int m = g.size();
    const Eigen::VectorXd p1 = as_vec(state.phi1);
    const Eigen::VectorXd p2 = as_vec(state.phi2);
    const double A = guard_A();
    for (int k = 0; k < m; ++k) {
        if (!(std::abs(g.rho(k) * p1(k)) <= A)) {
            throw GuardError("|rho phi1| = " + std::to_string(std::abs(g.rho(k) * p1(k))) +
                             " exceeds the guard " + std::to_string(A) + " at rho = " +
                             std::to_string(g.rho(k)));
        }
    }
    const Eigen::VectorXd d1 = g.D * p1;
    const Eigen::VectorXd d2 = g.D * p2;
    Eigen::VectorXd o1 = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd o2 = Eigen::VectorXd::Zero(m);
    const Eigen::ArrayXd r = g.rho.array();
    if (parts.free) {
        o1 = (-r * d1.array() - p1.array() + p2.array()).matrix();
        o2 = ctx.lap * p1;
        o2.array() += -r * d2.array() - 4.0 * p2.array();
    }
    const Eigen::ArrayXd lin = ctx.V1.array() * p1.array() +
                               ctx.V2.array() * r * (r * p2.array() - d1.array());
    if (parts.potential) o2.array() += lin;
    const double s = lambda * T * std::exp(-state.tau);
    const bool corr = parts.correction && s > 0.0;
    if (parts.nonlinear || corr) {
        for (int k = 0; k < m; ++k) {
            const double u = ctx.U1(k) + p1(k);
            const double pu = ctx.dU1(k) + d1(k);
            const double q = ctx.U2(k) + p2(k);
            if (parts.nonlinear) {
                const double fd = f_sf_reduced(u, pu, q, r(k)) - f_sf_reduced(ctx.U1(k), ctx.dU1(k), ctx.U2(k), r(k));
                o2(k) += fd - (lin(k) - 2.0 * p2(k));
            }
            if (corr) o2(k) += s * s * script_G_reduced(u, pu, q, s, r(k));
        }
    }
    return {o1, o2};
}

double project_unstable(const SimilarityContext& ctx, const SimilarityState& state) {
    if (!ctx.projection) throw DependencyError("no spectral projection attached to the context");
    check_state(ctx, state);
    const auto& pr = *ctx.projection;
    const int m = ctx.size();
    if (pr.g_adj.size() != 2 * m) throw DependencyError("projection computed on a different grid");
    return pr.g_adj.head(m).dot(as_vec(state.phi1)) + pr.g_adj.tail(m).dot(as_vec(state.phi2));
}

SimilarityTrajectory evolve_similarity(const SimilarityContext& ctx, const SimilarityState& init,
                                       double lambda, double T, double tau_end,
                                       const SimilarityControls& c) {
    check_state(ctx, init);
    if (!(c.cfl > 0.0)) throw StabilityError("cfl must be positive");
    const auto& g = ctx.grid;
    const int m = g.size();
    const double dt0 = c.cfl * (g.rho(m - 1) - g.rho(m - 2));
    SimilarityTrajectory tr;
    tr.dtau = dt0;
    SimilarityState s = init;
    s.rho = as_std(g.rho);

    auto record = [&] {
        tr.tau.push_back(s.tau);
        tr.norm.push_back(pair_norm(as_vec(s.phi1), as_vec(s.phi2), g, c.norm_k));
        if (ctx.projection) tr.coeff.push_back(project_unstable(ctx, s));
        if (c.keep_states) tr.states.push_back(s);
    };
    std::vector<double> outs = c.output_taus;
    std::sort(outs.begin(), outs.end());
    std::size_t next_out = 0;
    std::vector<SimilarityState> landed;
    record();
    long step = 0;
    auto add = [](const SimilarityState& a, const Eigen::VectorXd& k1, const Eigen::VectorXd& k2,
                  double h, double tau) {
        SimilarityState b = a;
        b.tau = tau;
        for (std::size_t i = 0; i < b.phi1.size(); ++i) {
            b.phi1[i] += h * k1(static_cast<Eigen::Index>(i));
            b.phi2[i] += h * k2(static_cast<Eigen::Index>(i));
        }
        return b;
    };
    try {
        while (s.tau < tau_end - 1e-14) {
            double h = std::min(dt0, tau_end - s.tau);
            bool hit = false;
            if (next_out < outs.size() && outs[next_out] - s.tau <= h + 1e-14) {
                h = outs[next_out] - s.tau;
                hit = true;
            }
            if (h > 0.0) {
                const auto [a1, a2] = rhs_similarity(ctx, s, lambda, T, c.parts);
                const auto [b1, b2] = rhs_similarity(ctx, add(s, a1, a2, 0.5 * h, s.tau + 0.5 * h), lambda, T, c.parts);
                const auto [c1, c2] = rhs_similarity(ctx, add(s, b1, b2, 0.5 * h, s.tau + 0.5 * h), lambda, T, c.parts);
                const auto [e1, e2] = rhs_similarity(ctx, add(s, c1, c2, h, s.tau + h), lambda, T, c.parts);
                const Eigen::VectorXd k1 = (a1 + 2.0 * b1 + 2.0 * c1 + e1) / 6.0;
                const Eigen::VectorXd k2 = (a2 + 2.0 * b2 + 2.0 * c2 + e2) / 6.0;
                s = add(s, k1, k2, h, hit ? outs[next_out] : s.tau + h);
                ++step;
                for (int k = 0; k < m; ++k) {
                    if (!std::isfinite(s.phi1[k]) || !std::isfinite(s.phi2[k])) {
                        throw GuardError("non-finite perturbation at tau = " + std::to_string(s.tau));
                    }
                }
            }
            if (hit) {
                landed.push_back(s);
                ++next_out;
                record();
            } else if (c.stride > 0 && step % c.stride == 0) {
                record();
            }
        }
        if (tr.tau.back() != s.tau) record();
    } catch (const GuardError& e) {
        tr.divergent = true;
        tr.reason = e.what();
    }
    tr.landed = std::move(landed);
    tr.final_state = s;
    return tr;
}

ShootingResult shoot_T(const SimilarityContext& ctx, const RadialFn& v1f, const RadialFn& v2f,
                       double lambda, double lo, double hi, double tol,
                       const ShootingControls& c) {
    if (!ctx.projection) throw DependencyError("shooting needs the unstable-mode projection");
    if (!(lo < hi) || lo < 0.8 - 1e-12 || hi > 1.2 + 1e-12) {
        throw DomainError("bracket must satisfy 0.8 <= lo < hi <= 1.2");
    }
    if (!(tol > 0.0)) throw DomainError("tol must be positive");
    struct Eval {
        double F = 0.0;
        bool divergent = false;
        bool at_start = false;  // guard already violated by the data
    };
    auto eval = [&](double T) {
        const auto init = initial_data(ctx, v1f, v2f, T);
        SimilarityControls ec = c.evolve;
        ec.keep_states = false;
        ec.output_taus.clear();
        const auto tr = evolve_similarity(ctx, init, lambda, T, c.tau_horizon, ec);
        if (tr.coeff.empty()) throw DependencyError("no coefficient recorded");
        return Eval{tr.coeff.back(), tr.divergent, tr.divergent && tr.tau.size() == 1};
    };
    ShootingResult res;
    auto fl = std::async(std::launch::async, eval, lo);
    Eval Fh = eval(hi);
    Eval Fl = fl.get();
    res.evaluations = 2;
    res.projection_history.emplace_back(lo, Fl.F);
    res.projection_history.emplace_back(hi, Fh.F);
    if (Fl.at_start && Fh.at_start) {
        throw AmplitudeError("initial data violates the guard at both bracket endpoints");
    }
    if ((Fl.F > 0.0) == (Fh.F > 0.0)) {
        throw BracketError("unstable coefficient has the same sign at both bracket endpoints");
    }
    for (int it = 0; it < c.max_iterations && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Eval Fm = eval(mid);
        ++res.evaluations;
        res.projection_history.emplace_back(mid, Fm.F);
        if ((Fm.F > 0.0) == (Fl.F > 0.0)) {
            lo = mid;
            Fl = Fm;
        } else {
            hi = mid;
            Fh = Fm;
        }
    }
    res.lo = lo;
    res.hi = hi;
    res.converged = hi - lo <= tol;
    double T = 0.5 * (lo + hi);
    if (!Fl.divergent && !Fh.divergent && Fh.F != Fl.F) {
        T = lo - Fl.F * (hi - lo) / (Fh.F - Fl.F);
        T = std::clamp(T, lo, hi);
    }
    res.T_star = T;
    return res;
}

}  // namespace skyrme
