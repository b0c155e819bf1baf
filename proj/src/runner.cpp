#include "skyrme/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include "skyrme/coeffs.hpp"
#include "skyrme/diagnostics.hpp"
#include "skyrme/errors.hpp"
#include "skyrme/physical.hpp"
#include "skyrme/profile.hpp"
#include "skyrme/similarity.hpp"
#include "skyrme/spectral.hpp"

#ifndef SKYRMELAB_VERSION
#define SKYRMELAB_VERSION "0.0.0"
#endif

namespace skyrme {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

const std::map<std::string, Command>& command_table() {
    static const std::map<std::string, Command> t = {
        {"profile", Command::profile},       {"verify-rhs", Command::verify_rhs},
        {"verify-coeffs", Command::verify_coeffs}, {"evolve", Command::evolve},
        {"evolve-sim", Command::evolve_sim}, {"shoot", Command::shoot},
        {"spectrum", Command::spectrum},     {"check-residual", Command::check_residual},
        {"sweep", Command::sweep}};
    return t;
}

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double to_double(const std::string& field, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "not a number: '" + v + "'");
    }
}

long long to_int(const std::string& field, const std::string& v) {
    try {
        std::size_t used = 0;
        const long long x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError(field, "not an integer: '" + v + "'");
    }
}

bool to_bool(const std::string& field, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(field, "not a boolean: '" + v + "'");
}

std::vector<double> to_list(const std::string& field, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError(field, "empty list entry");
        out.push_back(to_double(field, item.substr(b, e - b + 1)));
    }
    return out;
}

std::string list_str(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
    return s;
}

Model parse_model(const std::string& field, const std::string& v) {
    if (v == "full") return Model::full;
    if (v == "strong_field") return Model::strong_field;
    if (v == "semilinear") return Model::semilinear;
    throw ConfigError(field, "unknown model '" + v + "'");
}

std::string model_str(Model m) {
    switch (m) {
        case Model::full: return "full";
        case Model::strong_field: return "strong_field";
        case Model::semilinear: return "semilinear";
    }
    return "full";
}

using Setter = std::function<void(RunConfig&, const std::string& field, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> t = [] {
        std::map<std::string, Setter> m;
        auto dbl = [&m](const std::string& key, double RunConfig::*mp) {
            m[key] = [mp](RunConfig& c, const std::string& f, const std::string& v) { c.*mp = to_double(f, v); };
        };
        auto integer = [&m](const std::string& key, int RunConfig::*mp) {
            m[key] = [mp](RunConfig& c, const std::string& f, const std::string& v) {
                const long long x = to_int(f, v);
                if (x < INT32_MIN || x > INT32_MAX) throw ConfigError(f, "out of range");
                c.*mp = static_cast<int>(x);
            };
        };
        m["command"] = [](RunConfig& c, const std::string&, const std::string& v) { c.command = parse_command(v); };
        m["model.kind"] = [](RunConfig& c, const std::string& f, const std::string& v) {
            c.model.model = parse_model(f, v);
        };
        m["model.alpha"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.model.alpha = to_double(f, v); };
        m["model.beta"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.model.beta = to_double(f, v); };
        m["model.lambda"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.model.lambda = to_double(f, v); };
        m["model.T"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.model.T = to_double(f, v); };
        integer("profile.samples", &RunConfig::profile_samples);
        integer("coeffs.samples", &RunConfig::coeff_samples);
        dbl("coeffs.tol", &RunConfig::coeff_tol);
        integer("evolve.n", &RunConfig::n);
        dbl("evolve.r_max", &RunConfig::r_max);
        dbl("evolve.cfl", &RunConfig::cfl);
        dbl("evolve.t_end", &RunConfig::t_end);
        m["evolve.data"] = [](RunConfig& c, const std::string& f, const std::string& v) {
            if (v == "self_similar") c.data = DataKind::self_similar;
            else if (v == "bump") c.data = DataKind::bump;
            else throw ConfigError(f, "unknown data kind '" + v + "'");
        };
        dbl("evolve.amplitude", &RunConfig::amplitude);
        dbl("evolve.width", &RunConfig::width);
        integer("evolve.stride", &RunConfig::stride);
        dbl("evolve.fit_fraction", &RunConfig::fit_fraction);
        dbl("evolve.dissipation", &RunConfig::dissipation);
        integer("similarity.M", &RunConfig::M);
        dbl("similarity.cfl", &RunConfig::sim_cfl);
        dbl("similarity.tau_end", &RunConfig::tau_end);
        dbl("similarity.eps", &RunConfig::eps);
        m["similarity.seed"] = [](RunConfig& c, const std::string& f, const std::string& v) {
            const long long x = to_int(f, v);
            if (x < 0) throw ConfigError(f, "seed must be >= 0");
            c.seed = static_cast<std::uint64_t>(x);
        };
        dbl("similarity.bracket_lo", &RunConfig::bracket_lo);
        dbl("similarity.bracket_hi", &RunConfig::bracket_hi);
        dbl("similarity.tol", &RunConfig::tol);
        dbl("similarity.horizon", &RunConfig::horizon);
        integer("similarity.norm_k", &RunConfig::norm_k);
        dbl("similarity.fit_t0", &RunConfig::fit_t0);
        dbl("similarity.fit_t1", &RunConfig::fit_t1);
        integer("spectrum.n_coarse", &RunConfig::n_coarse);
        integer("spectrum.n_fine", &RunConfig::n_fine);
        dbl("spectrum.match_tol", &RunConfig::match_tol);
        m["spectrum.potential"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.potential = to_bool(f, v); };
        m["sweep.command"] = [](RunConfig& c, const std::string&, const std::string& v) { c.sweep_command = parse_command(v); };
        m["sweep.lambda"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.sweep_lambda = to_list(f, v); };
        m["sweep.eps"] = [](RunConfig& c, const std::string& f, const std::string& v) { c.sweep_eps = to_list(f, v); };
        m["output.dir"] = [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; };
        integer("output.workers", &RunConfig::workers);
        m["output.deterministic"] = [](RunConfig& c, const std::string& f, const std::string& v) {
            c.deterministic = to_bool(f, v);
        };
        return m;
    }();
    return t;
}

void need(bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError(field, what);
}

bool finite_pos(double x) { return std::isfinite(x) && x > 0.0; }

// ---------------------------------------------------------------- output

class Sink {
public:
    explicit Sink(fs::path dir) : dir_(std::move(dir)) {}

    void write(const std::string& name, const std::string& content) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir_ / name).string());
        out << content;
        out.close();
        files_.push_back(name);
    }

    std::vector<OutputEntry> manifest() const {
        std::vector<OutputEntry> m;
        for (const auto& f : files_) {
            m.push_back({f, sha256_file(dir_ / f), fs::file_size(dir_ / f)});
        }
        return m;
    }

    const fs::path& dir() const { return dir_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

struct Csv {
    std::ostringstream s;
    explicit Csv(const std::string& header) { s << header << '\n'; }
    void row(std::initializer_list<double> xs) {
        bool first = true;
        for (double x : xs) {
            s << (first ? "" : ",") << num(x);
            first = false;
        }
        s << '\n';
    }
    std::string str() const { return s.str(); }
};

using Metrics = std::vector<std::pair<std::string, double>>;

// ------------------------------------------------------------- perturbations

// Portable uniform draws from the raw engine output.
struct Draw {
    std::uint64_t state;
    double next() {
        state += 0x9E3779B97F4A7C15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

RadialFn make_perturbation(const RunConfig& cfg) {
    const double eps = cfg.eps;
    if (cfg.seed == 0) return [eps](double r) { return eps * std::exp(-4.0 * r * r); };
    Draw d{cfg.seed};
    std::array<double, 3> c{}, a{};
    double cmax = 0.0;
    for (int k = 0; k < 3; ++k) {
        c[k] = 2.0 * d.next() - 1.0;
        a[k] = 2.0 + 6.0 * d.next();
        cmax = std::max(cmax, std::abs(c[k]));
    }
    for (auto& x : c) x /= cmax;
    return [eps, c, a](double r) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) v += c[k] * std::exp(-a[k] * r * r);
        return eps * v;
    };
}

// ------------------------------------------------------------------ commands

Metrics cmd_profile(const RunConfig& cfg, Sink& out) {
    const auto p = profile_constants(5);
    Csv csv("rho,U[rad],U_tilde[rad],U1[rad],U2[rad]");
    const int n = cfg.profile_samples;
    double last = 0.0;
    for (int i = 0; i < n; ++i) {
        const double rho = i == n - 1 ? p.rho_star : p.rho_star * i / (n - 1);
        const auto v = eval_profile(p, rho);
        csv.row({rho, v.U, v.U_tilde, v.U1, v.U2});
        last = v.U;
    }
    out.write("profile.csv", csv.str());
    return {{"U_at_rho_star", last}};
}

Metrics cmd_verify_rhs(const RunConfig&, Sink& out) {
    const double pi = std::numbers::pi;
    json checks = json::array();
    bool all = true;
    auto check = [&](const std::string& name, double value, double expected, double tol, bool relative) {
        const double err = relative ? std::abs(value - expected) / std::abs(expected) : std::abs(value - expected);
        const bool pass = err <= tol;
        all = all && pass;
        checks.push_back({{"name", name}, {"value", value}, {"expected", expected}, {"error", err}, {"tol", tol},
                          {"pass", pass}});
        return err;
    };
    check("f_wm(pi/2,1)", f_wm(pi / 2, 1.0), 2.0 * pi, 1e-12, true);
    check("f_wm(1e-4,1e-4)", f_wm(1e-4, 1e-4), 8.0 / 3.0, 1e-6, true);
    check("f_sf(pi/2,0,0,1)", f_sf({pi / 2, 0.0, 0.0, 1.0}), pi, 1e-12, true);
    check("f_sf(1e-3,0,0,1)", f_sf({1e-3, 0.0, 0.0, 1.0}), 5.0 / 3.0 * 1e-9, 1e-6, true);
    check("G(pi/2,0,0,1)", g_difference({pi / 2, 0.0, 0.0, 1.0}), pi, 1e-12, true);
    check("G(0,0,0,1)", g_difference({0.0, 0.0, 0.0, 1.0}), 0.0, 1e-15, false);
    check("g_lambda(pi/2,1,0)", g_lambda_weight(pi / 2, 1.0, 0.0), 0.25, 1e-12, true);
    check("g_lambda(0,1,2)", g_lambda_weight(0.0, 1.0, 2.0), 0.25, 1e-12, true);
    check("g_lambda(u=1,r=1e-8,1)", g_lambda_weight_reduced(1.0, 1e-8, 1.0), 0.2, 1e-12, true);

    // series/direct agreement across the switch, against long double direct forms
    double worst_wm = 0.0, worst_sf = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = 1e-3 * std::pow(100.0, i / 200.0);
        const long double xl = x;
        const long double wm = 4.0L * xl - 2.0L * std::sin(2.0L * xl);
        const long double sf = -(1.5L * std::sin(2.0L * xl) - 2.0L * xl - xl * xl * std::cos(xl) / std::sin(xl));
        worst_wm = std::max(worst_wm, static_cast<double>(std::abs((f_wm(x, 1.0) - wm) / wm)));
        worst_sf = std::max(worst_sf, static_cast<double>(std::abs((f_sf({x, 0.0, 0.0, 1.0}) - sf) / sf)));
    }
    check("branch f_wm", worst_wm, 0.0, 1e-9, false);
    check("branch f_sf", worst_sf, 0.0, 1e-9, false);

    json rep = {{"pass", all}, {"checks", checks}};
    out.write("verify_rhs.json", rep.dump(2) + "\n");
    return {{"pass", all ? 1.0 : 0.0}, {"branch_f_wm", worst_wm}, {"branch_f_sf", worst_sf}};
}

Metrics cmd_verify_coeffs(const RunConfig& cfg, Sink& out) {
    const auto r = verify_coeffs_fd(cfg.coeff_samples, cfg.coeff_tol);
    json rep = {{"max_rel_err", r.max_rel_err}, {"n_samples", r.n_samples}, {"n_checks", r.n_checks},
                {"pass", r.pass}, {"tol", cfg.coeff_tol}, {"worst_quantity", r.worst_quantity},
                {"worst_sigma", r.worst_sigma}, {"worst_rho", r.worst_rho},
                {"spot", {{"V1(0)", v1(0.0)}, {"V1(1)", v1(1.0)}, {"V2(0)", v2(0.0)}, {"V2(1)", v2(1.0)},
                          {"G1w(0,0)", taylor_coeffs(0.0, 0.0).G1w}, {"G2(0,0)", taylor_coeffs(0.0, 0.0).G2},
                          {"G3w(0,0)", taylor_coeffs(0.0, 0.0).G3w}}}};
    out.write("verify_coeffs.json", rep.dump(2) + "\n");
    return {{"max_rel_err", r.max_rel_err}, {"pass", r.pass ? 1.0 : 0.0}};
}

FieldState physical_data(const RunConfig& cfg, const RadialGrid& g, FieldForm form) {
    FieldState s;
    if (cfg.data == DataKind::self_similar) {
        s = self_similar_state(g, 0.0, cfg.model.T, form);
        for (auto& x : s.value) x *= cfg.amplitude;
        for (auto& x : s.rate) x *= cfg.amplitude;
        return s;
    }
    s.form = form;
    s.value.resize(g.size());
    s.rate.assign(g.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double r = g.nodes[i];
        const double bump = cfg.amplitude * std::exp(-(r * r) / (cfg.width * cfg.width));
        s.value[i] = form == FieldForm::angle ? r * bump : bump;
    }
    return s;
}

Metrics cmd_evolve(const RunConfig& cfg, Sink& out) {
    const auto g = RadialGrid::uniform(cfg.r_max, cfg.n);
    const bool reduced = cfg.model.model == Model::semilinear;
    const FieldForm form = reduced ? FieldForm::reduced : FieldForm::angle;
    EvolveControls c;
    c.cfl = cfg.cfl;
    c.stride = cfg.stride;
    c.dissipation = cfg.dissipation;
    const auto init = physical_data(cfg, g, form);
    const auto tr = reduced ? evolve_semilinear(cfg.model, g, init, cfg.t_end, c)
                            : evolve_physical(cfg.model, g, init, cfg.t_end, c);

    Csv series(reduced ? "t,u0" : "t,psi_r0");
    for (std::size_t i = 0; i < tr.t.size(); ++i) series.row({tr.t[i], tr.origin_gradient[i]});
    out.write("series.csv", series.str());
    if (cfg.stride > 0) {
        Csv snaps(reduced ? "t,r,u,u_t" : "t,r,psi[rad],psi_t[rad/time]");
        for (const auto& s : tr.snapshots) {
            for (std::size_t i = 0; i < g.size(); ++i) snaps.row({s.t, g.nodes[i], s.value[i], s.rate[i]});
        }
        out.write("snapshots.csv", snaps.str());
    }
    const auto rep = fit_blowup_rate(tr, cfg.fit_fraction);
    json j = {{"detected", rep.detected}, {"T_fit", rep.T_fit}, {"c_fit", rep.c_fit},
              {"exponent_fit", rep.exponent_fit}, {"residual", rep.residual},
              {"window_start", rep.window_start}, {"window_end", rep.window_end}, {"n_points", rep.n_points},
              {"note", rep.note}, {"stop_reason", tr.stop_reason}, {"t_final", tr.t.back()},
              {"truncated", tr.truncated}};
    out.write("blowup.json", j.dump(2) + "\n");
    return {{"exponent_fit", rep.exponent_fit}, {"c_fit", rep.c_fit}, {"T_fit", rep.T_fit},
            {"detected", rep.detected ? 1.0 : 0.0}};
}

SimilarityControls sim_controls(const RunConfig& cfg) {
    SimilarityControls c;
    c.cfl = cfg.sim_cfl;
    c.norm_k = cfg.norm_k;
    return c;
}

json fit_json(const RateFit& f) {
    return {{"omega_fit", -f.exponent}, {"amplitude", f.amplitude}, {"residual", f.residual},
            {"t0", f.t0}, {"t1", f.t1}, {"n_points", f.n_points}};
}

void write_series(Sink& out, const SimilarityTrajectory& tr) {
    Csv csv("tau,norm,unstable_coeff");
    for (std::size_t i = 0; i < tr.tau.size(); ++i) {
        csv.row({tr.tau[i], tr.norm[i], i < tr.coeff.size() ? tr.coeff[i] : 0.0});
    }
    out.write("norm_series.csv", csv.str());
}

// Decay fit over the configured window, clipped to what the run covered.
std::optional<RateFit> decay_fit(const RunConfig& cfg, const SimilarityTrajectory& tr) {
    if (tr.tau.empty()) return std::nullopt;
    const double t1 = std::min(cfg.fit_t1, tr.tau.back());
    if (!(t1 > cfg.fit_t0)) return std::nullopt;
    try {
        return fit_exponential_decay(tr.tau, tr.norm, cfg.fit_t0, t1);
    } catch (const FitError&) {
        return std::nullopt;
    }
}

Metrics cmd_evolve_sim(const RunConfig& cfg, Sink& out) {
    const auto ctx = SimilarityContext::with_projection(cfg.M);
    const auto v1 = make_perturbation(cfg);
    const RadialFn zero = [](double) { return 0.0; };
    const auto init = initial_data(ctx, v1, zero, cfg.model.T);
    const auto tr = evolve_similarity(ctx, init, cfg.model.lambda, cfg.model.T, cfg.tau_end, sim_controls(cfg));
    write_series(out, tr);
    const auto fit = decay_fit(cfg, tr);
    json j = {{"T", cfg.model.T}, {"lambda", cfg.model.lambda}, {"divergent", tr.divergent},
              {"reason", tr.reason}, {"dtau", tr.dtau}, {"tau_final", tr.tau.empty() ? 0.0 : tr.tau.back()},
              {"decay_fit", fit ? fit_json(*fit) : json(nullptr)}};
    out.write("evolve_sim.json", j.dump(2) + "\n");
    Metrics m{{"divergent", tr.divergent ? 1.0 : 0.0}};
    if (fit) m.push_back({"omega_fit", -fit->exponent});
    return m;
}

Metrics cmd_shoot(const RunConfig& cfg, Sink& out) {
    const auto ctx = SimilarityContext::with_projection(cfg.M);
    const auto v1 = make_perturbation(cfg);
    const RadialFn zero = [](double) { return 0.0; };
    ShootingControls sc;
    sc.tau_horizon = cfg.horizon;
    sc.evolve = sim_controls(cfg);
    const auto res = shoot_T(ctx, v1, zero, cfg.model.lambda, cfg.bracket_lo, cfg.bracket_hi, cfg.tol, sc);
    const auto init = initial_data(ctx, v1, zero, res.T_star);
    const auto tr = evolve_similarity(ctx, init, cfg.model.lambda, res.T_star, cfg.tau_end, sim_controls(cfg));
    write_series(out, tr);
    const auto fit = decay_fit(cfg, tr);
    json hist = json::array();
    for (const auto& [T, c] : res.projection_history) hist.push_back({{"T", T}, {"coeff", c}});
    json j = {{"T_star", res.T_star}, {"lo", res.lo}, {"hi", res.hi}, {"width", res.hi - res.lo},
              {"converged", res.converged}, {"evaluations", res.evaluations}, {"lambda", cfg.model.lambda},
              {"divergent_at_T_star", tr.divergent}, {"decay_fit", fit ? fit_json(*fit) : json(nullptr)},
              {"history", hist}};
    out.write("shoot.json", j.dump(2) + "\n");
    Metrics m{{"T_star", res.T_star}, {"converged", res.converged ? 1.0 : 0.0}};
    if (fit) m.push_back({"omega_fit", -fit->exponent});
    return m;
}

Metrics cmd_spectrum(const RunConfig& cfg, Sink& out) {
    const auto rep = compute_spectrum(cfg.n_coarse, cfg.n_fine, cfg.match_tol, cfg.potential);
    json ev = json::array();
    int n_unstable = 0;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        ev.push_back({{"re", rep.eigenvalues[i].real()}, {"im", rep.eigenvalues[i].imag()},
                      {"resolved", static_cast<bool>(rep.resolved[i])}});
    }
    json unst = json::array();
    for (const auto& z : rep.unstable_list) {
        unst.push_back({{"re", z.real()}, {"im", z.imag()}});
        ++n_unstable;
    }
    json j = {{"n_coarse", rep.n_coarse}, {"n_fine", rep.n_fine}, {"match_tol", rep.match_tol},
              {"include_potential", rep.include_potential}, {"n_resolved_unstable", n_unstable},
              {"unstable", unst},
              {"has_unit", rep.has_unit},
              {"unit_eigenvalue", {{"re", rep.unit_eigenvalue.real()}, {"im", rep.unit_eigenvalue.imag()}}},
              {"unit_separation", rep.unit_separation},
              {"has_gap", rep.has_gap}, {"gap", rep.gap},
              {"symmetry_residual", rep.symmetry_residual}, {"unit_residual", rep.unit_residual},
              {"symmetry_angle", rep.symmetry_angle}, {"eigenvalues", ev}};
    out.write("spectrum.json", j.dump(2) + "\n");
    if (rep.has_unit) {
        const auto g = EvenChebyshev::build(cfg.n_coarse);
        const int m = g.size();
        Csv csv("rho,g_h_1,g_h_2,g_adj_1,g_adj_2");
        for (int k = 0; k < m; ++k) {
            csv.row({g.rho(k), rep.g_h(k), rep.g_h(m + k), rep.g_adj(k), rep.g_adj(m + k)});
        }
        out.write("eigenvectors.csv", csv.str());
    }
    return {{"n_resolved_unstable", static_cast<double>(n_unstable)}, {"gap", rep.gap},
            {"unit_eigenvalue", rep.unit_eigenvalue.real()}};
}

Metrics cmd_check_residual(const RunConfig& cfg, Sink& out) {
    // exact self-similar strong field solution sampled at three time levels
    ModelParams sf;
    sf.model = Model::strong_field;
    sf.alpha = 0.0;
    sf.beta = cfg.model.beta > 0.0 ? cfg.model.beta : 1.0;
    json levels = json::array();
    Csv csv("n,h,residual");
    double prev = 0.0, ratio = 0.0;
    for (int n : {cfg.n, 2 * cfg.n}) {
        const auto g = RadialGrid::uniform(cfg.r_max, n);
        const double dt = cfg.cfl * g.spacing;
        const double t = 0.25;
        const auto a = self_similar_state(g, t - dt, 1.0, FieldForm::angle);
        const auto b = self_similar_state(g, t, 1.0, FieldForm::angle);
        const auto c = self_similar_state(g, t + dt, 1.0, FieldForm::angle);
        const double res = residual_check(a, b, c, g, Equation::strong_field, sf);
        csv.row({static_cast<double>(n), g.spacing, res});
        levels.push_back({{"n", n}, {"h", g.spacing}, {"residual", res}});
        if (prev > 0.0) ratio = prev / res;
        prev = res;
    }
    // similarity system at the profile on a uniform rho grid
    SimilarityState st;
    const int m = 201;
    st.rho.resize(m);
    for (int i = 0; i < m; ++i) st.rho[i] = static_cast<double>(i) / (m - 1);
    st.phi1.assign(m, 0.0);
    st.phi2.assign(m, 0.0);
    const double sim_res = residual_check(st, Equation::similarity, true);
    out.write("residual.csv", csv.str());
    json j = {{"physical", levels}, {"refinement_ratio", ratio}, {"similarity_profile_residual", sim_res}};
    out.write("residual.json", j.dump(2) + "\n");
    return {{"refinement_ratio", ratio}, {"similarity_profile_residual", sim_res}};
}

Metrics dispatch(const RunConfig& cfg, Sink& out) {
    switch (cfg.command) {
        case Command::profile: return cmd_profile(cfg, out);
        case Command::verify_rhs: return cmd_verify_rhs(cfg, out);
        case Command::verify_coeffs: return cmd_verify_coeffs(cfg, out);
        case Command::evolve: return cmd_evolve(cfg, out);
        case Command::evolve_sim: return cmd_evolve_sim(cfg, out);
        case Command::shoot: return cmd_shoot(cfg, out);
        case Command::spectrum: return cmd_spectrum(cfg, out);
        case Command::check_residual: return cmd_check_residual(cfg, out);
        case Command::sweep: break;
    }
    throw ConfigError("command", "sweep is driven through sweep()");
}

json record_json(const RunRecord& r) {
    json outs = json::array();
    for (const auto& o : r.outputs) outs.push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    json metrics = json::object();
    for (const auto& [k, v] : r.metrics) metrics[k] = v;
    return {{"command", r.command}, {"version", r.version}, {"ok", r.ok}, {"error", r.error},
            {"wall_time", r.wall_time}, {"metrics", metrics}, {"outputs", outs}, {"config", r.config}};
}

}  // namespace

std::string to_string(Command c) {
    for (const auto& [name, cmd] : command_table()) {
        if (cmd == c) return name;
    }
    return "?";
}

Command parse_command(const std::string& name) {
    const auto& t = command_table();
    const auto it = t.find(name);
    if (it == t.end()) throw ConfigError("command", "unknown command '" + name + "'");
    return it->second;
}

RunConfig parse_config(const std::string& text) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream in(text);
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config", std::string("malformed INI: ") + e.message() + " (line " +
                                        std::to_string(e.line()) + ")");
    }
    RunConfig cfg;
    const auto& table = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty()) {
            const auto it = table.find(section);
            if (it == table.end()) throw ConfigError(section, "unknown key");
            it->second(cfg, section, body.data());
            continue;
        }
        for (const auto& [key, leaf] : body) {
            const std::string field = section + "." + key;
            const auto it = table.find(field);
            if (it == table.end()) throw ConfigError(field, "unknown key");
            it->second(cfg, field, leaf.data());
        }
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(const RunConfig& cfg) {
    const Command cmd = cfg.command == Command::sweep ? cfg.sweep_command : cfg.command;
    if (cfg.command == Command::sweep) {
        need(cfg.sweep_command != Command::sweep, "sweep.command", "cannot nest sweeps");
        need(!cfg.sweep_lambda.empty(), "sweep.lambda", "empty parameter grid");
        for (double l : cfg.sweep_lambda) need(std::isfinite(l) && l >= 0.0, "sweep.lambda", "entries must be >= 0");
        for (double e : cfg.sweep_eps) need(std::isfinite(e) && e >= 0.0, "sweep.eps", "entries must be >= 0");
    }
    need(cfg.workers >= 1, "output.workers", "must be >= 1");
    need(!cfg.out_dir.empty(), "output.dir", "must not be empty");

    const bool sim = cmd == Command::evolve_sim || cmd == Command::shoot;
    if (sim) {
        need(std::isfinite(cfg.model.lambda) && cfg.model.lambda >= 0.0, "model.lambda", "must be finite and >= 0");
    } else if (cmd == Command::evolve) {
        try {
            cfg.model.validate();
        } catch (const ConfigError& e) {
            throw ConfigError("model." + e.field(), e.what());
        }
    } else {
        need(std::isfinite(cfg.model.lambda) && cfg.model.lambda > 0.0, "model.lambda", "must be finite and > 0");
    }

    switch (cmd) {
        case Command::profile:
            need(cfg.profile_samples >= 2, "profile.samples", "must be >= 2");
            break;
        case Command::verify_coeffs:
            need(cfg.coeff_samples >= 1, "coeffs.samples", "must be >= 1");
            need(finite_pos(cfg.coeff_tol), "coeffs.tol", "must be > 0");
            break;
        case Command::evolve:
        case Command::check_residual:
            need(cfg.n >= 16, "evolve.n", "must be >= 16");
            need(finite_pos(cfg.r_max), "evolve.r_max", "must be > 0");
            need(finite_pos(cfg.cfl) && cfg.cfl <= 1.0, "evolve.cfl", "must lie in (0, 1]");
            need(finite_pos(cfg.t_end), "evolve.t_end", "must be > 0");
            need(std::isfinite(cfg.amplitude), "evolve.amplitude", "must be finite");
            need(finite_pos(cfg.width), "evolve.width", "must be > 0");
            need(cfg.stride >= 0, "evolve.stride", "must be >= 0");
            need(finite_pos(cfg.fit_fraction) && cfg.fit_fraction <= 1.0, "evolve.fit_fraction",
                 "must lie in (0, 1]");
            need(std::isfinite(cfg.dissipation) && cfg.dissipation >= 0.0 && cfg.dissipation <= 1.0,
                 "evolve.dissipation", "must lie in [0, 1]");
            if (cmd == Command::check_residual) {
                need(cfg.r_max <= 1.5, "evolve.r_max", "must be <= 1.5 for the exact solution check");
            }
            break;
        case Command::evolve_sim:
        case Command::shoot:
            need(cfg.M >= 32 && cfg.M <= 256, "similarity.M", "must lie in [32, 256]");
            need(finite_pos(cfg.sim_cfl) && cfg.sim_cfl <= 2.0, "similarity.cfl", "must lie in (0, 2]");
            need(finite_pos(cfg.tau_end), "similarity.tau_end", "must be > 0");
            need(std::isfinite(cfg.eps) && std::abs(cfg.eps) <= 0.1, "similarity.eps", "must satisfy |eps| <= 0.1");
            need(cfg.norm_k >= 0 && cfg.norm_k <= kMaxNormOrder, "similarity.norm_k", "must lie in [0, 5]");
            need(std::isfinite(cfg.fit_t0) && std::isfinite(cfg.fit_t1) && cfg.fit_t1 > cfg.fit_t0 &&
                     cfg.fit_t0 >= 0.0,
                 "similarity.fit_t1", "fit window must satisfy 0 <= fit_t0 < fit_t1");
            if (cmd == Command::evolve_sim) {
                need(cfg.model.T >= 0.5 && cfg.model.T <= 1.5, "model.T", "must lie in [0.5, 1.5]");
            } else {
                need(cfg.bracket_lo >= 0.8 && cfg.bracket_hi <= 1.2 && cfg.bracket_lo < cfg.bracket_hi,
                     "similarity.bracket_lo", "bracket must satisfy 0.8 <= lo < hi <= 1.2");
                need(finite_pos(cfg.tol), "similarity.tol", "must be > 0");
                need(finite_pos(cfg.horizon), "similarity.horizon", "must be > 0");
            }
            break;
        case Command::spectrum:
            need(cfg.n_coarse >= 32, "spectrum.n_coarse", "must be >= 32");
            need(cfg.n_fine >= 1.5 * cfg.n_coarse, "spectrum.n_fine", "must be >= 1.5 n_coarse");
            need(cfg.n_fine <= 512, "spectrum.n_fine", "must be <= 512");
            need(finite_pos(cfg.match_tol), "spectrum.match_tol", "must be > 0");
            break;
        case Command::verify_rhs:
        case Command::sweep:
            break;
    }
}

std::string config_to_ini(const RunConfig& c) {
    std::ostringstream s;
    auto kv = [&s](const std::string& k, const std::string& v) { s << k << " = " << v << '\n'; };
    kv("command", to_string(c.command));
    s << "\n[model]\n";
    kv("kind", model_str(c.model.model));
    kv("alpha", num(c.model.alpha));
    kv("beta", num(c.model.beta));
    kv("lambda", num(c.model.lambda));
    kv("T", num(c.model.T));
    s << "\n[profile]\n";
    kv("samples", std::to_string(c.profile_samples));
    s << "\n[coeffs]\n";
    kv("samples", std::to_string(c.coeff_samples));
    kv("tol", num(c.coeff_tol));
    s << "\n[evolve]\n";
    kv("n", std::to_string(c.n));
    kv("r_max", num(c.r_max));
    kv("cfl", num(c.cfl));
    kv("t_end", num(c.t_end));
    kv("data", c.data == DataKind::self_similar ? "self_similar" : "bump");
    kv("amplitude", num(c.amplitude));
    kv("width", num(c.width));
    kv("stride", std::to_string(c.stride));
    kv("fit_fraction", num(c.fit_fraction));
    kv("dissipation", num(c.dissipation));
    s << "\n[similarity]\n";
    kv("M", std::to_string(c.M));
    kv("cfl", num(c.sim_cfl));
    kv("tau_end", num(c.tau_end));
    kv("eps", num(c.eps));
    kv("seed", std::to_string(c.seed));
    kv("bracket_lo", num(c.bracket_lo));
    kv("bracket_hi", num(c.bracket_hi));
    kv("tol", num(c.tol));
    kv("horizon", num(c.horizon));
    kv("norm_k", std::to_string(c.norm_k));
    kv("fit_t0", num(c.fit_t0));
    kv("fit_t1", num(c.fit_t1));
    s << "\n[spectrum]\n";
    kv("n_coarse", std::to_string(c.n_coarse));
    kv("n_fine", std::to_string(c.n_fine));
    kv("match_tol", num(c.match_tol));
    kv("potential", c.potential ? "true" : "false");
    s << "\n[sweep]\n";
    kv("command", to_string(c.sweep_command));
    kv("lambda", list_str(c.sweep_lambda));
    kv("eps", list_str(c.sweep_eps));
    return s.str();
}

std::string code_version() { return SKYRMELAB_VERSION; }

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return sha256_hex(ss.str());
}

RunRecord run(const RunConfig& cfg) {
    if (cfg.command == Command::sweep) throw ConfigError("command", "use sweep() for sweeps");
    validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    fs::create_directories(cfg.out_dir);
    Sink out(cfg.out_dir);

    RunRecord rec;
    rec.command = to_string(cfg.command);
    rec.config = config_to_ini(cfg);
    rec.version = code_version();
    rec.dir = cfg.out_dir;
    auto finish = [&] {
        rec.outputs = out.manifest();
        rec.wall_time = cfg.deterministic
                            ? 0.0
                            : std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::ofstream f(cfg.out_dir / "record.json", std::ios::binary);
        f << record_json(rec).dump(2) << '\n';
    };
    try {
        rec.metrics = dispatch(cfg, out);
    } catch (const std::exception& e) {
        rec.ok = false;
        rec.error = e.what();
        finish();
        throw;
    }
    finish();
    return rec;
}

std::vector<RunRecord> sweep(const RunConfig& cfg) {
    validate(cfg);
    struct Cell {
        double lambda, eps;
    };
    std::vector<Cell> cells;
    std::vector<double> lambdas = cfg.sweep_lambda;
    std::vector<double> epss = cfg.sweep_eps.empty() ? std::vector<double>{cfg.eps} : cfg.sweep_eps;
    std::sort(lambdas.begin(), lambdas.end());
    std::sort(epss.begin(), epss.end());
    for (double l : lambdas) {
        for (double e : epss) cells.push_back({l, e});
    }
    fs::create_directories(cfg.out_dir);

    std::vector<RunRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            RunConfig c = cfg;
            c.command = cfg.sweep_command;
            c.model.lambda = cells[i].lambda;
            c.eps = cells[i].eps;
            char name[32];
            std::snprintf(name, sizeof name, "cell_%03zu", i);
            c.out_dir = cfg.out_dir / name;
            try {
                records[i] = run(c);
            } catch (const std::exception& e) {
                records[i].command = to_string(c.command);
                records[i].config = config_to_ini(c);
                records[i].version = code_version();
                records[i].dir = c.out_dir;
                records[i].ok = false;
                records[i].error = e.what();
            }
        }
    };
    const int nw = std::max(1, std::min<int>(cfg.workers, static_cast<int>(cells.size())));
    std::vector<std::thread> pool;
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    auto metric = [](const RunRecord& r, const std::string& key) {
        for (const auto& [k, v] : r.metrics) {
            if (k == key) return v;
        }
        return std::nan("");
    };
    Csv summary("cell,lambda,eps,ok,T_star,omega_fit,exponent_fit");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& r = records[i];
        summary.row({static_cast<double>(i), cells[i].lambda, cells[i].eps, r.ok ? 1.0 : 0.0, metric(r, "T_star"),
                     metric(r, "omega_fit"), metric(r, "exponent_fit")});
    }
    std::ofstream f(cfg.out_dir / "summary.csv", std::ios::binary);
    f << summary.str();
    return records;
}

}  // namespace skyrme
