#pragma once

/**
 * @file physical.hpp
 * @brief Method-of-lines solvers in physical coordinates (t, r).
 *
 * evolve_physical advances the angle psi of the lambda-rescaled Skyrme
 * equation (alpha' = alpha lambda^2; alpha' = 0 for the strong field model),
 *
 *   (a' + 4b s^2/r^2)(psi_tt - psi_rr) - (4/r)(a' + 2b s^2/r^2) psi_r
 *     + (2 sin 2psi / r^2)(a' + b(psi_t^2 - psi_r^2 + 3 s^2/r^2)) = 0,
 *
 * solved for psi_tt.  evolve_semilinear advances u = psi/r on R^{1+7}.
 * Both use second-order central differences, RK4 and dt = cfl*h.
 */

#include <string>
#include <vector>

#include "skyrme/field.hpp"
#include "skyrme/model_rhs.hpp"

namespace skyrme {

enum class OuterBoundary {
    extrapolate,  // one-sided stencils, no condition imposed
    reflect,      // homogeneous Neumann via a mirror ghost node
};

struct EvolveControls {
    double cfl = 0.5;
    double ceiling_factor = 1e4;     // stop when |g(t)| > factor * |g(0)|
    double resolution_limit = 0.05;  // stop when |g(t)| * h exceeds this
    bool excise = true;
    double excision_angle = 2.356194490192345;  // 3 pi / 4
    int min_active = 16;
    // Fourth-difference damping of grid-scale modes, scaled as eps / (16 h).
    double dissipation = 0.3;
    OuterBoundary boundary = OuterBoundary::extrapolate;
    int stride = 0;                      // snapshot every `stride` steps (0: none)
    std::vector<double> output_times;    // snapshots landed on exactly
    long max_steps = 50'000'000;
};

struct Trajectory {
    std::vector<double> t;
    std::vector<double> origin_gradient;  // psi_r(t, 0), or u(t, 0) in the reduced form
    std::vector<FieldState> snapshots;
    FieldState final_state;
    bool truncated = false;
    std::string stop_reason;  // "t_end", "ceiling", "under_resolved", "degenerate", "excised"
    int active_outer = 0;
};

/// Angle form of the full or strong field model.  init.form must be angle.
Trajectory evolve_physical(const ModelParams& params, const RadialGrid& grid, const FieldState& init,
                           double t_end, const EvolveControls& controls = {});

/// Reduced form u = psi/r of the full (or strong field) model.
Trajectory evolve_semilinear(const ModelParams& params, const RadialGrid& grid,
                             const FieldState& init, double t_end,
                             const EvolveControls& controls = {});

/// Exact self-similar strong field solution U(r/(T-t)) with its time derivative.
FieldState self_similar_state(const RadialGrid& grid, double t, double T, FieldForm form);

struct BlowupReport {
    bool detected = false;
    double T_fit = 0.0;
    double c_fit = 0.0;
    double exponent_fit = 0.0;
    double residual = 0.0;
    double window_start = 0.0;
    double window_end = 0.0;
    int n_points = 0;
    std::string note;
};

/**
 * Fit |g(t)| = c (T - t)^e over the last fraction of the trajectory with T
 * chosen by golden-section search on log(T - t_last) minimising the
 * least-squares residual.
 */
BlowupReport fit_blowup_rate(const std::vector<double>& t, const std::vector<double>& g,
                             double fit_window_fraction);
BlowupReport fit_blowup_rate(const Trajectory& traj, double fit_window_fraction);

}  // namespace skyrme
