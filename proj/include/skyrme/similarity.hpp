#pragma once

/**
 * @file similarity.hpp
 * @brief Perturbations of the profile in similarity coordinates
 *        tau = log(T/(T-t)), rho = r/(T-t), evolved by even Chebyshev
 *        collocation and RK4.
 */

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "skyrme/collocation.hpp"
#include "skyrme/field.hpp"
#include "skyrme/spectral.hpp"

namespace skyrme {

/// Grid, profile samples and (optionally) the unstable-mode projection.
struct SimilarityContext {
    EvenChebyshev grid;
    Eigen::MatrixXd lap;
    Eigen::VectorXd U1, U2, dU1, V1, V2;
    std::optional<Projection> projection;

    /// Grid and profile only.
    static SimilarityContext make(int M);
    /// Also computes the spectrum on (M, ceil(1.5 M)) and stores the projection.
    static SimilarityContext with_projection(int M, double match_tol = 1e-3);

    int size() const { return grid.size(); }
};

using RadialFn = std::function<double(double)>;

/**
 * phi_i(0, rho) = T^i v_i(T rho) + T^i U_i(T rho) - U_i(rho).  v is defined on
 * [0, v_radius]; T rho beyond that is a domain error.  T must lie in [1/2, 3/2].
 */
SimilarityState initial_data(const SimilarityContext& ctx, const RadialFn& v1, const RadialFn& v2,
                             double T, double v_radius = 2.0);

SimilarityState zero_state(const SimilarityContext& ctx);

struct RhsParts {
    bool free = true;
    bool potential = true;
    bool nonlinear = true;
    bool correction = true;
};

/**
 * Right-hand side of the perturbation system.  The correction block depends
 * on (lambda, T, tau) only through s = lambda T e^{-tau}.  Throws GuardError
 * when |rho phi1| exceeds the guard A.
 */
std::pair<Eigen::VectorXd, Eigen::VectorXd> rhs_similarity(const SimilarityContext& ctx,
                                                           const SimilarityState& state,
                                                           double lambda, double T,
                                                           const RhsParts& parts = {});

struct SimilarityControls {
    double cfl = 1.0;     // dtau = cfl * (smallest node gap)
    int stride = 10;      // record every stride steps
    int norm_k = 2;
    RhsParts parts;
    bool keep_states = false;
    std::vector<double> output_taus;  // states landed on exactly
};

struct SimilarityTrajectory {
    std::vector<double> tau;
    std::vector<double> norm;
    std::vector<double> coeff;  // empty without a projection
    std::vector<SimilarityState> states;  // every recorded state when keep_states
    std::vector<SimilarityState> landed;  // states at output_taus
    SimilarityState final_state;
    bool divergent = false;
    std::string reason;
    double dtau = 0.0;
};

SimilarityTrajectory evolve_similarity(const SimilarityContext& ctx, const SimilarityState& init,
                                       double lambda, double T, double tau_end,
                                       const SimilarityControls& controls = {});

/// Adjoint pairing with g_h; throws DependencyError without spectral data.
double project_unstable(const SimilarityContext& ctx, const SimilarityState& state);

struct ShootingResult {
    double T_star = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool converged = false;
    int evaluations = 0;
    std::vector<std::pair<double, double>> projection_history;  // (T, coefficient at horizon)
};

struct ShootingControls {
    double tau_horizon = 6.0;
    SimilarityControls evolve;
    int max_iterations = 80;
};

/**
 * Bisection on T of the sign of the unstable coefficient at tau_horizon,
 * finished by a secant step inside the final bracket.  Runs leaving the guard
 * contribute the sign of their last recorded coefficient; AmplitudeError when
 * the data already violates the guard at both endpoints.
 */
ShootingResult shoot_T(const SimilarityContext& ctx, const RadialFn& v1, const RadialFn& v2,
                       double lambda, double lo, double hi, double tol,
                       const ShootingControls& controls = {});

}  // namespace skyrme
