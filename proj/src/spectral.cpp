#include "skyrme/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "skyrme/coeffs.hpp"
#include "skyrme/errors.hpp"
#include "skyrme/profile.hpp"

namespace skyrme {

namespace {

constexpr double kUnitTol = 1e-4;

Eigen::VectorXd weight6(const EvenChebyshev& g) {
    return g.weights.cwiseProduct(g.rho.array().pow(6).matrix());
}

double interp_error(const EvenChebyshev& g, double (*f)(double)) {
    Eigen::VectorXd v(g.size());
    for (int k = 0; k < g.size(); ++k) v(k) = f(g.rho(k));
    double err = 0.0;
    for (int k = 0; k < g.M; ++k) {
        const double r = 0.5 * (g.rho(k) + g.rho(k + 1));
        err = std::max(err, std::abs(g.interpolate(v, r) - f(r)));
    }
    return err;
}

Eigen::VectorXd inverse_iteration(const Eigen::MatrixXd& A, double mu) {
    const Eigen::Index m = A.rows();
    const Eigen::MatrixXd S = A - mu * Eigen::MatrixXd::Identity(m, m);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(S);
    Eigen::VectorXd x = Eigen::VectorXd::Ones(m);
    for (int it = 0; it < 6; ++it) {
        x = lu.solve(x);
        const double nrm = x.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) throw LinearAlgebraError("inverse iteration failed");
        x /= nrm;
    }
    return x;
}

std::vector<std::complex<double>> eigvals(const Eigen::MatrixXd& A) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success) throw LinearAlgebraError("dense eigensolve did not converge");
    std::vector<std::complex<double>> ev(es.eigenvalues().data(),
                                         es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(ev.begin(), ev.end(), [](auto a, auto b) {
        return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag();
    });
    return ev;
}

}  // namespace

OperatorMatrix assemble_L(int n, bool include_potential) {
    if (n < 32) throw ResolutionError("operator needs n >= 32, got " + std::to_string(n));
    OperatorMatrix op;
    op.n = n;
    op.include_potential = include_potential;
    op.grid = EvenChebyshev::build(n);
    const auto& g = op.grid;
    if (include_potential) {
        const double err = std::max(interp_error(g, v1), interp_error(g, v2));
        if (err > 1e-8) {
            throw ResolutionError("grid too coarse for the potentials (interpolation error " +
                                  std::to_string(err) + ")");
        }
    }
    const int m = g.size();
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd R = g.rho.asDiagonal();
    op.A = Eigen::MatrixXd::Zero(2 * m, 2 * m);
    op.A.topLeftCorner(m, m) = -R * g.D - I;
    op.A.topRightCorner(m, m) = I;
    op.A.bottomLeftCorner(m, m) = g.laplacian7();
    op.A.bottomRightCorner(m, m) = -R * g.D - 4.0 * I;
    if (include_potential) {
        Eigen::VectorXd V1(m), V2(m);
        for (int k = 0; k < m; ++k) {
            V1(k) = v1(g.rho(k));
            V2(k) = v2(g.rho(k));
        }
        op.A.bottomLeftCorner(m, m) += Eigen::MatrixXd(V1.asDiagonal()) -
                                       V2.cwiseProduct(g.rho).asDiagonal() * g.D;
        op.A.bottomRightCorner(m, m) +=
            Eigen::MatrixXd(V2.cwiseProduct(g.rho.cwiseAbs2()).asDiagonal());
    }
    return op;
}

Eigen::VectorXd symmetry_mode(const EvenChebyshev& g) {
    const auto p = profile_constants(5);
    const int m = g.size();
    Eigen::VectorXd v(2 * m);
    for (int k = 0; k < m; ++k) {
        const double r = g.rho(k);
        const double up = eval_U_prime(p, r);
        v(k) = up;
        v(m + k) = 2.0 * up + r * eval_U_second(p, r);
    }
    return v;
}

double weighted_dot(const EvenChebyshev& g, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const int m = g.size();
    const Eigen::VectorXd w = weight6(g);
    return (w.array() * a.head(m).array() * b.head(m).array()).sum() +
           (w.array() * a.tail(m).array() * b.tail(m).array()).sum();
}

double symmetry_residual(int n) {
    const auto op = assemble_L(n, true);
    const Eigen::VectorXd g = symmetry_mode(op.grid);
    const Eigen::VectorXd r = op.A * g - g;
    return std::sqrt(weighted_dot(op.grid, r, r) / weighted_dot(op.grid, g, g));
}

SpectrumReport compute_spectrum(int n_coarse, int n_fine, double match_tol, bool include_potential) {
    if (n_fine < 1.5 * n_coarse) throw DomainError("n_fine must be at least 1.5 n_coarse");
    if (!(match_tol > 0.0)) throw DomainError("match_tol must be positive");
    // the two resolutions are independent
    auto fine_job = std::async(std::launch::async, [=] {
        const auto op = assemble_L(n_fine, include_potential);
        return eigvals(op.A);
    });
    const auto coarse = assemble_L(n_coarse, include_potential);

    SpectrumReport rep;
    rep.n_coarse = n_coarse;
    rep.n_fine = n_fine;
    rep.match_tol = match_tol;
    rep.include_potential = include_potential;
    rep.eigenvalues = eigvals(coarse.A);
    rep.eigenvalues_fine = fine_job.get();
    for (const auto& z : rep.eigenvalues) {
        double best = INFINITY;
        for (const auto& w : rep.eigenvalues_fine) best = std::min(best, std::abs(z - w));
        rep.resolved.push_back(best <= match_tol);
    }

    // eigenvalue nearest 1 among the resolved set
    int unit = -1;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        if (!rep.resolved[i]) continue;
        const auto z = rep.eigenvalues[i];
        if (z.real() >= 0.0) rep.unstable_list.push_back(z);
        if (std::abs(z - 1.0) <= kUnitTol &&
            (unit < 0 || std::abs(z - 1.0) < std::abs(rep.eigenvalues[unit] - 1.0))) {
            unit = static_cast<int>(i);
        }
    }
    rep.has_unit = unit >= 0;
    rep.unit_separation = INFINITY;
    for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i) {
        if (!rep.resolved[i] || static_cast<int>(i) == unit) continue;
        const auto z = rep.eigenvalues[i];
        if (!rep.has_gap || z.real() > rep.gap) rep.gap = z.real();
        rep.has_gap = true;
        if (unit >= 0) rep.unit_separation = std::min(rep.unit_separation, std::abs(z - rep.eigenvalues[unit]));
    }

    const auto& g = coarse.grid;
    const Eigen::VectorXd sym = symmetry_mode(g);
    {
        const Eigen::VectorXd r = coarse.A * sym - sym;
        rep.symmetry_residual = std::sqrt(weighted_dot(g, r, r) / weighted_dot(g, sym, sym));
    }
    if (unit >= 0) {
        const double mu = rep.eigenvalues[unit].real();
        rep.unit_eigenvalue = rep.eigenvalues[unit];
        Eigen::VectorXd gh = inverse_iteration(coarse.A, mu + 1e-10);
        gh /= std::sqrt(weighted_dot(g, gh, gh));
        for (Eigen::Index k = 0; k < gh.size(); ++k) {
            if (std::abs(gh(k)) > 1e-12) {
                if (gh(k) < 0.0) gh = -gh;
                break;
            }
        }
        Eigen::VectorXd ga = inverse_iteration(coarse.A.transpose(), mu + 1e-10);
        ga /= ga.dot(gh);
        rep.g_h = gh;
        rep.g_adj = ga;
        const Eigen::VectorXd r = coarse.A * gh - mu * gh;
        rep.unit_residual = std::sqrt(weighted_dot(g, r, r));
        const double c = weighted_dot(g, gh, sym) / std::sqrt(weighted_dot(g, sym, sym));
        rep.symmetry_angle = std::acos(std::min(1.0, std::abs(c)));
    }
    return rep;
}

Projection export_projection(const SpectrumReport& report) {
    if (!report.has_unit || report.g_h.size() == 0) {
        throw DependencyError("eigenvalue 1 is not resolved; no projection available");
    }
    Projection p;
    p.n = report.n_coarse;
    p.g_h = report.g_h;
    p.g_adj = report.g_adj;
    p.normalization = report.g_adj.dot(report.g_h);
    return p;
}

Eigen::MatrixXcd resolved_eigenvectors(const SpectrumReport& report) {
    const auto op = assemble_L(report.n_coarse, report.include_potential);
    Eigen::EigenSolver<Eigen::MatrixXd> es(op.A, true);
    if (es.info() != Eigen::Success) throw LinearAlgebraError("dense eigensolve did not converge");
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        if (!report.resolved[i]) continue;
        Eigen::Index best = 0;
        double d = INFINITY;
        for (Eigen::Index j = 0; j < es.eigenvalues().size(); ++j) {
            const double dj = std::abs(es.eigenvalues()(j) - report.eigenvalues[i]);
            if (dj < d) {
                d = dj;
                best = j;
            }
        }
        cols.push_back(best);
    }
    Eigen::MatrixXcd V(op.A.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t c = 0; c < cols.size(); ++c) V.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(cols[c]);
    return V;
}

}  // namespace skyrme
