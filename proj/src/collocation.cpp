#include "skyrme/collocation.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "skyrme/errors.hpp"

namespace skyrme {

namespace {

using std::numbers::pi;

// Chebyshev extrema x_j = cos(pi j / N) with the trigonometric form of x_i - x_j.
Eigen::MatrixXd cheb_diff(int N, Eigen::VectorXd& x, Eigen::MatrixXd* D2out = nullptr) {
    x.resize(N + 1);
    for (int j = 0; j <= N; ++j) x(j) = std::sin(pi * (N - 2.0 * j) / (2.0 * N));
    Eigen::VectorXd c = Eigen::VectorXd::Ones(N + 1);
    c(0) = c(N) = 2.0;
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int i = 0; i <= N; ++i) {
        for (int j = 0; j <= N; ++j) {
            if (i == j) continue;
            const double dx = 2.0 * std::sin(pi * (i + j) / (2.0 * N)) * std::sin(pi * (j - i) / (2.0 * N));
            const double sgn = ((i + j) % 2) ? -1.0 : 1.0;
            D(i, j) = sgn * c(i) / (c(j) * dx);
        }
    }
    for (int i = 0; i <= N; ++i) D(i, i) = -D.row(i).sum();
    if (D2out) {
        // explicit second derivative, diagonal again by negative sums
        Eigen::MatrixXd& D2 = *D2out;
        D2 = Eigen::MatrixXd::Zero(N + 1, N + 1);
        for (int i = 0; i <= N; ++i) {
            for (int j = 0; j <= N; ++j) {
                if (i == j) continue;
                const double dx = 2.0 * std::sin(pi * (i + j) / (2.0 * N)) * std::sin(pi * (j - i) / (2.0 * N));
                D2(i, j) = 2.0 * D(i, j) * (D(i, i) - 1.0 / dx);
            }
            D2(i, i) = -D2.row(i).sum();
        }
    }
    return D;
}

// Clenshaw-Curtis weights on the N+1 extrema for the integral over [-1, 1].
Eigen::VectorXd clenshaw_curtis(int N) {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(N + 1);
    for (int j = 0; j <= N; ++j) {
        const double theta = pi * j / N;
        double s = 0.0;
        for (int k = 1; k <= N / 2; ++k) {
            const double b = (2 * k == N) ? 1.0 : 2.0;
            s += b * std::cos(2.0 * k * theta) / (4.0 * k * k - 1.0);
        }
        const double cj = (j == 0 || j == N) ? 1.0 : 2.0;
        w(j) = cj / N * (1.0 - s);
    }
    return w;
}

}  // namespace

EvenChebyshev EvenChebyshev::build(int M) {
    if (M < 2) throw DomainError("even Chebyshev grid needs M >= 2, got " + std::to_string(M));
    const int N = 2 * M;
    Eigen::VectorXd x;
    Eigen::MatrixXd DD;
    const Eigen::MatrixXd D = cheb_diff(N, x, &DD);
    const Eigen::VectorXd w = clenshaw_curtis(N);

    EvenChebyshev g;
    g.M = M;
    g.rho.resize(M + 1);
    g.weights.resize(M + 1);
    // half-grid index k <-> full index j = M - k (x_j = rho_k), mirror N - j
    for (int k = 0; k <= M; ++k) {
        const int j = M - k;
        g.rho(k) = (k == 0) ? 0.0 : x(j);
        g.weights(k) = (k == 0) ? 0.5 * w(j) : w(j);
    }
    g.rho(M) = 1.0;
    auto fold = [&](const Eigen::MatrixXd& A, double parity) {
        Eigen::MatrixXd B(M + 1, M + 1);
        for (int k = 0; k <= M; ++k) {
            const int i = M - k;
            for (int l = 0; l <= M; ++l) {
                const int j = M - l;
                B(k, l) = (l == 0) ? A(i, j) : A(i, j) + parity * A(i, N - j);
            }
        }
        return B;
    };
    g.D = fold(D, 1.0);
    g.D_odd = fold(D, -1.0);
    g.D2 = fold(DD, 1.0);
    // odd functions vanish at the centre
    g.D_odd.col(0).setZero();
    return g;
}

double EvenChebyshev::interpolate(const Eigen::VectorXd& f, double r, bool odd) const {
    if (f.size() != size()) throw ShapeError("interpolation data does not match grid");
    if (r < 0.0 || r > 1.0) throw DomainError("interpolation point outside [0, 1]");
    const int N = 2 * M;
    // full-grid values: node j at x_j = cos(pi j/N) maps to half index |.|
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j <= N; ++j) {
        const double xj = std::cos(pi * j / N);
        const int k = (j <= M) ? M - j : j - M;
        double fj = f(k);
        if (odd && j > M) fj = -fj;
        const double dx = r - xj;
        if (std::abs(dx) < 1e-15) return (odd && j > M) ? -f(k) : f(k);
        double wj = (j % 2) ? -1.0 : 1.0;
        if (j == 0 || j == N) wj *= 0.5;
        num += wj * fj / dx;
        den += wj / dx;
    }
    return num / den;
}

Eigen::MatrixXd EvenChebyshev::laplacian7() const {
    Eigen::MatrixXd L = D2;
    L.row(0) = 7.0 * D2.row(0);
    for (int k = 1; k <= M; ++k) L.row(k) += (6.0 / rho(k)) * D.row(k);
    return L;
}

}  // namespace skyrme
