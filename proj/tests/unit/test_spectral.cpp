#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "skyrme/coeffs.hpp"
#include "skyrme/errors.hpp"
#include "skyrme/spectral.hpp"

using namespace skyrme;
using doctest::Approx;

namespace {

const SpectrumReport& report_96() {
    static const SpectrumReport r = compute_spectrum(96, 144, 1e-3);
    return r;
}

const SpectrumReport& report_128() {
    static const SpectrumReport r = compute_spectrum(128, 192, 1e-3);
    return r;
}

std::vector<std::complex<double>> resolved(const SpectrumReport& r) {
    std::vector<std::complex<double>> out;
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i) {
        if (r.resolved[i]) out.push_back(r.eigenvalues[i]);
    }
    return out;
}

}  // namespace

TEST_CASE("operator size and minimum resolution") {
    const auto op = assemble_L(32);
    CHECK(op.n == 32);
    CHECK(op.A.rows() == 66);
    CHECK(op.A.cols() == 66);
    CHECK_THROWS_AS(assemble_L(16), ResolutionError);
}

TEST_CASE("free operator on a constant first component") {
    const auto op = assemble_L(40, false);
    const int m = op.grid.size();
    Eigen::VectorXd v = Eigen::VectorXd::Zero(2 * m);
    v.head(m).setConstant(2.5);
    const Eigen::VectorXd w = op.A * v;
    CHECK((w.head(m).array() + 2.5).abs().maxCoeff() <= 1e-10);
    // rounding in the second-derivative matrix, whose entries grow like M^4
    CHECK(w.tail(m).cwiseAbs().maxCoeff() <= 1e-14 * 2.5 * op.A.cwiseAbs().maxCoeff() * m);
}

TEST_CASE("potential only touches the second block") {
    const auto a = assemble_L(40, true);
    const auto b = assemble_L(40, false);
    const int m = a.grid.size();
    const Eigen::MatrixXd d = a.A - b.A;
    CHECK(d.topRows(m).cwiseAbs().maxCoeff() == 0.0);
    // second block: V1 u1 + V2 rho^2 u2 - V2 rho d/drho u1
    const Eigen::VectorXd rho = a.grid.rho;
    for (int k = 0; k < m; ++k) {
        const double r = rho(k);
        CHECK(d(m + k, m + k) == Approx(v2(r) * r * r).epsilon(1e-12));
        Eigen::RowVectorXd want = -v2(r) * r * a.grid.D.row(k);
        want(k) += v1(r);
        CHECK((d.block(m + k, 0, 1, m) - want).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
}

TEST_CASE("symmetry mode is an eigenvector with eigenvalue one") {
    CHECK(symmetry_residual(128) <= 1e-6);
    CHECK(symmetry_residual(64) <= 1e-6);
}

TEST_CASE("symmetry residual decreases from 128 to 192 nodes" * doctest::should_fail()) {
    // the residual is at the rounding floor by 128 nodes and grows with the
    // conditioning of the collocation matrices, so this refinement ordering fails
    CHECK(symmetry_residual(192) < symmetry_residual(128));
}

TEST_CASE("one simple unstable eigenvalue at 1") {
    for (const auto* r : {&report_96(), &report_128()}) {
        REQUIRE(r->unstable_list.size() == 1);
        CHECK(std::abs(r->unstable_list[0] - 1.0) <= 1e-4);
        CHECK(r->has_unit);
        CHECK(r->unit_separation > 0.1);
        CHECK(r->unit_residual <= 1e-6);
    }
}

TEST_CASE("measured gap is positive and stable across filter pairs") {
    CHECK(report_128().has_gap);
    CHECK(-report_128().gap > 0.0);
    CHECK(std::abs(report_128().gap - report_96().gap) <= 1e-3);
    for (const auto& z : resolved(report_128())) {
        if (std::abs(z - 1.0) > 1e-4) CHECK(z.real() <= report_128().gap);
    }
}

TEST_CASE("resolved sets agree between filter pairs") {
    const auto a = resolved(report_96());
    const auto b = resolved(report_128());
    for (const auto* set : {&a, &b}) {
        const auto& other = set == &a ? b : a;
        for (const auto& z : *set) {
            if (z.real() <= -1.0) continue;
            double d = INFINITY;
            for (const auto& w : other) d = std::min(d, std::abs(z - w));
            CHECK(d <= 1e-3);
        }
    }
}

TEST_CASE("free operator spectrum lies left of -1/2") {
    const auto r = compute_spectrum(96, 144, 1e-2, false);
    const auto z = resolved(r);
    REQUIRE(!z.empty());
    for (const auto& e : z) CHECK(e.real() <= -0.5 + 0.02);
    CHECK(r.unstable_list.empty());
}

TEST_CASE("unit eigenvector is aligned with the symmetry mode") {
    CHECK(report_128().symmetry_angle <= 1e-4);
    const auto& g = report_128().g_h;
    const auto grid = EvenChebyshev::build(128);
    CHECK(weighted_dot(grid, g, g) == Approx(1.0).epsilon(1e-12));
    CHECK(g(0) > 0.0);
}

TEST_CASE("projection pairing and biorthogonality") {
    const auto& r = report_96();
    const auto p = export_projection(r);
    CHECK(p.g_adj.dot(p.g_h) == Approx(1.0).epsilon(1e-12));
    const Eigen::MatrixXcd V = resolved_eigenvectors(r);
    const auto z = resolved(r);
    REQUIRE(V.cols() == static_cast<Eigen::Index>(z.size()));
    for (Eigen::Index j = 0; j < V.cols(); ++j) {
        if (std::abs(z[j] - 1.0) < 1e-4) continue;
        const std::complex<double> c = p.g_adj.cast<std::complex<double>>().dot(V.col(j));
        CHECK(std::abs(c) / V.col(j).norm() <= 1e-6);
    }
    // extracting the coefficient of c g_h twice gives c
    const double c = p.g_adj.dot(Eigen::VectorXd(0.37 * p.g_h));
    CHECK(p.g_adj.dot(Eigen::VectorXd(c * p.g_h)) == Approx(c).epsilon(1e-13));
}

TEST_CASE("projection needs the unit eigenvalue") {
    SpectrumReport empty;
    CHECK_THROWS_AS(export_projection(empty), DependencyError);
}

TEST_CASE("spectrum argument checks") {
    CHECK_THROWS_AS(compute_spectrum(64, 80, 1e-3), DomainError);
    CHECK_THROWS_AS(compute_spectrum(64, 96, 0.0), DomainError);
}
