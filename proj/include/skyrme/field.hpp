#pragma once

#include <vector>

namespace skyrme {

/// Uniform radial grid r_i = i*spacing, i = 0..n.
struct RadialGrid {
    double r_max = 1.0;
    int n = 64;
    double spacing = 1.0 / 64;
    std::vector<double> nodes;

    static RadialGrid uniform(double r_max, int n);
    std::size_t size() const { return nodes.size(); }
};

enum class FieldForm {
    angle,    // psi(t, r)
    reduced,  // u(t, r) = psi / r
};

struct FieldState {
    double t = 0.0;
    FieldForm form = FieldForm::angle;
    std::vector<double> value;
    std::vector<double> rate;
};

/// Perturbation (phi1, phi2) of the profile pair in similarity variables.
struct SimilarityState {
    double tau = 0.0;
    std::vector<double> rho;
    std::vector<double> phi1;
    std::vector<double> phi2;
};

}  // namespace skyrme
