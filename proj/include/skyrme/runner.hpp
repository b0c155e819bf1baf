#pragma once

/**
 * @file runner.hpp
 * @brief Config-driven runs: INI config in, CSV/JSON artifacts plus a run
 *        record with content hashes out.
 */

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "skyrme/model_rhs.hpp"

namespace skyrme {

enum class Command {
    profile,
    verify_rhs,
    verify_coeffs,
    evolve,
    evolve_sim,
    shoot,
    spectrum,
    check_residual,
    sweep
};

std::string to_string(Command c);
Command parse_command(const std::string& name);  // ConfigError on unknown names

// Initial data for the physical solvers.
enum class DataKind { self_similar, bump };

struct RunConfig {
    Command command = Command::profile;
    ModelParams model;

    // [profile]
    int profile_samples = 101;

    // [coeffs]
    int coeff_samples = 400;
    double coeff_tol = 1e-6;

    // [evolve]
    int n = 1024;
    double r_max = 1.05;
    double cfl = 0.5;
    double t_end = 2.0;
    DataKind data = DataKind::self_similar;
    double amplitude = 1.0;  // multiplies the data (self_similar) or sets the bump height
    double width = 0.3;
    int stride = 0;
    double fit_fraction = 0.5;
    double dissipation = 0.3;

    // [similarity]
    int M = 32;
    double sim_cfl = 1.0;
    double tau_end = 6.0;
    double eps = 1e-3;        // perturbation size
    std::uint64_t seed = 0;   // 0 selects the plain Gaussian perturbation
    double bracket_lo = 0.9;
    double bracket_hi = 1.1;
    double tol = 1e-6;
    double horizon = 6.0;
    int norm_k = 2;
    double fit_t0 = 1.0;
    double fit_t1 = 6.0;

    // [spectrum]
    int n_coarse = 128;
    int n_fine = 192;
    double match_tol = 1e-3;
    bool potential = true;

    // [sweep]
    Command sweep_command = Command::shoot;
    std::vector<double> sweep_lambda;
    std::vector<double> sweep_eps;

    // [output]
    std::filesystem::path out_dir = "skyrmelab_out";
    int workers = 1;
    bool deterministic = false;
};

/// Parse INI text.  Unknown keys and malformed values raise ConfigError
/// naming the offending "section.key".
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);

/// Check every numeric field the selected command reads.
void validate(const RunConfig& cfg);

std::string config_to_ini(const RunConfig& cfg);

struct OutputEntry {
    std::string path;  // relative to the run directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunRecord {
    std::string command;
    std::string config;   // normalised INI snapshot
    std::string version;
    double wall_time = 0.0;  // zero in deterministic mode
    std::vector<OutputEntry> outputs;
    bool ok = true;
    std::string error;
    std::vector<std::pair<std::string, double>> metrics;  // headline numbers for summaries
    std::filesystem::path dir;
};

std::string code_version();

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Validate, execute and persist.  Writes record.json next to the artifacts;
/// the record itself is not part of the manifest.
RunRecord run(const RunConfig& cfg);

/// One run per (lambda, eps) cell in sweep_command, workers at a time.  Cell
/// failures are recorded and the sweep carries on.  Writes summary.csv.
std::vector<RunRecord> sweep(const RunConfig& cfg);

}  // namespace skyrme
