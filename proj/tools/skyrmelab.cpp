// skyrmelab: command line front end for the runner.
//
//   skyrmelab <command> [--config file.ini] [--out dir] [--workers N] [--deterministic]
//
// Exit codes: 0 success, 1 configuration error, 2 numerical failure.

#include <cstdlib>
#include <iostream>
#include <utility>

#include <CLI11.hpp>

#include "skyrme/errors.hpp"
#include "skyrme/runner.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

void print_record(const skyrme::RunRecord& r) {
    std::cout << r.command << ": " << (r.ok ? "ok" : "failed") << "  ->  " << r.dir.string() << '\n';
    for (const auto& [k, v] : r.metrics) std::cout << "  " << k << " = " << v << '\n';
    for (const auto& o : r.outputs) std::cout << "  " << o.path << "  " << o.sha256.substr(0, 16) << '\n';
    if (!r.ok) std::cout << "  error: " << r.error << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-similar blowup experiments for the co-rotational Skyrme model"};
    app.require_subcommand(1);
    std::string config_path;
    std::string out_dir;
    int workers = 0;
    bool deterministic = false;

    const std::pair<const char*, const char*> commands[] = {
        {"profile", "tabulate the self-similar profile"},
        {"verify-rhs", "check the nonlinearity kernels against direct forms"},
        {"verify-coeffs", "check linearisation coefficients by finite differences"},
        {"evolve", "evolve in physical coordinates and fit the blowup rate"},
        {"evolve-sim", "evolve a perturbation in similarity coordinates"},
        {"shoot", "bisect the blowup time that removes the unstable mode"},
        {"spectrum", "eigenvalues of the linearised operator"},
        {"check-residual", "residual of the exact solution on a grid ladder"},
        {"sweep", "run a command over a lambda/eps grid"}};
    for (const auto& [name, help] : commands) {
        auto* sub = app.add_subcommand(name, help);
        sub->add_option("--config,-c", config_path, "INI configuration file")->check(CLI::ExistingFile);
        sub->add_option("--out,-o", out_dir, "output directory");
        sub->add_option("--workers,-j", workers, "concurrent sweep cells")->check(CLI::PositiveNumber);
        sub->add_flag("--deterministic", deterministic, "zero the wall time so records hash identically");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        skyrme::RunConfig cfg = config_path.empty() ? skyrme::RunConfig{} : skyrme::load_config(config_path);
        cfg.command = skyrme::parse_command(app.get_subcommands().front()->get_name());
        if (!out_dir.empty()) {
            cfg.out_dir = out_dir;
        } else if (cfg.out_dir == skyrme::RunConfig{}.out_dir) {
            if (const char* env = std::getenv("SKYRMELAB_OUT"); env && *env) cfg.out_dir = env;
        }
        if (workers > 0) cfg.workers = workers;
        if (deterministic) cfg.deterministic = true;

        if (cfg.command == skyrme::Command::sweep) {
            const auto recs = skyrme::sweep(cfg);
            int failed = 0;
            for (const auto& r : recs) {
                print_record(r);
                failed += r.ok ? 0 : 1;
            }
            std::cout << "summary: " << (cfg.out_dir / "summary.csv").string() << '\n';
            return failed == static_cast<int>(recs.size()) ? kExitNumerical : 0;
        }
        print_record(skyrme::run(cfg));
        return 0;
    } catch (const skyrme::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}
