#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "skyrme/errors.hpp"
#include "skyrme/runner.hpp"

using namespace skyrme;
namespace fs = std::filesystem;

namespace {

// Scratch directory under the test working directory, wiped on entry.
fs::path scratch(const std::string& name) {
    const fs::path p = fs::current_path() / "runner_scratch" / name;
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) {
        if (!l.empty()) out.push_back(l);
    }
    return out;
}

std::string field_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "";
}

RunConfig cheap_sweep(const fs::path& dir) {
    auto cfg = parse_config(
        "command = sweep\n"
        "[sweep]\ncommand = evolve-sim\nlambda = 0.04, 0, 0.02\n"
        "[similarity]\nM = 32\ntau_end = 1\nfit_t0 = 0\nfit_t1 = 1\n"
        "[output]\nworkers = 2\ndeterministic = true\n");
    cfg.out_dir = dir;
    return cfg;
}

}  // namespace

TEST_SUITE("runner") {

TEST_CASE("sha256 of a known vector") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("command names round trip") {
    for (auto c : {Command::profile, Command::verify_rhs, Command::verify_coeffs, Command::evolve,
                   Command::evolve_sim, Command::shoot, Command::spectrum, Command::check_residual,
                   Command::sweep}) {
        CHECK(parse_command(to_string(c)) == c);
    }
    CHECK_THROWS_AS(parse_command("bogus"), ConfigError);
}

TEST_CASE("parse errors name the offending field") {
    CHECK(field_of("[model]\ngamma = 1\n") == "model.gamma");
    CHECK(field_of("[evolve]\nn = abc\n") == "evolve.n");
    CHECK(field_of("[model]\nlambda = 1x\n") == "model.lambda");
    CHECK(field_of("colour = red\n") == "colour");
    CHECK(field_of("command = nope\n") == "command");
    CHECK_THROWS_AS(load_config(fs::current_path() / "does_not_exist.ini"), ConfigError);
}

TEST_CASE("parsed values land in the config") {
    const auto cfg = parse_config(
        "command = spectrum\n[model]\nlambda = 0.25\n[spectrum]\nn_coarse = 40\nn_fine = 64\n"
        "potential = false\n[output]\ndir = elsewhere\nworkers = 3\n");
    CHECK(cfg.command == Command::spectrum);
    CHECK(cfg.model.lambda == 0.25);
    CHECK(cfg.n_coarse == 40);
    CHECK(cfg.n_fine == 64);
    CHECK_FALSE(cfg.potential);
    CHECK(cfg.out_dir == fs::path("elsewhere"));
    CHECK(cfg.workers == 3);
}

TEST_CASE("config_to_ini round trips") {
    RunConfig a;
    a.command = Command::shoot;
    a.model.lambda = 0.0375;
    a.M = 24;
    a.eps = -2.5e-4;
    a.seed = 17;
    a.potential = false;
    a.sweep_lambda = {0.01, 0.02};
    a.data = DataKind::bump;
    const auto text = config_to_ini(a);
    const auto b = parse_config(text);
    CHECK(config_to_ini(b) == text);
    CHECK(b.model.lambda == a.model.lambda);
    CHECK(b.eps == a.eps);
    CHECK(b.seed == 17);
    CHECK(b.data == DataKind::bump);
    CHECK(b.sweep_lambda == a.sweep_lambda);
}

TEST_CASE("invalid config fails before any output is written") {
    const auto dir = scratch("neg_lambda");
    auto cfg = parse_config("command = evolve\n[model]\nlambda = -1\n");
    cfg.out_dir = dir;
    try {
        run(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "model.lambda");
    }
    CHECK_FALSE(fs::exists(dir));

    cfg = parse_config("command = spectrum\n[spectrum]\nn_coarse = 16\n");
    cfg.out_dir = dir;
    CHECK_THROWS_AS(run(cfg), ConfigError);
    CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("profile run writes table, record and matching hashes") {
    const auto dir = scratch("profile");
    auto cfg = parse_config("command = profile\n[output]\ndeterministic = true\n");
    cfg.out_dir = dir;
    const auto rec = run(cfg);
    CHECK(rec.ok);
    CHECK(rec.wall_time == 0.0);

    const auto rows = lines(slurp(dir / "profile.csv"));
    REQUIRE(rows.size() == 102);
    CHECK(rows.front().rfind("rho,U", 0) == 0);
    const auto last = rows.back();
    const double U_last = std::stod(last.substr(last.find(',') + 1));
    CHECK(std::abs(U_last - M_PI) <= 1e-10);

    REQUIRE(fs::exists(dir / "record.json"));
    const auto j = nlohmann::json::parse(slurp(dir / "record.json"));
    CHECK(j["command"] == "profile");
    CHECK(j["ok"] == true);
    REQUIRE_FALSE(rec.outputs.empty());
    for (const auto& o : rec.outputs) {
        CHECK(o.path != "record.json");
        CHECK(o.sha256 == sha256_file(dir / o.path));
        CHECK(o.bytes == fs::file_size(dir / o.path));
    }
    CHECK(j["outputs"].size() == rec.outputs.size());
}

TEST_CASE("deterministic spectrum runs are byte identical") {
    auto cfg = parse_config(
        "command = spectrum\n[model]\nlambda = 1\n[spectrum]\nn_coarse = 48\nn_fine = 72\nmatch_tol = 1e-2\n"
        "[output]\ndeterministic = true\n");
    cfg.out_dir = scratch("spec_a");
    const auto a = run(cfg);
    cfg.out_dir = scratch("spec_b");
    const auto b = run(cfg);
    REQUIRE(a.outputs.size() == b.outputs.size());
    for (std::size_t i = 0; i < a.outputs.size(); ++i) {
        CHECK(a.outputs[i].path == b.outputs[i].path);
        CHECK(a.outputs[i].sha256 == b.outputs[i].sha256);
    }
    CHECK(slurp(a.dir / "record.json") == slurp(b.dir / "record.json"));
}

TEST_CASE("empty sweep grid is rejected") {
    auto cfg = parse_config("command = sweep\n[sweep]\ncommand = evolve-sim\n");
    cfg.out_dir = scratch("empty_sweep");
    try {
        sweep(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "sweep.lambda");
    }
    CHECK_FALSE(fs::exists(cfg.out_dir));

    cfg.sweep_lambda = {0.1};
    cfg.sweep_command = Command::sweep;
    CHECK_THROWS_AS(sweep(cfg), ConfigError);
}

TEST_CASE("sweep runs every cell in sorted order and is reproducible") {
    const auto a_dir = scratch("sweep_a");
    const auto a = sweep(cheap_sweep(a_dir));
    REQUIRE(a.size() == 3);
    for (const auto& r : a) CHECK(r.ok);

    const auto rows = lines(slurp(a_dir / "summary.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].rfind("cell,lambda,eps,ok", 0) == 0);
    std::vector<double> lam;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream in(rows[i]);
        std::string cell, l;
        std::getline(in, cell, ',');
        std::getline(in, l, ',');
        lam.push_back(std::stod(l));
    }
    CHECK(lam == std::vector<double>{0.0, 0.02, 0.04});
    for (int i = 0; i < 3; ++i) {
        char name[16];
        std::snprintf(name, sizeof name, "cell_%03d", i);
        CHECK(fs::exists(a_dir / name / "record.json"));
    }

    const auto b_dir = scratch("sweep_b");
    const auto b = sweep(cheap_sweep(b_dir));
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].outputs.size() == b[i].outputs.size());
        for (std::size_t k = 0; k < a[i].outputs.size(); ++k) {
            CHECK(a[i].outputs[k].sha256 == b[i].outputs[k].sha256);
        }
    }
    CHECK(slurp(a_dir / "summary.csv") == slurp(b_dir / "summary.csv"));
}

TEST_CASE("failing cells are recorded without stopping the sweep") {
    const auto dir = scratch("sweep_fail");
    // lambda = 0 passes the grid check but the physical model rejects it
    auto cfg = parse_config(
        "command = sweep\n[sweep]\ncommand = evolve\nlambda = 0.5, 0\n"
        "[evolve]\nn = 64\nt_end = 0.1\n[output]\nworkers = 2\n");
    cfg.out_dir = dir;
    const auto recs = sweep(cfg);
    REQUIRE(recs.size() == 2);
    CHECK_FALSE(recs[0].ok);
    CHECK(recs[0].error.find("lambda") != std::string::npos);
    CHECK(recs[1].ok);
    const auto rows = lines(slurp(dir / "summary.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[1].rfind("0,0,", 0) == 0);
    CHECK(rows[1].find(",0,", 4) != std::string::npos);
}

TEST_CASE("similarity resolution below the operator minimum is rejected") {
    auto cfg = parse_config("command = evolve-sim\n[similarity]\nM = 16\n");
    cfg.out_dir = scratch("small_m");
    try {
        run(cfg);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.field() == "similarity.M");
    }
    CHECK_FALSE(fs::exists(cfg.out_dir));
}

}
