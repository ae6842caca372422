#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "ckdv/config.hpp"
#include "ckdv/errors.hpp"

using namespace ckdv;

namespace {
constexpr double kPi = std::numbers::pi;

int error_line(std::string_view text, const ConfigOverrides& o = {}) {
    try {
        parse_config(text, o);
    } catch (const ConfigError& e) {
        return e.line();
    }
    return -1;
}
}  // namespace

TEST_SUITE("config") {

TEST_CASE("defaults") {
    const auto c = parse_config("");
    CHECK(c.experiment == Experiment::Simulate);
    CHECK(c.n_points == 1024);
    CHECK(c.length == doctest::Approx(64 * kPi).epsilon(1e-15));
    CHECK(c.system.preset == "majda-biello");
    CHECK(c.system.a2.value() == 1.0);
    CHECK(c.dt_auto);
    CHECK(c.stepper.dt <= 1e-3);
    CHECK(c.stepper.dt > 0.0);
    CHECK(c.acl.sigmas.front() == 0.0);
    CHECK(c.acl.sigmas.size() == 10);
    CHECK(c.commutator.sigmas.size() == 9);
    CHECK_FALSE(c.picard.deltas.empty());
    for (double d : c.picard.deltas) CHECK(d <= 1.0);
    CHECK(c.inequality.rhos.size() == 5);
}

TEST_CASE("auto dt follows the lifespan rule") {
    // sech2 of amplitude A and width w has ‖u‖² = (4/3) A² w on a wide box
    const auto a = parse_config("initial.u_amplitude = 0.5\ninitial.v_amplitude = 0.25\n");
    const double nu = 0.5 * std::sqrt(8.0 / 3.0), nv = 0.25 * std::sqrt(8.0 / 3.0);
    const double delta = 0.1 / std::pow(1.0 + nu + nv, 4.0);
    CHECK(a.dt_auto);
    CHECK(a.stepper.dt == doctest::Approx(std::min(1e-3, delta / 100)).epsilon(1e-9));
    const auto z = parse_config("initial.u_amplitude = 0\ninitial.v_amplitude = 0\n");
    CHECK(z.stepper.dt == 1e-3);
    const auto b = parse_config("stepper.dt = 0.01\n");
    CHECK_FALSE(b.dt_auto);
    CHECK(b.stepper.dt == 0.01);
}

TEST_CASE("sections, comments, pi and lists") {
    const auto c = parse_config(
        "experiment = acl-scan   # trailing comment\n"
        "[grid]\n"
        "n = 256\n"
        "length = 32*pi\n"
        "[acl]\n"
        "sigmas = 0, 0.01, 0.1\n"
        "[system]\n"
        "preset = hirota-satsuma\n"
        "a1 = 0.2\n");
    CHECK(c.experiment == Experiment::AclScan);
    CHECK(c.n_points == 256);
    CHECK(c.length == doctest::Approx(32 * kPi).epsilon(1e-15));
    CHECK(c.acl.sigmas == std::vector<double>{0.0, 0.01, 0.1});
    CHECK(c.system.preset == "hirota-satsuma");
    CHECK(c.system.a1.value() == 0.2);
    CHECK(c.system.c12.value() == 1.0);
    CHECK(parse_real("pi") == kPi);
    CHECK(parse_real("64pi") == 64 * kPi);
    CHECK(parse_real_list("1, 2pi") == std::vector<double>{1.0, 2 * kPi});
}

TEST_CASE("errors carry line and key") {
    CHECK(error_line("grid.n = 256\nfoo = 1\n") == 2);
    CHECK(error_line("grid.n = 256\n\ngrid.n = 512\n") == 3);
    CHECK_THROWS_AS(parse_config("grid.n = 100\n"), ConfigError);
    CHECK(error_line("grid.n = abc\n") == 1);
    CHECK(error_line("no equals sign\n") == 1);
    CHECK(error_line("[grid\n") == 1);
    try {
        parse_config("system.a2 = 0\n");
        FAIL("expected an error");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("a1a2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config("system.preset = explicit\nsystem.a1 = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("system.a1 = 2\n"), ConfigError);  // not a Majda-Biello key
    CHECK_THROWS_AS(parse_config("experiment = nonsense\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("picard.deltas = 0.5, 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("analysis.rho = 1.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("initial.profile = file\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("initial.profile = file\ninitial.u_file = /nonexistent/u.txt\n"),
                    ConfigError);
}

TEST_CASE("overrides apply after the file and are checked") {
    const auto c = parse_config("grid.n = 256\n", {{"grid.n", "512"}, {"seed", "9"}});
    CHECK(c.n_points == 512);
    CHECK(c.seed == 9);
    CHECK_THROWS_AS(parse_config("", {{"bogus", "1"}}), ConfigError);
}

TEST_CASE("resolved text reloads to the same configuration") {
    const auto c = parse_config(
        "experiment = picard\nsystem.preset = explicit\nsystem.a1 = 1\nsystem.a2 = 2\n"
        "system.c11 = 1\nsystem.c12 = -1\nsystem.c21 = 0.5\nsystem.c22 = 3\n"
        "initial.profile = random-analytic\nseed = 5\nthreads = 3\n");
    const auto text = resolved_config_text(c);
    const auto d = parse_config(text);
    CHECK(resolved_config_text(d) == text);
    CHECK(config_hash(d) == config_hash(c));
    CHECK(config_hash(c).size() == 16);
}

TEST_CASE("hash ignores output location and thread count only") {
    const auto a = parse_config("");
    const auto b = parse_config("threads = 4\noutput_dir = elsewhere\n");
    const auto c = parse_config("seed = 1\n");
    const auto d = parse_config("grid.n = 512\n");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a) != config_hash(c));
    CHECK(config_hash(a) != config_hash(d));
    CHECK(resolved_config_text(a, true).find("threads") == std::string::npos);
}

TEST_CASE("spectrum files resolve relative to the config file") {
    const auto dir = std::filesystem::temp_directory_path() / "ckdv_unit_cfg";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "u.txt") << "0 (0,0)\n1 (0.1,0)\n";
    std::ofstream(dir / "run.cfg") << "initial.profile = file\ninitial.u_file = u.txt\ninitial.v_file = u.txt\n"
                                      "grid.n = 64\n";
    const auto c = load_config(dir / "run.cfg");
    const auto g = build_grid(c);
    const auto s = build_initial_state(c, g);
    CHECK(s.u_hat.mode(1) == cplx(0.1, 0.0));
    CHECK(s.v_hat.mode(-1) == cplx(0.1, 0.0));
}

TEST_CASE("experiment names round-trip") {
    for (auto e : {Experiment::Simulate, Experiment::Classify, Experiment::Radius, Experiment::AclScan,
                   Experiment::CommutatorScan, Experiment::Picard, Experiment::InequalityScan})
        CHECK(parse_experiment(to_string(e)) == e);
    CHECK(format_real(0.1) == "0.1");
    CHECK(parse_real(format_real(kPi)) == kPi);
}

}
