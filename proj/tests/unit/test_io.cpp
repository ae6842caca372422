#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ckdv/config.hpp"
#include "ckdv/io.hpp"
#include "ckdv/runner.hpp"

using namespace ckdv;

namespace {
std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "ckdv_unit_io" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunConfig small(const std::string& extra, const std::filesystem::path& out) {
    return parse_config("grid.n = 128\ngrid.length = 16pi\ninitial.u_amplitude = 0.05\n"
                        "initial.v_amplitude = 0.05\nstepper.dt = 0.01\nsimulate.t_final = 0.5\n"
                        "simulate.stride = 10\n" + extra,
                        {{"output_dir", out.string()}});
}
}  // namespace

TEST_SUITE("io") {

TEST_CASE("rows round-trip through JSON, including NaN") {
    RecordRow r;
    r.t = 0.25;
    r.step = 7;
    r.l2_u = 1.5;
    r.l2_v = 0.1;
    r.pair_l2 = 1.5;
    r.gevrey_u = {1.0, 2.0};
    r.gevrey_v = {0.5, std::nan("")};
    r.radius_u = RadiusEstimate{0.3, 2, 40, 0.01, 1e-3, false, 39};
    r.invariant = 2.25;
    r.mean_u = -0.125;
    const auto back = row_from_json(to_json(r));
    CHECK(back.t == r.t);
    CHECK(back.step == r.step);
    CHECK(back.gevrey_u == r.gevrey_u);
    CHECK(std::isnan(back.gevrey_v[1]));
    REQUIRE(back.radius_u);
    CHECK(back.radius_u->sigma_hat == 0.3);
    CHECK_FALSE(back.radius_v);
    CHECK(back.invariant.value() == 2.25);
    CHECK(back.mean_u == -0.125);
}

TEST_CASE("TSV round-trip is exact") {
    const auto dir = scratch("tsv");
    Curve c{"sigma", "defect", {0.0, 1e-3, 0.1}, {1.0 / 3.0, -2e-17, std::nan("")}};
    write_tsv(dir / "c.tsv", c);
    const auto d = read_tsv(dir / "c.tsv");
    CHECK(d.x_name == "sigma");
    CHECK(d.y_name == "defect");
    CHECK(d.x == c.x);
    CHECK(d.y[0] == c.y[0]);
    CHECK(d.y[1] == c.y[1]);
    CHECK(std::isnan(d.y[2]));
}

TEST_CASE("without_timestamps strips nested members") {
    Json j = {{"a", 1}, {"timestamp", 2}, {"b", {{"timestamp", 3}, {"c", 4}}}};
    const auto s = without_timestamps(j);
    CHECK_FALSE(s.contains("timestamp"));
    CHECK_FALSE(s["b"].contains("timestamp"));
    CHECK(s["b"]["c"] == 4);
}

TEST_CASE("simulate run: artifacts, readers and byte-identical reruns") {
    const auto out = scratch("simulate");
    const auto cfg = small("", out);
    const auto a = run(cfg);
    REQUIRE(a.exit_code == 0);
    CHECK(a.run_dir == out / config_hash(cfg));
    for (const char* f : {"config.resolved", "record.jsonl", "summary.txt", "pair_l2.tsv"})
        CHECK(std::filesystem::exists(a.run_dir / f));

    const auto rec = read_run_record(a.run_dir / "record.jsonl");
    CHECK(rec.status == RunStatus::Completed);
    CHECK(rec.rows.size() == 6);
    CHECK(rec.rows.back().t == doctest::Approx(0.5));
    CHECK(rec.eta.value() == 1.0);
    CHECK(rec.dt == 0.01);
    CHECK(rec.gevrey_sigmas == cfg.simulate.gevrey_sigmas);
    CHECK(rec.config_snapshot == resolved_config_text(cfg, true));

    // the echo reloads to the same run directory
    const auto again = load_config(a.run_dir / "config.resolved");
    CHECK(config_hash(again) == config_hash(cfg));

    const auto first = slurp(a.run_dir / "record.jsonl");
    const auto curve = read_tsv(a.run_dir / "pair_l2.tsv");
    CHECK(curve.x.size() == rec.rows.size());
    CHECK(curve.y.back() == rec.rows.back().pair_l2);

    auto threaded = cfg;
    threaded.threads = 2;
    const auto b = run(threaded);
    REQUIRE(b.exit_code == 0);
    const auto second = slurp(b.run_dir / "record.jsonl");
    const auto ja = read_jsonl(a.run_dir / "record.jsonl");
    (void)first;
    const auto jb = read_jsonl(b.run_dir / "record.jsonl");
    REQUIRE(ja.size() == jb.size());
    std::string sa, sb;
    for (const auto& j : ja) sa += without_timestamps(j).dump() + "\n";
    for (const auto& j : jb) sb += without_timestamps(j).dump() + "\n";
    CHECK(sa == sb);
    // outside the timestamp line the raw bytes agree
    const auto cut = [](const std::string& s) { return s.substr(0, s.rfind("\n", s.size() - 2)); };
    CHECK(cut(first) == cut(second));
}

TEST_CASE("classify run records the verdict") {
    const auto out = scratch("classify");
    const auto a = run(small("experiment = classify\nsystem.a2 = 2.5\n", out));
    CHECK(a.exit_code == 0);
    const auto lines = read_jsonl(a.run_dir / "record.jsonl");
    bool seen = false;
    for (const auto& j : lines)
        if (j["type"] == "classify") {
            seen = true;
            CHECK(j["classification"]["admissible"] == false);
        }
    CHECK(seen);
    CHECK(a.summary.find("not admissible") != std::string::npos);
}

TEST_CASE("enforced admissibility refuses a dynamic run") {
    const auto out = scratch("refuse");
    const auto a = run(small("system.a2 = 2.5\nenforce_admissibility = true\n", out));
    CHECK(a.exit_code == 1);
    CHECK(a.status == RunStatus::Failed);
}

TEST_CASE("blow-up is recorded, not thrown") {
    const auto out = scratch("blowup");
    const auto a = run(parse_config("grid.n = 64\ngrid.length = 2pi\ninitial.profile = gaussian\n"
                                    "initial.u_amplitude = 1e4\ninitial.v_amplitude = 1e4\ninitial.width = 0.3\n"
                                    "stepper.dt = 0.1\nsimulate.t_final = 50\n",
                                    {{"output_dir", out.string()}}));
    CHECK(a.exit_code == 1);
    CHECK(a.status == RunStatus::BlowUp);
    CHECK(read_run_record(a.run_dir / "record.jsonl").status == RunStatus::BlowUp);
}

}
