#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rbs/commands.hpp"
#include "rbs/csv.hpp"
#include "rbs/experiments.hpp"
#include "rbs/scenario_io.hpp"
#include "rbs/simulation.hpp"
#include "support.hpp"

using namespace rbs;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run rbs_cli(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "rbs_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

Scenario small_scenario() {
    Scenario s;
    s.flywheel = FlywheelSpec{UniformDisk{2.0, 0.2}};
    s.losses = {0.01, 0.001, 1e-6};
    s.shaft_profile = drivetrain::SpinUpProfile{10.0, 0.2, 1.0, 0.3, 0.1};
    s.integrator.dt = 1e-3;
    s.integrator.free_spin_horizon = 120.0;
    return s;
}

}  // namespace

TEST_CASE("simulate writes the documented outputs") {
    const auto dir = scratch("simulate");
    const auto out = dir / "run";
    const auto r = rbs_cli({"simulate", test::kData + "/scenarios/bench_case2.json", "--out", out.string()});
    REQUIRE(r.code == 0);

    const auto traj = csv::read(out / "trajectory.csv");
    CHECK(traj.header == std::vector<std::string>{"t_s", "omega_shaft_rad_s", "omega_flywheel_rad_s", "engaged", "phase"});
    CHECK(traj.rows.size() > 100);

    const auto phases = slurp(out / "phases.csv");
    CHECK(phases.find("FreeSpin") != std::string::npos);

    std::ifstream in(out / "ledger.json");
    const auto ledger = json::parse(in);
    for (const char* key : {"input_work", "flywheel_ke_delta", "loss_friction", "loss_aero", "loss_electrical",
                            "delivered_electrical", "residual"}) {
        CHECK(ledger.contains(key));
    }
    CHECK(std::abs(ledger["summary"]["free_spin_s"].get<double>() - 29.3) < 0.1);
    CHECK(fs::exists(out / "events.csv"));
}

TEST_CASE("simulate errors map to exit codes") {
    const auto scenario = test::kData + "/scenarios/bench_case2.json";
    const auto dir = scratch("simulate_errors");
    auto r = rbs_cli({"simulate", scenario, "--out", dir.string(), "--dt", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("dt must be positive") != std::string::npos);

    r = rbs_cli({"simulate", (dir / "missing.json").string(), "--out", dir.string()});
    CHECK(r.code == 2);

    spit(dir / "broken.json", "{\n  \"flywheel\": {\"type\": \"uniform_disk\", \"mass\": 2,\n}");
    r = rbs_cli({"simulate", (dir / "broken.json").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 3") != std::string::npos);

    json j = io::to_json(small_scenario());
    j["losses"]["viscos_coeff"] = 0.1;
    spit(dir / "typo.json", j.dump());
    r = rbs_cli({"simulate", (dir / "typo.json").string(), "--out", dir.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("losses.viscos_coeff") != std::string::npos);

    r = rbs_cli({"simulate", scenario, "--out", dir.string(), "--set", "gear.teeth=3"});
    CHECK(r.code == 2);

    // Speeds this large overflow the kinetic energy.
    Scenario huge = small_scenario();
    huge.shaft_profile = drivetrain::SpinUpProfile{1e160, 0.2, 1.0, 0.0, 0.1};
    io::write_scenario(dir / "huge.json", huge);
    r = rbs_cli({"simulate", (dir / "huge.json").string(), "--out", (dir / "huge").string()});
    CHECK(r.code == 3);
}

TEST_CASE("overrides and --until reach the scenario") {
    const auto dir = scratch("overrides");
    io::write_scenario(dir / "s.json", small_scenario());
    const auto r = rbs_cli({"simulate", (dir / "s.json").string(), "--out", (dir / "o").string(), "--set",
                            "gear.ratio=2", "--until", "2.0"});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "o" / "ledger.json");
    const auto ledger = json::parse(in);
    CHECK(ledger["summary"]["omega_peak_rad_s"].get<double>() == doctest::Approx(20.0));
    const auto traj = csv::read(dir / "o" / "trajectory.csv");
    CHECK(csv::number(traj, traj.rows.size() - 1, 0) == doctest::Approx(2.0));
}

TEST_CASE("scenario JSON round trip re-simulates bit-identically") {
    const auto dir = scratch("roundtrip");
    for (int id = 1; id <= 3; ++id) {
        const Scenario s = experiments::bench_case(id);
        io::write_scenario(dir / "s.json", s);
        const Scenario back = io::read_scenario(dir / "s.json");
        CHECK(back == s);
    }
    Scenario t = small_scenario();
    t.flywheel = experiments::prototype_flywheel();
    t.shaft_profile = drivetrain::TraceProfile{SpeedTrace({{0.0, 0.0}, {0.7, 3.3}, {1.9, 0.0}}), 0.1};
    t.integrator.t_end = 4.0;
    t.bank.destination = electrical::Destination::Grid;
    io::write_scenario(dir / "t.json", t);
    const Scenario back = io::read_scenario(dir / "t.json");
    CHECK(back == t);
    const auto a = drivetrain::simulate(t);
    const auto b = drivetrain::simulate(back);
    CHECK(a.trajectory == b.trajectory);
    CHECK(a.ledger == b.ledger);
}

TEST_CASE("wind command") {
    auto r = rbs_cli({"wind", test::fixture("wind_constant.csv"), "--area", "10", "--cb", "0.5", "--eta", "0.9",
                      "--interval", "0", "5"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(test::rel_err(j["total"]["energy_j"].get<double>(), 3445.3125) < 1e-6);
    CHECK(j["eta"] == 0.9);
    CHECK(j["c_b"] == 0.5);
    CHECK(j["intervals"][0]["energy_j"].get<double>() == doctest::Approx(3445.3125 / 2.0));

    r = rbs_cli({"wind", test::fixture("wind_constant.csv"), "--interval", "5", "20"});
    CHECK(r.code == 2);
    CHECK(r.err.find("outside") != std::string::npos);

    const auto dir = scratch("wind");
    spit(dir / "empty.csv", "t_s,v_mps\n");
    CHECK(rbs_cli({"wind", (dir / "empty.csv").string()}).code == 2);
    spit(dir / "backwards.csv", "t_s,v_mps\n0,1\n2,1\n1,1\n");
    CHECK(rbs_cli({"wind", (dir / "backwards.csv").string()}).code == 2);
    spit(dir / "header.csv", "time,v\n0,1\n1,1\n");
    CHECK(rbs_cli({"wind", (dir / "header.csv").string()}).code == 2);
}

TEST_CASE("analyze command") {
    auto r = rbs_cli({"analyze", test::fixture("quadratic_trace.csv"), "--inertia", "1", "--fit-degree", "2"});
    REQUIRE(r.code == 0);
    auto j = json::parse(r.out);
    const auto c = j["fit"]["coefficients"].get<std::vector<double>>();
    REQUIRE(c.size() == 3);
    CHECK(std::abs(c[0] - 3.0) < 1e-8);
    CHECK(std::abs(c[1] - 2.0) < 1e-8);
    CHECK(std::abs(c[2] + 0.25) < 1e-8);
    CHECK(j.contains("units_note"));

    r = rbs_cli({"analyze", test::fixture("constant_trace.csv"), "--inertia", "2"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["net_recovered_energy_j"].get<double>() == 0.0);

    std::ifstream in(test::fixture("bench_trace_oracle.json"));
    const auto oracle = json::parse(in);
    r = rbs_cli({"analyze", test::fixture("bench_trace.csv"), "--inertia",
                 csv::format(oracle["inertia_kg_m2"].get<double>())});
    REQUIRE(r.code == 0);
    j = json::parse(r.out);
    CHECK(test::rel_err(j["eq8_literal"].get<double>(), oracle["eq8_literal"].get<double>()) < 1e-12);
    CHECK(j.contains("eq7_literal"));
    CHECK(j.contains("eq8_fitted"));

    r = rbs_cli({"analyze", test::fixture("constant_trace.csv"), "--inertia", "1", "--fit-degree", "6"});
    CHECK(r.code == 2);
    r = rbs_cli({"analyze", test::fixture("constant_trace.csv")});
    CHECK(r.code == 2);
    r = rbs_cli({"analyze", test::fixture("quadratic_trace.csv"), "--inertia", "1", "--rpm"});
    CHECK(r.code == 2);
}

TEST_CASE("analyze accepts rpm traces and flywheel specs") {
    const auto dir = scratch("analyze_rpm");
    spit(dir / "rpm.csv", "t_s,omega_rpm\n0,0\n1,60\n2,30\n");
    io::write_json(dir / "fw.json", io::to_json(FlywheelSpec{DirectInertia{2.0}}));
    const auto r = rbs_cli({"analyze", (dir / "rpm.csv").string(), "--rpm", "--flywheel", (dir / "fw.json").string(),
                            "--fit-degree", "1"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    const double w = 2.0 * kPi;
    CHECK(j["net_recovered_energy_j"].get<double>() == doctest::Approx(0.5 * 2.0 * (w * w - w * w / 4.0)));
}

TEST_CASE("tables command") {
    auto r = rbs_cli({"tables", test::fixture("table1.csv")});
    REQUIRE(r.code == 0);
    CHECK(r.out ==
          "case_id,omega_max_rpm,braking_s,avg_free_spin_s,avg_energy_j\n"
          "1,300,10,27.3,593\n"
          "2,500,5,29.3,1187\n"
          "3,500,10,29.3,600\n");

    const auto dir = scratch("tables");
    spit(dir / "one.csv", "case_id,omega_max_rpm,braking_s,free_spin_s,energy_j\n7,400,8,26,700\n");
    r = rbs_cli({"tables", (dir / "one.csv").string(), "--out", (dir / "t2.csv").string()});
    REQUIRE(r.code == 0);
    CHECK(slurp(dir / "t2.csv") == "case_id,omega_max_rpm,braking_s,avg_free_spin_s,avg_energy_j\n7,400,8,26.0,700\n");

    spit(dir / "empty.csv", "");
    CHECK(rbs_cli({"tables", (dir / "empty.csv").string()}).code == 2);
    spit(dir / "bad.csv", "case_id,omega_max_rpm,braking_s,free_spin_s,energy_j\n1,300,ten,28,509\n");
    r = rbs_cli({"tables", (dir / "bad.csv").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find(":2:") != std::string::npos);
}

TEST_CASE("sweep command") {
    const auto dir = scratch("sweep");
    Scenario base = small_scenario();
    base.losses = {};
    base.integrator.t_end = 2.0;
    io::write_scenario(dir / "base.json", base);
    spit(dir / "ratio.json", R"({"axes": [{"path": "gear.ratio", "values": [2, 4, 3]}]})");
    auto r = rbs_cli({"sweep", (dir / "base.json").string(), (dir / "ratio.json").string(), "--out",
                      (dir / "results.csv").string()});
    REQUIRE(r.code == 0);
    const auto t = csv::read(dir / "results.csv");
    REQUIRE(t.rows.size() == 3);
    CHECK(t.header[0] == "gear.ratio");
    CHECK(t.header[1] == "objective");
    CHECK(csv::number(t, 0, 0) == 4.0);
    CHECK(csv::number(t, 1, 0) == 3.0);
    CHECK(csv::number(t, 2, 0) == 2.0);
    CHECK(csv::number(t, 0, 1) > csv::number(t, 1, 1));
    CHECK(csv::number(t, 1, 1) > csv::number(t, 2, 1));

    spit(dir / "big.json",
         R"({"cell_cap": 10, "axes": [{"path": "gear.ratio", "values": [1, 2, 3, 4]},
             {"path": "losses.viscous_coeff", "values": [0, 0.1, 0.2]}]})");
    r = rbs_cli({"sweep", (dir / "base.json").string(), (dir / "big.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("12 cells") != std::string::npos);

    spit(dir / "unknown.json", R"({"axes": [{"path": "gear.ratio", "values": [1]}], "objectiv": "x"})");
    r = rbs_cli({"sweep", (dir / "base.json").string(), (dir / "unknown.json").string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("sweep.objectiv") != std::string::npos);
}

TEST_CASE("a one-cell sweep equals the simulate ledger") {
    const auto dir = scratch("one_cell");
    io::write_scenario(dir / "base.json", small_scenario());
    spit(dir / "one.json", R"({"axes": [{"path": "gear.ratio", "values": [4]}]})");
    auto r = rbs_cli({"sweep", (dir / "base.json").string(), (dir / "one.json").string(), "--out",
                      (dir / "one.csv").string()});
    REQUIRE(r.code == 0);
    r = rbs_cli({"simulate", (dir / "base.json").string(), "--out", (dir / "sim").string()});
    REQUIRE(r.code == 0);
    std::ifstream in(dir / "sim" / "ledger.json");
    const auto ledger = json::parse(in);
    const auto t = csv::read(dir / "one.csv");
    CHECK(csv::number(t, 0, 1) == ledger["summary"]["recovered_energy_j"].get<double>());
    CHECK(csv::number(t, 0, 5) == ledger["input_work"].get<double>());
    CHECK(csv::number(t, 0, 10) == ledger["delivered_electrical"].get<double>());
}

TEST_CASE("commands are byte-for-byte deterministic") {
    const auto dir = scratch("determinism");
    io::write_scenario(dir / "base.json", small_scenario());
    for (const char* run : {"a", "b"}) {
        REQUIRE(rbs_cli({"simulate", (dir / "base.json").string(), "--out", (dir / run).string()}).code == 0);
    }
    for (const char* f : {"trajectory.csv", "phases.csv", "events.csv", "ledger.json"}) {
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    }
}

TEST_CASE("vehicle command") {
    const auto r = rbs_cli({"vehicle", test::fixture("cycle_stop.csv")});
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc["eta"].get<double>() == 0.9);
    CHECK(doc["braking_energy_j"].get<double>() == doctest::Approx(200000.0));
    CHECK(doc["net_recoverable_j"].get<double>() == doctest::Approx(180000.0));

    const auto full = rbs_cli({"vehicle", test::fixture("cycle_stop.csv"), "--eta", "1"});
    REQUIRE(full.code == 0);
    CHECK(json::parse(full.out)["net_recoverable_j"].get<double>() == doctest::Approx(200000.0));
}

TEST_CASE("usage errors") {
    CHECK(rbs_cli({}).code == 2);
    CHECK(rbs_cli({"fly"}).code == 2);
    CHECK(rbs_cli({"simulate"}).code == 2);
    CHECK(rbs_cli({"--help"}).code == 0);
}
