#include "rbs/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbs/analysis.hpp"
#include "rbs/csv.hpp"
#include "rbs/experiments.hpp"
#include "rbs/scenario_io.hpp"
#include "rbs/simulation.hpp"
#include "rbs/sources.hpp"

namespace rbs::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json ledger_json(const EnergyLedger& l) {
    return {{"input_work", l.input_work},
            {"flywheel_ke_delta", l.flywheel_ke_delta},
            {"loss_friction", l.loss_friction},
            {"loss_aero", l.loss_aero},
            {"loss_electrical", l.loss_electrical},
            {"delivered_electrical", l.delivered_electrical},
            {"total_losses", l.total_losses()},
            {"residual", l.residual()},
            {"relative_residual", l.relative_residual()}};
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path.string() + ": cannot write file");
    return out;
}

// Writes to the file when a path was given, otherwise to out.
template <class F>
void emit(const std::string& path, std::ostream& out, F&& write) {
    if (path.empty()) {
        write(out);
    } else {
        auto file = open_output(path);
        write(file);
    }
}

void require_file(const std::string& path) {
    if (!fs::is_regular_file(path)) throw ConfigError(path + ": no such file");
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
    std::string scenario;
    std::string out_dir = "out";
    std::optional<double> dt;
    std::optional<double> until;
    std::vector<std::string> overrides;
};

void cmd_simulate(const SimulateArgs& a, std::ostream& out) {
    Scenario s = io::read_scenario(a.scenario);
    for (const auto& o : a.overrides) io::apply_override(s, o);
    if (a.dt) s.integrator.dt = *a.dt;
    if (a.until) s.integrator.t_end = *a.until;
    s.validate();

    const auto r = drivetrain::simulate(s);
    fs::create_directories(a.out_dir);
    const fs::path dir(a.out_dir);

    {
        auto f = open_output(dir / "trajectory.csv");
        csv::write_row(f, {"t_s", "omega_shaft_rad_s", "omega_flywheel_rad_s", "engaged", "phase"});
        for (const auto& st : r.trajectory) {
            csv::write_row(f, {csv::format(st.t), csv::format(st.omega_shaft), csv::format(st.omega_flywheel),
                               st.engaged ? "1" : "0", std::string(drivetrain::to_string(st.phase))});
        }
    }
    {
        auto f = open_output(dir / "phases.csv");
        csv::write_row(f, {"phase", "t_start_s", "t_end_s"});
        for (const auto& p : r.phases) {
            csv::write_row(f, {std::string(drivetrain::to_string(p.phase)), csv::format(p.t_start),
                               csv::format(p.t_end)});
        }
    }
    {
        auto f = open_output(dir / "events.csv");
        csv::write_row(f, {"t_s", "energy_j", "destination"});
        for (const auto& e : r.events) {
            csv::write_row(f, {csv::format(e.t), csv::format(e.energy_dumped),
                               std::string(electrical::to_string(e.destination))});
        }
    }
    json summary = {{"inertia_kg_m2", r.inertia},
                    {"omega_initial_rad_s", r.omega_initial},
                    {"omega_peak_rad_s", r.omega_peak},
                    {"t_peak_s", r.t_peak},
                    {"t_disengage_s", optional_json(r.t_disengage)},
                    {"t_stop_s", optional_json(r.t_stop)},
                    {"free_spin_s", optional_json(r.free_spin_duration())},
                    {"recovered_energy_j", r.recovered_energy()},
                    {"dumped_energy_j", r.dumped_energy()},
                    {"final_bank_voltage_v", r.final_state().bank.voltage},
                    {"steps", r.steps}};
    json doc = ledger_json(r.ledger);
    doc["summary"] = summary;
    io::write_json(dir / "ledger.json", doc);

    out << "simulated " << r.steps << " steps to t=" << r.final_state().t << " s; peak "
        << r.omega_peak << " rad/s; recovered " << r.recovered_energy() << " J; wrote " << dir.string() << '\n';
}

// ---------------------------------------------------------------------------

struct WindArgs {
    std::string trace;
    sources::WindSite site;
    double c_b = sources::kBetzLimit;
    std::vector<double> intervals;  // flattened pairs
    std::string rule = "simpson";
    std::string out;
};

void cmd_wind(const WindArgs& a, std::ostream& out) {
    require_file(a.trace);
    const auto trace = csv::read_wind_trace(a.trace);
    a.site.validate();
    const auto rule = a.rule == "analytic" ? sources::SegmentRule::Analytic : sources::SegmentRule::Simpson;

    json doc = {{"eta", a.site.eta},
                {"c_b", a.c_b},
                {"rho_kg_m3", a.site.rho},
                {"area_m2", a.site.area},
                {"cut_in_mps", a.site.cut_in_velocity},
                {"rule", a.rule}};
    doc["total"] = {{"t_start_s", trace.t_begin()},
                    {"t_end_s", trace.t_end()},
                    {"energy_j", sources::recoverable_wind_energy(a.site, trace, trace.t_begin(), trace.t_end(),
                                                                  a.c_b, rule)}};
    json intervals = json::array();
    for (std::size_t i = 0; i + 1 < a.intervals.size(); i += 2) {
        const double lo = a.intervals[i];
        const double hi = a.intervals[i + 1];
        intervals.push_back({{"t_start_s", lo},
                             {"t_end_s", hi},
                             {"energy_j", sources::recoverable_wind_energy(a.site, trace, lo, hi, a.c_b, rule)}});
    }
    doc["intervals"] = intervals;
    emit(a.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string trace;
    std::optional<double> inertia;
    std::string flywheel;
    int fit_degree = 2;
    bool rpm = false;
    double plateau_tol = 0.0;
    std::string out;
};

// Fitted curve sampled on the trace's own time axis, clamped at zero.
SpeedTrace resample_fit(const SpeedTrace& trace, int degree) {
    const auto fit = analysis::fit_polynomial(trace, degree);
    std::vector<Sample> s;
    s.reserve(trace.size());
    for (const auto& p : trace.samples()) s.push_back({p.t, std::max(0.0, fit(p.t))});
    return SpeedTrace(std::move(s));
}

json fit_json(const analysis::PolyFit& fit) {
    return {{"degree", fit.degree}, {"coefficients", fit.coefficients}, {"residual_rms", fit.residual_rms}};
}

void cmd_analyze(const AnalyzeArgs& a, std::ostream& out) {
    double inertia = 0.0;
    if (a.inertia && !a.flywheel.empty()) throw ConfigError("give either --inertia or --flywheel, not both");
    if (a.inertia) {
        inertia = *a.inertia;
        if (!(inertia > 0.0) || !std::isfinite(inertia)) throw ConfigError("--inertia must be positive");
    } else if (!a.flywheel.empty()) {
        inertia = rbs::inertia(io::flywheel_from_json(io::read_json(a.flywheel)));
    } else {
        throw ConfigError("one of --inertia or --flywheel is required");
    }
    require_file(a.trace);
    const auto trace = csv::read_speed_trace(a.trace, a.rpm);
    if (trace.size() <= static_cast<std::size_t>(std::max(a.fit_degree, 0))) {
        throw ConfigError(a.trace + ": " + std::to_string(trace.size()) + " samples cannot determine a degree-" +
                          std::to_string(a.fit_degree) + " fit");
    }

    json doc;
    doc["inertia_kg_m2"] = inertia;
    doc["samples"] = trace.size();
    doc["fit"] = fit_json(analysis::fit_polynomial(trace, a.fit_degree));
    const double w_max = trace.max_value();
    const double w_end = trace.back().value;
    doc["net_recovered_energy_j"] = 0.5 * inertia * (w_max * w_max - w_end * w_end);
    doc["units_note"] =
        "eq7_literal squares time-integrated speeds (kg m^2 rad^2) and eq8_literal integrates squared "
        "speed over time (J s); neither is an energy in joules. net_recovered_energy_j is.";

    std::optional<analysis::BenchSegments> seg;
    try {
        seg = analysis::segment_bench_trace(trace, a.plateau_tol);
    } catch (const InvalidInput& e) {
        doc["segments"] = nullptr;
        doc["segments_note"] = e.what();
    }
    if (seg) {
        doc["segments"] = {{"t_peak_first_s", seg->t_peak_first},
                           {"t_peak_last_s", seg->t_peak_last},
                           {"omega_peak_rad_s", seg->omega_peak},
                           {"braking_s", seg->braking.duration()},
                           {"plateau_s", seg->plateau ? seg->plateau->duration() : 0.0},
                           {"free_spin_s", seg->free_spin.duration()}};
        doc["eq7_literal"] = analysis::eq7_literal(*seg, inertia);
        doc["eq8_literal"] = analysis::eq8_literal(seg->free_spin, seg->braking, inertia);
        doc["net_recovered_energy_j"] = analysis::net_recovered_energy(seg->free_spin, seg->braking, inertia);
        const bool fittable = seg->free_spin.size() > static_cast<std::size_t>(a.fit_degree) &&
                              seg->braking.size() > static_cast<std::size_t>(a.fit_degree);
        if (fittable) {
            doc["fit_braking"] = fit_json(analysis::fit_polynomial(seg->braking, a.fit_degree));
            doc["fit_free_spin"] = fit_json(analysis::fit_polynomial(seg->free_spin, a.fit_degree));
            doc["eq8_fitted"] = analysis::eq8_literal(resample_fit(seg->free_spin, a.fit_degree),
                                                      resample_fit(seg->braking, a.fit_degree), inertia);
        } else {
            doc["eq8_fitted"] = nullptr;
        }
    }
    emit(a.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------

void cmd_tables(const std::string& input, const std::string& output, std::ostream& out) {
    require_file(input);
    const auto rows = csv::read_table1(input);
    const auto summary = analysis::aggregate_cases(rows);
    emit(output, out, [&](std::ostream& os) { csv::write_table2(os, summary); });
}

// ---------------------------------------------------------------------------

unsigned sweep_threads() {
    const char* env = std::getenv("RBS_SIM_THREADS");
    if (env == nullptr || *env == '\0') return 1;
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (*end != '\0' || n < 1 || n > 1024) {
        throw ConfigError(std::string("RBS_SIM_THREADS must be an integer in [1, 1024], got '") + env + "'");
    }
    return static_cast<unsigned>(n);
}

void cmd_sweep(const std::string& scenario_path, const std::string& sweep_path, const std::string& output,
               std::ostream& out) {
    const Scenario base = io::read_scenario(scenario_path);
    experiments::SweepSpec spec;
    try {
        spec = io::sweep_from_json(io::read_json(sweep_path));
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        throw ConfigError(what.rfind(sweep_path, 0) == 0 ? what : sweep_path + ": " + what);
    }
    const auto rows = experiments::run_sweep(spec, base, sweep_threads());

    emit(output, out, [&](std::ostream& os) {
        std::vector<std::string> header;
        for (const auto& axis : spec.axes) header.push_back(axis.path);
        for (const char* c : {"objective", "recovered_energy_j", "omega_peak_rad_s", "free_spin_s", "input_work_j",
                              "flywheel_ke_delta_j", "loss_friction_j", "loss_aero_j", "loss_electrical_j",
                              "delivered_electrical_j"}) {
            header.emplace_back(c);
        }
        csv::write_row(os, header);
        for (const auto& r : rows) {
            std::vector<std::string> f;
            for (double v : r.values) f.push_back(csv::format(v));
            for (double v : {r.objective, r.recovered_energy, r.omega_peak, r.free_spin_s, r.ledger.input_work,
                             r.ledger.flywheel_ke_delta, r.ledger.loss_friction, r.ledger.loss_aero,
                             r.ledger.loss_electrical, r.ledger.delivered_electrical}) {
                f.push_back(csv::format(v));
            }
            csv::write_row(os, f);
        }
    });
}

// ---------------------------------------------------------------------------

struct VehicleArgs {
    std::string cycle;
    sources::VehicleSpec spec;
    double eta = 0.9;
    std::string out;
};

void cmd_vehicle(const VehicleArgs& a, std::ostream& out) {
    require_file(a.cycle);
    const auto cycle = csv::read_drive_cycle(a.cycle);
    const auto r = sources::regen_energy_over_cycle(a.spec, cycle, a.eta);
    json doc = {{"eta", a.eta},
                {"gross_ke_delta_j", r.gross_ke_delta},
                {"gross_pe_delta_j", r.gross_pe_delta},
                {"aero_loss_j", r.aero_loss},
                {"tire_loss_j", r.tire_loss},
                {"braking_energy_j", r.braking_energy},
                {"traction_work_j", r.traction_work},
                {"net_recoverable_j", r.net_recoverable},
                {"ledger", ledger_json(r.ledger)}};
    emit(a.out, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

// ---------------------------------------------------------------------------

experiments::LossCoefficient parse_coefficient(const std::string& name) {
    if (name == "coulomb") return experiments::LossCoefficient::Coulomb;
    if (name == "viscous") return experiments::LossCoefficient::Viscous;
    if (name == "aero") return experiments::LossCoefficient::Aero;
    throw ConfigError("--coefficient must be coulomb, viscous or aero");
}

void cmd_calibrate(const std::string& scenario_path, double target, double lo, double hi, const std::string& which,
                   const std::string& output, std::ostream& out) {
    Scenario s = io::read_scenario(scenario_path);
    const auto losses = experiments::calibrate_losses(target, s, {lo, hi}, parse_coefficient(which));
    s.losses = losses;
    json doc = {{"target_free_spin_s", target},
                {"achieved_free_spin_s", experiments::free_spin_duration(s)},
                {"losses",
                 {{"coulomb_torque", losses.coulomb_torque},
                  {"viscous_coeff", losses.viscous_coeff},
                  {"aero_coeff", losses.aero_coeff}}}};
    emit(output, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

void cmd_bench(int case_id, const std::string& output, std::ostream& out) {
    const Scenario s = experiments::bench_case(case_id);
    emit(output, out, [&](std::ostream& os) { os << io::to_json(s).dump(2) << '\n'; });
}

}  // namespace

// ---------------------------------------------------------------------------

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Flywheel regenerative braking simulator and analysis toolkit", "rbs"};
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Run a drivetrain scenario and write its time series");
    simulate->add_option("scenario", sim.scenario, "Scenario JSON")->required();
    simulate->add_option("-o,--out", sim.out_dir, "Output directory");
    simulate->add_option("--dt", sim.dt, "Integrator step override, s");
    simulate->add_option("--until", sim.until, "End time override, s");
    simulate->add_option("--set", sim.overrides, "Override a parameter: path=value (repeatable)");

    WindArgs wind;
    auto* wind_cmd = app.add_subcommand("wind", "Recoverable wind energy from a wind-speed trace");
    wind_cmd->add_option("trace", wind.trace, "CSV with t_s,v_mps")->required();
    wind_cmd->add_option("--rho", wind.site.rho, "Air density, kg/m^3");
    wind_cmd->add_option("--area", wind.site.area, "Rotor swept area, m^2");
    wind_cmd->add_option("--cut-in", wind.site.cut_in_velocity, "Cut-in velocity, m/s");
    wind_cmd->add_option("--eta", wind.site.eta, "Recovery efficiency");
    wind_cmd->add_option("--cb", wind.c_b, "Betz coefficient (default 16/27)");
    wind_cmd->add_option("--interval", wind.intervals, "Sub-interval start and end, s (repeatable)")
        ->expected(2)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    wind_cmd->add_option("--rule", wind.rule, "Segment rule")->check(CLI::IsMember({"simpson", "analytic"}));
    wind_cmd->add_option("-o,--out", wind.out, "Write the JSON report here instead of stdout");

    AnalyzeArgs an;
    auto* analyze = app.add_subcommand("analyze", "Fit and bench-energy report for a flywheel speed trace");
    analyze->add_option("trace", an.trace, "CSV with t_s,omega_rad_s (or t_s,omega_rpm with --rpm)")->required();
    analyze->add_option("--inertia", an.inertia, "Flywheel inertia, kg m^2");
    analyze->add_option("--flywheel", an.flywheel, "Flywheel JSON spec");
    analyze->add_option("--fit-degree", an.fit_degree, "Polynomial degree");
    analyze->add_flag("--rpm", an.rpm, "Speed column is in rpm");
    analyze->add_option("--plateau-tol", an.plateau_tol, "Relative band around the peak treated as plateau");
    analyze->add_option("-o,--out", an.out, "Write the JSON report here instead of stdout");

    std::string tables_in;
    std::string tables_out;
    auto* tables = app.add_subcommand("tables", "Average per-run bench results by case");
    tables->add_option("table1", tables_in, "CSV with case_id,omega_max_rpm,braking_s,free_spin_s,energy_j")
        ->required();
    tables->add_option("-o,--out", tables_out, "Write the summary CSV here instead of stdout");

    std::string sweep_scenario;
    std::string sweep_spec;
    std::string sweep_out;
    auto* sweep = app.add_subcommand("sweep", "Full-factorial design sweep");
    sweep->add_option("scenario", sweep_scenario, "Base scenario JSON")->required();
    sweep->add_option("sweep", sweep_spec, "Sweep JSON")->required();
    sweep->add_option("-o,--out", sweep_out, "Write results CSV here instead of stdout");

    VehicleArgs veh;
    auto* vehicle = app.add_subcommand("vehicle", "Braking energy available over a drive cycle");
    vehicle->add_option("cycle", veh.cycle, "CSV with t_s,v_mps,elev_m")->required();
    vehicle->add_option("--mass", veh.spec.mass, "Vehicle mass, kg");
    vehicle->add_option("--g", veh.spec.g, "Gravity, m/s^2");
    vehicle->add_option("--drag-area", veh.spec.drag_area, "Drag coefficient times frontal area, m^2");
    vehicle->add_option("--air-density", veh.spec.air_density, "Air density, kg/m^3");
    vehicle->add_option("--rolling", veh.spec.rolling_coeff, "Rolling resistance coefficient");
    vehicle->add_option("--eta", veh.eta, "Recovery efficiency");
    vehicle->add_option("-o,--out", veh.out, "Write the JSON report here instead of stdout");

    std::string cal_scenario;
    double cal_target = 0.0;
    double cal_lo = 0.0;
    double cal_hi = 1.0;
    std::string cal_which = "viscous";
    std::string cal_out;
    auto* calibrate = app.add_subcommand("calibrate", "Fit one loss coefficient to a measured free-spin time");
    calibrate->add_option("scenario", cal_scenario, "Scenario JSON")->required();
    calibrate->add_option("--target", cal_target, "Measured free-spin duration, s")->required();
    calibrate->add_option("--lo", cal_lo, "Lower bracket");
    calibrate->add_option("--hi", cal_hi, "Upper bracket");
    calibrate->add_option("--coefficient", cal_which, "coulomb, viscous or aero");
    calibrate->add_option("-o,--out", cal_out, "Write the JSON result here instead of stdout");

    int bench_id = 0;
    std::string bench_out;
    auto* bench = app.add_subcommand("bench", "Print the scenario for bench case 1, 2 or 3");
    bench->add_option("case", bench_id, "Case id")->required();
    bench->add_option("-o,--out", bench_out, "Write the scenario JSON here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (simulate->parsed()) cmd_simulate(sim, out);
        else if (wind_cmd->parsed()) cmd_wind(wind, out);
        else if (analyze->parsed()) cmd_analyze(an, out);
        else if (tables->parsed()) cmd_tables(tables_in, tables_out, out);
        else if (sweep->parsed()) cmd_sweep(sweep_scenario, sweep_spec, sweep_out, out);
        else if (vehicle->parsed()) cmd_vehicle(veh, out);
        else if (calibrate->parsed()) cmd_calibrate(cal_scenario, cal_target, cal_lo, cal_hi, cal_which, cal_out, out);
        else if (bench->parsed()) cmd_bench(bench_id, bench_out, out);
    } catch (const NumericFault& e) {
        err << "numeric fault: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
    return kExitOk;
}

}  // namespace rbs::cli
