#include "rbs/scenario_io.hpp"

#include <fstream>
#include <set>

namespace rbs::io {

using nlohmann::json;

namespace {

// Strict view over one JSON object: every key must be consumed.
class Obj {
public:
    Obj(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        if (!j_.contains(key)) throw ConfigError(path(key) + ": missing required field");
        seen_.insert(key);
        return j_.at(key);
    }

    double num(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number");
        return v.get<double>();
    }

    double num(const std::string& key, double fallback) { return has(key) ? num(key) : fallback; }

    std::optional<double> opt_num(const std::string& key) {
        if (!has(key)) return std::nullopt;
        const json& v = raw(key);
        if (v.is_null()) return std::nullopt;
        if (!v.is_number()) throw ConfigError(path(key) + ": expected a number or null");
        return v.get<double>();
    }

    int integer(const std::string& key, int fallback) {
        if (!has(key)) return fallback;
        const json& v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(path(key) + ": expected an integer");
        return v.get<int>();
    }

    std::string str(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) throw ConfigError(path(key) + ": expected a string");
        return v.get<std::string>();
    }

    std::string path(const std::string& key) const { return where_ + "." + key; }

    void finish() const {
        for (const auto& [key, _] : j_.items()) {
            if (!seen_.count(key)) throw ConfigError(path(key) + ": unknown field");
        }
    }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

template <class F>
auto in_context(const std::string& where, F&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

}  // namespace

// ---------------------------------------------------------------------------

json to_json(const FlywheelSpec& spec) {
    return std::visit(
        [](const auto& g) -> json {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, UniformDisk>) {
                return {{"type", "uniform_disk"}, {"mass", g.mass}, {"radius", g.radius}};
            } else if constexpr (std::is_same_v<G, AnnularRim>) {
                return {{"type", "annular_rim"},
                        {"density", g.density},
                        {"r_outer", g.r_outer},
                        {"r_inner", g.r_inner},
                        {"thickness", g.thickness}};
            } else {
                return {{"type", "direct"}, {"inertia", g.inertia}};
            }
        },
        spec.geometry);
}

json to_json(const drivetrain::ProfileSpec& profile) {
    return std::visit(
        [](const auto& p) -> json {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, drivetrain::RampProfile>) {
                return {{"type", "ramp"}, {"omega_hold", p.omega_hold}, {"t_brake", p.t_brake}, {"t_stop", p.t_stop}};
            } else if constexpr (std::is_same_v<P, drivetrain::SpinUpProfile>) {
                return {{"type", "spin_up"},  {"omega_peak", p.omega_peak}, {"t_engage", p.t_engage},
                        {"spin_up", p.spin_up}, {"hold", p.hold},             {"release", p.release}};
            } else {
                json samples = json::array();
                for (const auto& s : p.trace.samples()) samples.push_back({s.t, s.value});
                return {{"type", "trace"}, {"arm_time", p.arm_time}, {"samples", samples}};
            }
        },
        profile);
}

json to_json(const Scenario& s) {
    json integrator = {{"dt", s.integrator.dt},
                       {"output_stride", s.integrator.output_stride},
                       {"free_spin_horizon", s.integrator.free_spin_horizon}};
    integrator["t_end"] = s.integrator.t_end ? json(*s.integrator.t_end) : json(nullptr);
    return {
        {"flywheel", to_json(s.flywheel)},
        {"gear", {{"ratio", s.gear.ratio}}},
        {"losses",
         {{"coulomb_torque", s.losses.coulomb_torque},
          {"viscous_coeff", s.losses.viscous_coeff},
          {"aero_coeff", s.losses.aero_coeff}}},
        {"alternator", {{"efficiency", s.alternator.efficiency}, {"load_coeff", s.alternator.load_coeff}}},
        {"bank",
         {{"capacitance", s.bank.capacitance},
          {"voltage", s.bank.voltage},
          {"v_max", s.bank.v_max},
          {"v_dump", s.bank.v_dump},
          {"v_reset", s.bank.v_reset},
          {"trickle_min", s.bank.trickle_min},
          {"destination", std::string(electrical::to_string(s.bank.destination))}}},
        {"shaft_profile", to_json(s.shaft_profile)},
        {"integrator", integrator},
        {"eps_sync", s.eps_sync},
        {"omega_stop_threshold", s.omega_stop_threshold},
        {"initial_flywheel_omega", s.initial_flywheel_omega},
    };
}

json to_json(const experiments::SweepSpec& spec) {
    json axes = json::array();
    for (const auto& a : spec.axes) axes.push_back({{"path", a.path}, {"values", a.values}});
    return {{"axes", axes}, {"objective", std::string(experiments::to_string(spec.objective))},
            {"cell_cap", spec.cell_cap}};
}

// ---------------------------------------------------------------------------

FlywheelSpec flywheel_from_json(const json& j, const std::string& where) {
    Obj o(j, where);
    const std::string type = o.str("type");
    FlywheelSpec spec;
    if (type == "uniform_disk") {
        spec.geometry = UniformDisk{o.num("mass"), o.num("radius")};
    } else if (type == "annular_rim") {
        spec.geometry = AnnularRim{o.num("density"), o.num("r_outer"), o.num("r_inner"), o.num("thickness")};
    } else if (type == "direct") {
        spec.geometry = DirectInertia{o.num("inertia")};
    } else {
        throw ConfigError(o.path("type") + ": unknown flywheel type '" + type +
                          "' (uniform_disk, annular_rim, direct)");
    }
    o.finish();
    in_context(where, [&] { spec.validate(); });
    return spec;
}

namespace {

drivetrain::ProfileSpec profile_from_json(const json& j) {
    Obj o(j, "shaft_profile");
    const std::string type = o.str("type");
    drivetrain::ProfileSpec out;
    if (type == "ramp") {
        out = drivetrain::RampProfile{o.num("omega_hold"), o.num("t_brake"), o.num("t_stop")};
    } else if (type == "spin_up") {
        drivetrain::SpinUpProfile p;
        p.omega_peak = o.num("omega_peak");
        p.t_engage = o.num("t_engage", p.t_engage);
        p.spin_up = o.num("spin_up");
        p.hold = o.num("hold", p.hold);
        p.release = o.num("release", p.release);
        out = p;
    } else if (type == "trace") {
        const double arm = o.num("arm_time", 0.0);
        const json& arr = o.raw("samples");
        if (!arr.is_array()) throw ConfigError("shaft_profile.samples: expected an array of [t, omega] pairs");
        std::vector<Sample> samples;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const json& pair = arr[i];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
                throw ConfigError("shaft_profile.samples[" + std::to_string(i) + "]: expected [t, omega]");
            }
            samples.push_back({pair[0].get<double>(), pair[1].get<double>()});
        }
        out = in_context("shaft_profile.samples",
                         [&] { return drivetrain::TraceProfile{SpeedTrace(std::move(samples)), arm}; });
    } else {
        throw ConfigError("shaft_profile.type: unknown profile type '" + type + "' (ramp, spin_up, trace)");
    }
    o.finish();
    return out;
}

}  // namespace

Scenario scenario_from_json(const json& j) {
    Obj root(j, "scenario");
    Scenario s;
    s.flywheel = flywheel_from_json(root.raw("flywheel"));
    s.shaft_profile = profile_from_json(root.raw("shaft_profile"));

    if (root.has("gear")) {
        Obj o(root.raw("gear"), "gear");
        s.gear.ratio = o.num("ratio");
        o.finish();
    }
    if (root.has("losses")) {
        Obj o(root.raw("losses"), "losses");
        s.losses.coulomb_torque = o.num("coulomb_torque", 0.0);
        s.losses.viscous_coeff = o.num("viscous_coeff", 0.0);
        s.losses.aero_coeff = o.num("aero_coeff", 0.0);
        o.finish();
    }
    if (root.has("alternator")) {
        Obj o(root.raw("alternator"), "alternator");
        s.alternator.efficiency = o.num("efficiency", s.alternator.efficiency);
        s.alternator.load_coeff = o.num("load_coeff", s.alternator.load_coeff);
        o.finish();
    }
    if (root.has("bank")) {
        Obj o(root.raw("bank"), "bank");
        auto& b = s.bank;
        b.capacitance = o.num("capacitance", b.capacitance);
        b.voltage = o.num("voltage", b.voltage);
        b.v_max = o.num("v_max", b.v_max);
        b.v_dump = o.num("v_dump", b.v_dump);
        b.v_reset = o.num("v_reset", b.v_reset);
        b.trickle_min = o.num("trickle_min", b.trickle_min);
        if (o.has("destination")) {
            const std::string d = o.str("destination");
            if (d == "battery") b.destination = electrical::Destination::Battery;
            else if (d == "grid") b.destination = electrical::Destination::Grid;
            else throw ConfigError("bank.destination: expected 'battery' or 'grid', got '" + d + "'");
        }
        o.finish();
    }
    if (root.has("integrator")) {
        Obj o(root.raw("integrator"), "integrator");
        s.integrator.dt = o.num("dt", s.integrator.dt);
        s.integrator.output_stride = o.integer("output_stride", s.integrator.output_stride);
        s.integrator.t_end = o.opt_num("t_end");
        s.integrator.free_spin_horizon = o.num("free_spin_horizon", s.integrator.free_spin_horizon);
        o.finish();
    }
    s.eps_sync = root.num("eps_sync", s.eps_sync);
    s.omega_stop_threshold = root.num("omega_stop_threshold", s.omega_stop_threshold);
    s.initial_flywheel_omega = root.num("initial_flywheel_omega", s.initial_flywheel_omega);
    root.finish();
    s.validate();
    return s;
}

experiments::SweepSpec sweep_from_json(const json& j) {
    Obj root(j, "sweep");
    experiments::SweepSpec spec;
    const json& axes = root.raw("axes");
    if (!axes.is_array()) throw ConfigError("sweep.axes: expected an array");
    for (std::size_t i = 0; i < axes.size(); ++i) {
        const std::string where = "sweep.axes[" + std::to_string(i) + "]";
        Obj a(axes[i], where);
        experiments::SweepAxis axis;
        axis.path = a.str("path");
        const json& vals = a.raw("values");
        if (!vals.is_array()) throw ConfigError(where + ".values: expected an array of numbers");
        for (const auto& v : vals) {
            if (!v.is_number()) throw ConfigError(where + ".values: expected an array of numbers");
            axis.values.push_back(v.get<double>());
        }
        a.finish();
        spec.axes.push_back(std::move(axis));
    }
    if (root.has("objective")) {
        const std::string obj = root.str("objective");
        if (obj == "net_recovered") spec.objective = experiments::Objective::NetRecovered;
        else if (obj == "delivered_electrical") spec.objective = experiments::Objective::DeliveredElectrical;
        else throw ConfigError("sweep.objective: expected 'net_recovered' or 'delivered_electrical'");
    }
    if (root.has("cell_cap")) {
        const json& cap = root.raw("cell_cap");
        if (!cap.is_number_unsigned()) throw ConfigError("sweep.cell_cap: expected a positive integer");
        spec.cell_cap = cap.get<std::size_t>();
    }
    root.finish();
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path.string() + ": cannot open file");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError(path.string() + ": cannot write file");
    out << j.dump(2) << '\n';
}

Scenario read_scenario(const std::filesystem::path& path) {
    const json j = read_json(path);
    try {
        return scenario_from_json(j);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_scenario(const std::filesystem::path& path, const Scenario& scenario) {
    write_json(path, to_json(scenario));
}

void apply_override(Scenario& scenario, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw ConfigError("override '" + assignment + "' must look like path=value");
    }
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    std::size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ConfigError("override '" + path + "': value '" + text + "' is not a number");
    }
    experiments::set_parameter(scenario, path, value);
}

}  // namespace rbs::io
