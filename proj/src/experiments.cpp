#include "rbs/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace rbs::experiments {

FlywheelSpec prototype_flywheel(double r_inner) {
    return FlywheelSpec{AnnularRim{kAluminiumDensity, kPrototypeOuterRadius, r_inner, kPrototypeThickness}};
}

drivetrain::LossModel bench_losses() {
    return {0.0, 0.0053764186, 1e-6};
}

electrical::Alternator bench_alternator() {
    return {0.8, 0.003};
}

electrical::UltracapBank bench_bank() {
    electrical::UltracapBank bank;
    bank.capacitance = 0.5;
    bank.v_max = 5.5;
    bank.v_dump = 5.0;
    return bank;
}

Scenario bench_case(int case_id) {
    struct Row {
        double omega_max_rpm;
        double braking_s;
    };
    static constexpr Row kRows[] = {{300.0, 10.0}, {500.0, 5.0}, {500.0, 10.0}};
    if (case_id < 1 || case_id > 3) {
        throw InvalidInput("unknown bench case " + std::to_string(case_id) + " (expected 1, 2 or 3)");
    }
    const Row row = kRows[case_id - 1];

    Scenario s;
    s.flywheel = prototype_flywheel();
    s.gear = {kPrototypeGearRatio};
    s.losses = bench_losses();
    s.alternator = bench_alternator();
    s.bank = bench_bank();
    s.shaft_profile = drivetrain::SpinUpProfile{rpm_to_rad_s(row.omega_max_rpm) / kPrototypeGearRatio, 1.0,
                                                row.braking_s, 0.0, 0.1};
    s.integrator.dt = 1e-3;
    s.integrator.output_stride = 10;
    s.integrator.free_spin_horizon = 120.0;
    return s;
}

// ---------------------------------------------------------------------------

double free_spin_duration(const Scenario& scenario) {
    const auto res = drivetrain::simulate(scenario);
    const auto d = res.free_spin_duration();
    return d ? *d : std::numeric_limits<double>::infinity();
}

namespace {

double& coefficient(drivetrain::LossModel& m, LossCoefficient which) {
    switch (which) {
        case LossCoefficient::Coulomb: return m.coulomb_torque;
        case LossCoefficient::Viscous: return m.viscous_coeff;
        case LossCoefficient::Aero: return m.aero_coeff;
    }
    return m.viscous_coeff;
}

}  // namespace

drivetrain::LossModel calibrate_losses(double target_s, const Scenario& scenario, Bracket bracket,
                                       LossCoefficient which, const CalibrationOptions& opts) {
    if (!(target_s > 0.0)) throw InvalidInput("calibration target must be positive");
    if (!(bracket.lo >= 0.0 && bracket.hi > bracket.lo)) {
        throw InvalidInput("calibration bracket needs 0 <= lo < hi");
    }

    Scenario trial = scenario;
    auto duration_at = [&](double c) {
        coefficient(trial.losses, which) = c;
        return free_spin_duration(trial);
    };

    double lo = bracket.lo;
    double hi = bracket.hi;
    const double d_lo = duration_at(lo);
    const double d_hi = duration_at(hi);
    if (!(d_lo >= target_s && d_hi <= target_s)) {
        throw CalibrationFailure("target free-spin " + std::to_string(target_s) + " s is not bracketed: " +
                                     std::to_string(d_lo) + " s at " + std::to_string(lo) + ", " +
                                     std::to_string(d_hi) + " s at " + std::to_string(hi),
                                 lo, hi);
    }

    for (int it = 0; it < opts.max_iterations && hi - lo > opts.rel_tol * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (duration_at(mid) > target_s) lo = mid; else hi = mid;
    }
    const double best = 0.5 * (lo + hi);
    const double achieved = duration_at(best);
    if (!(std::abs(achieved - target_s) <= opts.duration_tol)) {
        throw CalibrationFailure("calibration ended " + std::to_string(achieved - target_s) +
                                     " s away from the target",
                                 bracket.lo, bracket.hi);
    }
    return trial.losses;
}

// ---------------------------------------------------------------------------

namespace {

[[noreturn]] void unknown_path(std::string_view path) {
    throw ConfigError("unknown or inapplicable parameter path '" + std::string(path) + "'");
}

double* flywheel_field(FlywheelSpec& f, std::string_view name) {
    if (auto* d = std::get_if<UniformDisk>(&f.geometry)) {
        if (name == "mass") return &d->mass;
        if (name == "radius") return &d->radius;
    } else if (auto* r = std::get_if<AnnularRim>(&f.geometry)) {
        if (name == "density") return &r->density;
        if (name == "r_outer") return &r->r_outer;
        if (name == "r_inner") return &r->r_inner;
        if (name == "thickness") return &r->thickness;
    } else if (auto* i = std::get_if<DirectInertia>(&f.geometry)) {
        if (name == "inertia") return &i->inertia;
    }
    return nullptr;
}

double* profile_field(drivetrain::ProfileSpec& p, std::string_view name) {
    if (auto* r = std::get_if<drivetrain::RampProfile>(&p)) {
        if (name == "omega_hold") return &r->omega_hold;
        if (name == "t_brake") return &r->t_brake;
        if (name == "t_stop") return &r->t_stop;
    } else if (auto* s = std::get_if<drivetrain::SpinUpProfile>(&p)) {
        if (name == "omega_peak") return &s->omega_peak;
        if (name == "t_engage") return &s->t_engage;
        if (name == "spin_up") return &s->spin_up;
        if (name == "hold") return &s->hold;
        if (name == "release") return &s->release;
    } else if (auto* t = std::get_if<drivetrain::TraceProfile>(&p)) {
        if (name == "arm_time") return &t->arm_time;
    }
    return nullptr;
}

double* field(Scenario& s, std::string_view path) {
    const auto dot = path.find('.');
    const std::string_view head = path.substr(0, dot);
    const std::string_view tail = dot == std::string_view::npos ? std::string_view{} : path.substr(dot + 1);

    if (tail.empty()) {
        if (head == "eps_sync") return &s.eps_sync;
        if (head == "omega_stop_threshold") return &s.omega_stop_threshold;
        if (head == "initial_flywheel_omega") return &s.initial_flywheel_omega;
        return nullptr;
    }
    if (head == "flywheel") return flywheel_field(s.flywheel, tail);
    if (head == "shaft_profile") return profile_field(s.shaft_profile, tail);
    if (head == "gear" && tail == "ratio") return &s.gear.ratio;
    if (head == "losses") {
        if (tail == "coulomb_torque") return &s.losses.coulomb_torque;
        if (tail == "viscous_coeff") return &s.losses.viscous_coeff;
        if (tail == "aero_coeff") return &s.losses.aero_coeff;
    }
    if (head == "alternator") {
        if (tail == "efficiency") return &s.alternator.efficiency;
        if (tail == "load_coeff") return &s.alternator.load_coeff;
    }
    if (head == "bank") {
        if (tail == "capacitance") return &s.bank.capacitance;
        if (tail == "voltage") return &s.bank.voltage;
        if (tail == "v_max") return &s.bank.v_max;
        if (tail == "v_dump") return &s.bank.v_dump;
        if (tail == "v_reset") return &s.bank.v_reset;
        if (tail == "trickle_min") return &s.bank.trickle_min;
    }
    if (head == "integrator") {
        if (tail == "dt") return &s.integrator.dt;
        if (tail == "free_spin_horizon") return &s.integrator.free_spin_horizon;
    }
    return nullptr;
}

}  // namespace

void set_parameter(Scenario& scenario, std::string_view path, double value) {
    if (!std::isfinite(value)) throw ConfigError("parameter '" + std::string(path) + "' must be finite");
    if (path == "integrator.output_stride") {
        if (value < 1.0 || value != std::floor(value)) {
            throw ConfigError("integrator.output_stride must be a positive integer");
        }
        scenario.integrator.output_stride = static_cast<int>(value);
        return;
    }
    if (path == "integrator.t_end") {
        scenario.integrator.t_end = value;
        return;
    }
    double* p = field(scenario, path);
    if (!p) unknown_path(path);
    *p = value;
}

double get_parameter(const Scenario& scenario, std::string_view path) {
    if (path == "integrator.output_stride") return scenario.integrator.output_stride;
    if (path == "integrator.t_end") return scenario.horizon();
    Scenario copy = scenario;
    double* p = field(copy, path);
    if (!p) unknown_path(path);
    return *p;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Objective o) {
    return o == Objective::NetRecovered ? "net_recovered" : "delivered_electrical";
}

void SweepSpec::validate() const {
    if (axes.empty()) throw ConfigError("sweep needs at least one axis");
    for (const auto& a : axes) {
        if (a.values.empty()) throw ConfigError("sweep axis '" + a.path + "' has no values");
    }
}

std::size_t SweepSpec::cell_count() const {
    std::size_t n = 1;
    for (const auto& a : axes) {
        if (a.values.empty()) return 0;
        if (n > std::numeric_limits<std::size_t>::max() / a.values.size()) {
            return std::numeric_limits<std::size_t>::max();
        }
        n *= a.values.size();
    }
    return n;
}

bool SweepRow::operator==(const SweepRow& o) const {
    auto same = [](double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); };
    return values == o.values && objective == o.objective && ledger == o.ledger &&
           recovered_energy == o.recovered_energy && omega_peak == o.omega_peak && same(free_spin_s, o.free_spin_s);
}

double objective_value(const drivetrain::SimulationResult& result, Objective o) {
    return o == Objective::NetRecovered ? result.recovered_energy() : result.ledger.delivered_electrical;
}

SweepRow evaluate_cell(const SweepSpec& spec, const Scenario& base, std::span<const double> values) {
    if (values.size() != spec.axes.size()) throw InvalidInput("sweep cell needs one value per axis");
    Scenario s = base;
    for (std::size_t i = 0; i < values.size(); ++i) set_parameter(s, spec.axes[i].path, values[i]);
    const auto res = drivetrain::simulate(s);
    const auto fs = res.free_spin_duration();
    return {std::vector<double>(values.begin(), values.end()),
            objective_value(res, spec.objective),
            res.ledger,
            res.recovered_energy(),
            res.omega_peak,
            fs ? *fs : std::numeric_limits<double>::quiet_NaN()};
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec, const Scenario& base, unsigned threads) {
    spec.validate();
    const std::size_t cells = spec.cell_count();
    if (cells > spec.cell_cap) {
        throw ConfigError("sweep grid has " + std::to_string(cells) + " cells, above the cap of " +
                          std::to_string(spec.cell_cap));
    }

    // Row-major enumeration, last axis fastest.
    auto cell_values = [&](std::size_t index) {
        std::vector<double> v(spec.axes.size());
        for (std::size_t a = spec.axes.size(); a-- > 0;) {
            const auto& vals = spec.axes[a].values;
            v[a] = vals[index % vals.size()];
            index /= vals.size();
        }
        return v;
    };

    std::vector<SweepRow> rows(cells);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < cells; i = next++) {
            try {
                rows[i] = evaluate_cell(spec, base, cell_values(i));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = cells;
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) {
        if (a.objective != b.objective) return a.objective > b.objective;
        return a.values < b.values;
    });
    return rows;
}

}  // namespace rbs::experiments
