#include "rbs/scenario.hpp"

#include <cmath>
#include <string>

namespace rbs {

namespace {

template <class F>
void check(const char* field, F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        throw ConfigError(std::string(field) + ": " + e.what());
    }
}

}  // namespace

void Scenario::validate() const {
    check("flywheel", [&] { flywheel.validate(); });
    check("gear", [&] { gear.validate(); });
    check("losses", [&] { losses.validate(); });
    check("alternator", [&] { alternator.validate(); });
    check("bank", [&] { bank.validate(); });
    check("shaft_profile", [&] { (void)drivetrain::ShaftProfile::from_spec(shaft_profile); });
    if (!(integrator.dt > 0.0) || !std::isfinite(integrator.dt)) throw ConfigError("integrator.dt: dt must be positive");
    if (integrator.output_stride < 1) throw ConfigError("integrator.output_stride: must be at least 1");
    if (!(integrator.free_spin_horizon >= 0.0)) {
        throw ConfigError("integrator.free_spin_horizon: must be non-negative");
    }
    if (!(eps_sync >= 0.0)) throw ConfigError("eps_sync: must be non-negative");
    if (!(omega_stop_threshold > 0.0)) throw ConfigError("omega_stop_threshold: must be positive");
    if (!(initial_flywheel_omega >= 0.0) || !std::isfinite(initial_flywheel_omega)) {
        throw ConfigError("initial_flywheel_omega: must be non-negative");
    }
    if (integrator.t_end) {
        const auto profile = drivetrain::ShaftProfile::from_spec(shaft_profile);
        if (!(*integrator.t_end > profile.t_begin())) {
            throw ConfigError("integrator.t_end: must lie after the profile start");
        }
    }
}

double Scenario::horizon() const {
    if (integrator.t_end) return *integrator.t_end;
    return drivetrain::ShaftProfile::from_spec(shaft_profile).t_end() + integrator.free_spin_horizon;
}

drivetrain::StepModel Scenario::step_model() const {
    return {inertia(flywheel), gear,     losses, alternator, eps_sync, omega_stop_threshold,
            drivetrain::ShaftProfile::from_spec(shaft_profile)};
}

}  // namespace rbs
