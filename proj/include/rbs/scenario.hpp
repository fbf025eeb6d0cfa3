#pragma once

#include <optional>

#include "rbs/core.hpp"
#include "rbs/drivetrain.hpp"
#include "rbs/electrical.hpp"

namespace rbs {

struct IntegratorSettings {
    double dt = 1e-3;                   // s
    int output_stride = 10;             // record every n-th step
    std::optional<double> t_end;        // s; defaults to profile end + free_spin_horizon
    double free_spin_horizon = 600.0;   // s

    bool operator==(const IntegratorSettings&) const = default;
};

// Full description of one drivetrain simulation.
struct Scenario {
    FlywheelSpec flywheel{UniformDisk{2.0, 0.2}};
    drivetrain::GearTrain gear;
    drivetrain::LossModel losses;
    electrical::Alternator alternator;
    electrical::UltracapBank bank;
    drivetrain::ProfileSpec shaft_profile{drivetrain::SpinUpProfile{}};
    IntegratorSettings integrator;
    double eps_sync = 1e-3;              // rad/s
    double omega_stop_threshold = 0.01;  // rad/s
    double initial_flywheel_omega = 0.0; // rad/s

    // Throws ConfigError naming the offending field.
    void validate() const;

    // Horizon the simulation runs to unless the flywheel stops first.
    double horizon() const;

    drivetrain::StepModel step_model() const;

    bool operator==(const Scenario&) const = default;
};

}  // namespace rbs
