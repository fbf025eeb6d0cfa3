#pragma once

#include <optional>
#include <vector>

#include "rbs/drivetrain.hpp"
#include "rbs/scenario.hpp"

namespace rbs::drivetrain {

struct PhaseInterval {
    Phase phase;
    double t_start;
    double t_end;
};

struct SimulationResult {
    std::vector<RbsState> trajectory;  // every output_stride steps, plus first and last
    EnergyLedger ledger;
    std::vector<PhaseInterval> phases;
    std::vector<electrical::ChargeEvent> events;

    double inertia = 0.0;
    double omega_initial = 0.0;
    double omega_peak = 0.0;
    double t_peak = 0.0;
    std::optional<double> t_disengage;  // last engaged instant before free spin
    std::optional<double> t_stop;       // interpolated crossing of omega_stop
    std::size_t steps = 0;

    // t_stop - t_disengage, when both exist.
    std::optional<double> free_spin_duration() const;

    // Kinetic energy stored by the braking event: 1/2 I (w_peak^2 - w_initial^2).
    double recovered_energy() const;

    // Energy handed to the battery/grid by dump events.
    double dumped_energy() const;

    const RbsState& final_state() const { return trajectory.back(); }
};

// Runs the scenario until the flywheel has stopped after the shaft profile
// ends, or until the horizon. Steps follow the dt grid and also land on the
// profile's breakpoints. Throws ConfigError for an invalid scenario and
// NumericFault if the integration produces non-finite values.
SimulationResult simulate(const Scenario& scenario);

}  // namespace rbs::drivetrain
