#pragma once

// Alternator load and the trickle-charged ultracapacitor bank.

#include <string_view>
#include <vector>

#include "rbs/core.hpp"

namespace rbs::electrical {

// Reaction torque is linear in speed: T = load_coeff * w.
struct Alternator {
    double efficiency = 1.0;  // (0, 1]
    double load_coeff = 0.0;  // N m s / rad

    void validate() const;
    bool operator==(const Alternator&) const = default;
};

struct AlternatorOutput {
    double electrical_energy = 0.0;  // J
    double reaction_torque = 0.0;    // N m
    double loss = 0.0;               // J, (1 - efficiency) share of shaft work
};

// Rectangle-rule energy over one step at constant speed.
AlternatorOutput alternator_step(const Alternator& alt, double omega, double dt);

enum class Destination { Battery, Grid };

std::string_view to_string(Destination d);

struct ChargeEvent {
    double t = 0.0;              // s
    double energy_dumped = 0.0;  // J
    Destination destination = Destination::Battery;

    bool operator==(const ChargeEvent&) const = default;
};

struct UltracapBank {
    double capacitance = 1.0;  // F
    double voltage = 0.0;      // V, state
    double v_max = 16.0;       // V
    double v_dump = 15.0;      // V, dump threshold (<= v_max)
    double v_reset = 0.0;      // V, voltage after a dump
    double trickle_min = 0.0;  // W, optional input cutoff
    Destination destination = Destination::Battery;

    double energy() const { return 0.5 * capacitance * voltage * voltage; }
    double energy_at(double v) const { return 0.5 * capacitance * v * v; }

    // Throws ConfigError for misordered thresholds or non-positive capacitance.
    void validate() const;
    bool operator==(const UltracapBank&) const = default;
};

struct ChargeResult {
    UltracapBank bank;
    std::vector<ChargeEvent> events;
    double accepted = 0.0;  // J taken into the bank this step
    double rejected = 0.0;  // J refused because p_in < trickle_min
};

// Adds p_in * dt to the bank. Each time the stored energy reaches the dump
// threshold the bank drops to v_reset and emits an event, time-stamped at
// the instant within [t_start, t_start + dt] when the threshold was crossed.
ChargeResult charge_step(const UltracapBank& bank, double p_in, double dt, double t_start = 0.0);

}  // namespace rbs::electrical
