#pragma once

// Shaft -> inertia clutch -> gear train -> flywheel/alternator.
//
// The clutch is one-way: it can only drive the flywheel up to ratio * shaft
// speed. While engaged the flywheel is kinematically slaved to the shaft;
// once the shaft falls behind, the flywheel free-spins against its loss and
// alternator torques, integrated with classical RK4.

#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "rbs/core.hpp"
#include "rbs/electrical.hpp"

namespace rbs::drivetrain {

enum class Phase { Idle, Engaged, Synchronized, FreeSpin, Stopped };

std::string_view to_string(Phase p);
std::optional<Phase> parse_phase(std::string_view name);

// Idle -> Engaged -> Synchronized -> FreeSpin -> Stopped, with
// Engaged -> FreeSpin allowed (no synchronized interval). Staying in the
// same phase is legal.
bool is_legal_transition(Phase from, Phase to);

// Flywheel speed / shaft speed while engaged.
struct GearTrain {
    double ratio = 4.0;

    void validate() const;
    bool operator==(const GearTrain&) const = default;
};

// Coulomb + viscous + quadratic aerodynamic drag on the flywheel.
struct LossModel {
    double coulomb_torque = 0.0;  // N m
    double viscous_coeff = 0.0;   // N m s / rad
    double aero_coeff = 0.0;      // N m s^2 / rad^2

    void validate() const;
    bool operator==(const LossModel&) const = default;
};

// coulomb sgn(w) + viscous w + aero w^2; zero at rest. Throws InvalidInput
// for negative omega.
double loss_torque(const LossModel& model, double omega);

// Overrunning clutch rule: ratio * omega_shaft >= omega_flywheel - eps.
bool clutch_engaged(double omega_shaft, double omega_flywheel, const GearTrain& gear, double eps);

// ---------------------------------------------------------------------------
// Shaft speed commands

// Hold omega_hold, arm the clutch at t_brake and decelerate linearly to rest
// at t_stop.
struct RampProfile {
    double omega_hold = 0.0;  // rad/s
    double t_brake = 0.0;     // s
    double t_stop = 1.0;      // s
    bool operator==(const RampProfile&) const = default;
};

// Bench-style profile seen at the clutch input: rest until t_engage, linear
// rise to omega_peak over spin_up, optional hold, then release to rest.
// hold == 0 gives a peak that coincides with disengagement.
struct SpinUpProfile {
    double omega_peak = 0.0;  // rad/s, shaft side
    double t_engage = 1.0;    // s
    double spin_up = 5.0;     // s
    double hold = 0.0;        // s
    double release = 0.1;     // s
    bool operator==(const SpinUpProfile&) const = default;
};

// Arbitrary piecewise-linear command; the clutch is armed from arm_time.
struct TraceProfile {
    SpeedTrace trace;
    double arm_time = 0.0;
    bool operator==(const TraceProfile&) const = default;
};

using ProfileSpec = std::variant<RampProfile, SpinUpProfile, TraceProfile>;

class ShaftProfile {
public:
    ShaftProfile(SpeedTrace trace, double arm_time);

    // Throws ConfigError for inconsistent timing.
    static ShaftProfile from_spec(const ProfileSpec& spec);

    double omega(double t) const { return trace_.value_at(t); }
    bool armed(double t) const { return t >= arm_time_; }
    double t_begin() const { return trace_.t_begin(); }
    double t_end() const { return trace_.t_end(); }
    double arm_time() const { return arm_time_; }
    const SpeedTrace& trace() const { return trace_; }

private:
    SpeedTrace trace_;
    double arm_time_;
};

// ---------------------------------------------------------------------------
// State and stepping

struct RbsState {
    double t = 0.0;
    double omega_shaft = 0.0;
    double omega_flywheel = 0.0;
    bool engaged = false;
    Phase phase = Phase::Idle;
    EnergyLedger ledger;
    electrical::UltracapBank bank;

    bool operator==(const RbsState&) const = default;
};

struct PhaseContext {
    Phase previous = Phase::Idle;
    double previous_omega = 0.0;  // flywheel speed at the previous sample
    double omega_stop = 0.01;
};

// Deterministic phase classification. Engaged covers the engaged interval
// while the flywheel is still rising toward its first peak; any later
// engaged sample is Synchronized. Disengaged samples are FreeSpin while the
// flywheel runs at or above omega_stop, Stopped below it (Idle if it never
// left rest).
Phase phase_of(const RbsState& state, const PhaseContext& ctx);

// Everything step needs besides the state.
struct StepModel {
    double inertia = 1.0;
    GearTrain gear;
    LossModel losses;
    electrical::Alternator alternator;
    double eps_sync = 1e-3;
    double omega_stop = 0.01;
    ShaftProfile profile;
};

struct StepOutcome {
    RbsState state;
    std::vector<electrical::ChargeEvent> events;
};

// Advance by dt.
//
// The flywheel's free trajectory is integrated with RK4 together with the
// friction, aero and alternator energies. If the armed clutch rule holds
// against that free speed and the shaft would drive the flywheel faster, the
// flywheel is slaved to ratio * shaft speed instead and the shaft supplies
// input work = dKE + losses (losses by Simpson on the linear speed path).
// Alternator output is pushed through the bank with charge_step.
//
// Throws InvalidInput for dt <= 0, NumericFault on non-finite state.
StepOutcome step(const RbsState& state, const StepModel& model, double dt);

// Initial state at the profile start, flywheel at initial_omega.
RbsState initial_state(const StepModel& model, const electrical::UltracapBank& bank, double initial_omega);

}  // namespace rbs::drivetrain
