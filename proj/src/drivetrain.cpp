#include "rbs/drivetrain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace rbs::drivetrain {

std::string_view to_string(Phase p) {
    switch (p) {
        case Phase::Idle: return "Idle";
        case Phase::Engaged: return "Engaged";
        case Phase::Synchronized: return "Synchronized";
        case Phase::FreeSpin: return "FreeSpin";
        case Phase::Stopped: return "Stopped";
    }
    return "?";
}

std::optional<Phase> parse_phase(std::string_view name) {
    for (Phase p : {Phase::Idle, Phase::Engaged, Phase::Synchronized, Phase::FreeSpin, Phase::Stopped}) {
        if (to_string(p) == name) return p;
    }
    return std::nullopt;
}

bool is_legal_transition(Phase from, Phase to) {
    if (from == to) return true;
    switch (from) {
        case Phase::Idle: return to == Phase::Engaged;
        case Phase::Engaged: return to == Phase::Synchronized || to == Phase::FreeSpin;
        case Phase::Synchronized: return to == Phase::FreeSpin;
        case Phase::FreeSpin: return to == Phase::Stopped;
        case Phase::Stopped: return false;
    }
    return false;
}

void GearTrain::validate() const {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) throw ConfigError("gear ratio must be positive");
}

void LossModel::validate() const {
    for (double c : {coulomb_torque, viscous_coeff, aero_coeff}) {
        if (!(c >= 0.0) || !std::isfinite(c)) throw ConfigError("loss coefficients must be non-negative");
    }
}

double loss_torque(const LossModel& model, double omega) {
    if (omega < 0.0) throw InvalidInput("angular velocity must be non-negative");
    if (omega == 0.0) return 0.0;
    return model.coulomb_torque + model.viscous_coeff * omega + model.aero_coeff * omega * omega;
}

bool clutch_engaged(double omega_shaft, double omega_flywheel, const GearTrain& gear, double eps) {
    return gear.ratio * omega_shaft >= omega_flywheel - eps;
}

// ---------------------------------------------------------------------------

ShaftProfile::ShaftProfile(SpeedTrace trace, double arm_time) : trace_(std::move(trace)), arm_time_(arm_time) {
    if (!std::isfinite(arm_time_)) throw ConfigError("clutch arm time must be finite");
}

ShaftProfile ShaftProfile::from_spec(const ProfileSpec& spec) {
    return std::visit(
        [](const auto& p) -> ShaftProfile {
            using P = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<P, RampProfile>) {
                if (!(p.omega_hold >= 0.0)) throw ConfigError("shaft_profile.omega_hold must be non-negative");
                if (!(p.t_brake > 0.0 && p.t_stop > p.t_brake)) {
                    throw ConfigError("shaft_profile needs 0 < t_brake < t_stop");
                }
                return ShaftProfile(SpeedTrace({{0.0, p.omega_hold}, {p.t_brake, p.omega_hold}, {p.t_stop, 0.0}}),
                                    p.t_brake);
            } else if constexpr (std::is_same_v<P, SpinUpProfile>) {
                if (!(p.omega_peak >= 0.0)) throw ConfigError("shaft_profile.omega_peak must be non-negative");
                if (!(p.t_engage >= 0.0 && p.spin_up > 0.0 && p.hold >= 0.0 && p.release > 0.0)) {
                    throw ConfigError("shaft_profile needs t_engage >= 0, spin_up > 0, hold >= 0, release > 0");
                }
                std::vector<Sample> s;
                s.push_back({0.0, 0.0});
                if (p.t_engage > 0.0) s.push_back({p.t_engage, 0.0});
                double t = p.t_engage + p.spin_up;
                s.push_back({t, p.omega_peak});
                if (p.hold > 0.0) {
                    t += p.hold;
                    s.push_back({t, p.omega_peak});
                }
                s.push_back({t + p.release, 0.0});
                return ShaftProfile(SpeedTrace(std::move(s)), 0.0);
            } else {
                return ShaftProfile(p.trace, p.arm_time);
            }
        },
        spec);
}

// ---------------------------------------------------------------------------

Phase phase_of(const RbsState& state, const PhaseContext& ctx) {
    const double w = state.omega_flywheel;
    const bool rising = w > ctx.previous_omega;
    if (state.engaged) {
        switch (ctx.previous) {
            case Phase::Idle:
                return (w < ctx.omega_stop && !rising) ? Phase::Idle : Phase::Engaged;
            case Phase::Engaged:
                return rising ? Phase::Engaged : Phase::Synchronized;
            case Phase::Synchronized:
                return Phase::Synchronized;
            case Phase::FreeSpin:
            case Phase::Stopped:
                // Re-driven after a free spin; starts a new engagement.
                return rising ? Phase::Engaged : Phase::Synchronized;
        }
    }
    if (w >= ctx.omega_stop) return Phase::FreeSpin;
    return ctx.previous == Phase::Idle ? Phase::Idle : Phase::Stopped;
}

namespace {

// Free-spin energies over one step.
struct Dissipation {
    double friction = 0.0;
    double aero = 0.0;
    double alternator = 0.0;  // shaft work absorbed by the alternator

    double total() const { return friction + aero + alternator; }
};

using FreeState = std::array<double, 4>;  // omega, E_friction, E_aero, E_alternator

// A one-way clutch never drives the flywheel backwards, so w <= 0 is rest:
// static friction holds it and nothing dissipates.
FreeState free_rhs(const StepModel& m, const FreeState& y) {
    const double w = y[0];
    if (w <= 0.0) return {0.0, 0.0, 0.0, 0.0};
    const auto& l = m.losses;
    const double load = m.alternator.load_coeff;
    const double torque = l.coulomb_torque + l.viscous_coeff * w + l.aero_coeff * w * w + load * w;
    return {-torque / m.inertia, l.coulomb_torque * w + l.viscous_coeff * w * w, l.aero_coeff * w * w * w,
            load * w * w};
}

// Classical RK4 on the flywheel speed with the loss energies carried along.
std::pair<double, Dissipation> free_step(const StepModel& m, double omega0, double dt) {
    const FreeState y0{omega0, 0.0, 0.0, 0.0};
    auto axpy = [](const FreeState& y, const FreeState& k, double h) {
        FreeState out;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = y[i] + h * k[i];
        return out;
    };
    const auto k1 = free_rhs(m, y0);
    const auto k2 = free_rhs(m, axpy(y0, k1, 0.5 * dt));
    const auto k3 = free_rhs(m, axpy(y0, k2, 0.5 * dt));
    const auto k4 = free_rhs(m, axpy(y0, k3, dt));
    FreeState y1;
    for (std::size_t i = 0; i < y1.size(); ++i) {
        y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Dissipation d{y1[1], y1[2], y1[3]};
    const double omega1 = std::max(0.0, y1[0]);

    // The channels carry the integrator's split of the loss; their sum is
    // pinned to the kinetic energy actually given up so the ledger closes.
    const double released = 0.5 * m.inertia * (omega0 * omega0 - omega1 * omega1);
    const double total = d.total();
    if (total > 0.0) {
        const double f = released / total;
        d.friction *= f;
        d.aero *= f;
        d.alternator *= f;
    } else {
        d.friction = released;
    }
    return {omega1, d};
}

// Loss energies along a linear speed path from w0 to w1 over dt. Integrands
// are polynomials of degree <= 3 in time, so Simpson is exact.
Dissipation driven_losses(const StepModel& m, double w0, double w1, double dt) {
    const auto& l = m.losses;
    const double load = m.alternator.load_coeff;
    auto simpson = [dt](auto f, double a, double mid, double b) { return dt / 6.0 * (f(a) + 4.0 * f(mid) + f(b)); };
    const double wm = 0.5 * (w0 + w1);
    return {simpson([&](double w) { return l.coulomb_torque * w + l.viscous_coeff * w * w; }, w0, wm, w1),
            simpson([&](double w) { return l.aero_coeff * w * w * w; }, w0, wm, w1),
            simpson([&](double w) { return load * w * w; }, w0, wm, w1)};
}

void require_finite_state(const RbsState& s) {
    if (!std::isfinite(s.t) || !std::isfinite(s.omega_shaft) || !std::isfinite(s.omega_flywheel)) {
        throw NumericFault("non-finite drivetrain state at t=" + std::to_string(s.t));
    }
}

}  // namespace

RbsState initial_state(const StepModel& model, const electrical::UltracapBank& bank, double initial_omega) {
    if (!(initial_omega >= 0.0)) throw ConfigError("initial flywheel speed must be non-negative");
    RbsState s;
    s.t = model.profile.t_begin();
    s.omega_shaft = model.profile.omega(s.t);
    s.omega_flywheel = initial_omega;
    s.engaged = model.profile.armed(s.t) &&
                std::abs(model.gear.ratio * s.omega_shaft - initial_omega) <= model.eps_sync;
    s.bank = bank;
    s.phase = phase_of(s, {Phase::Idle, initial_omega, model.omega_stop});
    return s;
}

StepOutcome step(const RbsState& state, const StepModel& model, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be positive");
    require_finite_state(state);

    const double t1 = state.t + dt;
    const double shaft1 = model.profile.omega(t1);
    const double w0 = state.omega_flywheel;

    auto [w_free, loss] = free_step(model, w0, dt);
    const double slaved = model.gear.ratio * shaft1;
    const bool engaged = model.profile.armed(t1) && clutch_engaged(shaft1, w_free, model.gear, model.eps_sync);

    StepOutcome out{state, {}};
    RbsState& next = out.state;
    next.t = t1;
    next.omega_shaft = shaft1;
    next.engaged = engaged;

    double input = 0.0;
    double w1 = w_free;
    if (engaged && slaved > w_free) {
        w1 = slaved;
        loss = driven_losses(model, w0, w1, dt);
    }
    next.omega_flywheel = w1;
    const double d_ke = 0.5 * model.inertia * (w1 * w1 - w0 * w0);
    if (w1 != w_free) input = d_ke + loss.total();
    if (!std::isfinite(d_ke) || !std::isfinite(input) || !std::isfinite(loss.total())) {
        throw NumericFault("non-finite energy at t=" + std::to_string(t1));
    }

    const double generated = model.alternator.efficiency * loss.alternator;
    auto charge = electrical::charge_step(state.bank, generated / dt, dt, state.t);
    next.bank = charge.bank;
    out.events = std::move(charge.events);

    EnergyLedger delta;
    delta.input_work = input;
    delta.flywheel_ke_delta = d_ke;
    delta.loss_friction = loss.friction;
    delta.loss_aero = loss.aero;
    delta.loss_electrical = (loss.alternator - generated) + charge.rejected;
    delta.delivered_electrical = charge.accepted;
    next.ledger += delta;

    next.phase = phase_of(next, {state.phase, w0, model.omega_stop});
    require_finite_state(next);
    return out;
}

}  // namespace rbs::drivetrain
