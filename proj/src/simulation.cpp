#include "rbs/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace rbs::drivetrain {

std::optional<double> SimulationResult::free_spin_duration() const {
    if (!t_disengage || !t_stop) return std::nullopt;
    return *t_stop - *t_disengage;
}

double SimulationResult::recovered_energy() const {
    return 0.5 * inertia * (omega_peak * omega_peak - omega_initial * omega_initial);
}

double SimulationResult::dumped_energy() const {
    double sum = 0.0;
    for (const auto& e : events) sum += e.energy_dumped;
    return sum;
}

SimulationResult simulate(const Scenario& scenario) {
    scenario.validate();
    const StepModel model = scenario.step_model();
    const double dt = scenario.integrator.dt;
    const auto stride = static_cast<std::size_t>(scenario.integrator.output_stride);
    const double horizon = scenario.horizon();

    SimulationResult res;
    res.inertia = model.inertia;

    RbsState state = initial_state(model, scenario.bank, scenario.initial_flywheel_omega);
    const double t0 = state.t;
    res.omega_initial = state.omega_flywheel;
    res.omega_peak = state.omega_flywheel;
    res.t_peak = t0;
    if (state.phase == Phase::FreeSpin) res.t_disengage = t0;
    res.trajectory.push_back(state);
    res.phases.push_back({state.phase, t0, t0});

    const double profile_end = model.profile.t_end();

    // Profile breakpoints are hit exactly so a peak or arming instant never
    // falls inside a step. Knots within roundoff of a grid point are not split.
    std::vector<double> knots = model.profile.trace().times();
    knots.push_back(model.profile.arm_time());
    std::sort(knots.begin(), knots.end());
    const double snap = 1e-9 * dt;

    std::size_t k = 0;      // grid steps completed
    std::size_t steps = 0;  // including knot sub-steps
    while (state.t < horizon) {
        const double grid = std::min(horizon, t0 + static_cast<double>(k + 1) * dt);
        double target = grid;
        const auto knot = std::upper_bound(knots.begin(), knots.end(), state.t + snap);
        const bool on_knot = knot != knots.end() && *knot < grid - snap;
        if (on_knot) target = *knot;
        auto outcome = step(state, model, target - state.t);
        RbsState& next = outcome.state;
        ++steps;
        if (!on_knot) ++k;

        for (auto& e : outcome.events) res.events.push_back(e);
        if (next.omega_flywheel > res.omega_peak) {
            res.omega_peak = next.omega_flywheel;
            res.t_peak = next.t;
        }
        if (next.phase != state.phase) {
            res.phases.back().t_end = next.t;
            res.phases.push_back({next.phase, next.t, next.t});
            if (next.phase == Phase::FreeSpin) {
                res.t_disengage = state.t;
                res.t_stop.reset();
            }
            if (next.phase == Phase::Stopped && state.phase == Phase::FreeSpin) {
                const double w0 = state.omega_flywheel;
                const double w1 = next.omega_flywheel;
                const double frac = (w0 - model.omega_stop) / (w0 - w1);
                res.t_stop = state.t + frac * (next.t - state.t);
            }
        }

        const bool done = (next.phase == Phase::Stopped && next.t >= profile_end) ||
                          (next.phase == Phase::Idle && next.t >= profile_end && next.omega_shaft == 0.0);
        state = std::move(next);
        if (done || state.t >= horizon || (!on_knot && k % stride == 0)) {
            if (res.trajectory.back().t != state.t) res.trajectory.push_back(state);
        }
        if (done) break;
    }

    res.phases.back().t_end = state.t;
    res.ledger = state.ledger;
    res.ledger.validate();
    res.steps = steps;
    return res;
}

}  // namespace rbs::drivetrain
