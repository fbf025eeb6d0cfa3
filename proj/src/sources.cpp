#include "rbs/sources.hpp"

#include <cmath>
#include <string>

namespace rbs::sources {

void WindSite::validate() const {
    if (!(rho > 0.0)) throw InvalidInput("air density must be positive");
    if (!(area > 0.0)) throw InvalidInput("swept area must be positive");
    if (!(cut_in_velocity >= 0.0)) throw InvalidInput("cut-in velocity must be non-negative");
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("recovery efficiency must lie in (0, 1]");
}

double betz_coefficient(double v_ratio) {
    if (!(v_ratio >= 0.0 && v_ratio <= 1.0)) {
        throw DomainError("velocity ratio must lie in [0, 1], got " + std::to_string(v_ratio));
    }
    return (1.0 + v_ratio) * (1.0 - v_ratio * v_ratio) / 2.0;
}

double wind_power(const WindSite& site, double v, double c_b) {
    site.validate();
    if (v < 0.0) throw InvalidInput("wind speed must be non-negative");
    if (c_b < 0.0 || c_b > kBetzLimit) throw DomainError("Betz coefficient must lie in [0, 16/27]");
    return 0.5 * site.rho * site.area * v * v * v * c_b;
}

double cubed_segment_simpson(double v0, double v1, double h) {
    const double vm = 0.5 * (v0 + v1);
    return h / 6.0 * (v0 * v0 * v0 + 4.0 * vm * vm * vm + v1 * v1 * v1);
}

double cubed_segment_analytic(double v0, double v1, double h) {
    return h * (v0 + v1) * (v0 * v0 + v1 * v1) / 4.0;
}

namespace {

double segment(double v0, double v1, double h, SegmentRule rule) {
    return rule == SegmentRule::Simpson ? cubed_segment_simpson(v0, v1, h) : cubed_segment_analytic(v0, v1, h);
}

double gated_segment(double v0, double v1, double h, double cut, SegmentRule rule) {
    const bool in0 = v0 >= cut;
    const bool in1 = v1 >= cut;
    if (in0 && in1) return segment(v0, v1, h, rule);
    if (!in0 && !in1) return 0.0;
    // One end below cut-in: keep only the part above the crossing.
    const double frac = (cut - v0) / (v1 - v0);
    if (in1) return segment(cut, v1, h * (1.0 - frac), rule);
    return segment(v0, cut, h * frac, rule);
}

}  // namespace

double gated_cubed_integral(const WindTrace& trace, double a, double b, double cut_in, SegmentRule rule) {
    const auto sub = trace.slice(a, b);
    double sum = 0.0;
    const auto s = sub.samples();
    for (std::size_t i = 1; i < s.size(); ++i) {
        sum += gated_segment(s[i - 1].value, s[i].value, s[i].t - s[i - 1].t, cut_in, rule);
    }
    return sum;
}

double recoverable_wind_energy(const WindSite& site, const WindTrace& trace, double a, double b, double c_b,
                               SegmentRule rule) {
    site.validate();
    if (c_b < 0.0 || c_b > kBetzLimit) throw DomainError("Betz coefficient must lie in [0, 16/27]");
    return 0.5 * site.eta * c_b * site.rho * site.area *
           gated_cubed_integral(trace, a, b, site.cut_in_velocity, rule);
}

// ---------------------------------------------------------------------------

void VehicleSpec::validate() const {
    if (!(mass > 0.0)) throw InvalidInput("vehicle mass must be positive");
    if (!(g >= 0.0 && drag_area >= 0.0 && air_density >= 0.0 && rolling_coeff >= 0.0)) {
        throw InvalidInput("vehicle coefficients must be non-negative");
    }
}

DriveCycle::DriveCycle(std::vector<CycleSample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) throw InvalidInput("drive cycle needs at least 2 samples");
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.v) || !std::isfinite(s.elevation)) {
            throw InvalidInput("non-finite drive cycle sample at index " + std::to_string(i));
        }
        if (s.v < 0.0) throw InvalidInput("negative vehicle speed at index " + std::to_string(i));
        if (i > 0 && !(s.t > samples_[i - 1].t)) {
            throw InvalidInput("drive cycle times must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

double vehicle_kinetic_energy(const VehicleSpec& spec, double v) {
    if (v < 0.0) throw InvalidInput("vehicle speed must be non-negative");
    return 0.5 * spec.mass * v * v;
}

double vehicle_potential_delta(const VehicleSpec& spec, double delta_y) {
    return spec.mass * spec.g * delta_y;
}

double aero_power(const VehicleSpec& spec, double v) {
    return 0.5 * spec.air_density * spec.drag_area * v * v * v;
}

double tire_power(const VehicleSpec& spec, double v) {
    return spec.rolling_coeff * spec.mass * spec.g * v;
}

namespace {

// Panels per cycle segment when splitting braking and traction power. The
// braking power is at most cubic on a segment so Simpson is exact per panel;
// panels only localize sign changes.
constexpr int kPanels = 16;

struct PanelSplit {
    double positive = 0.0;
    double negative = 0.0;
};

template <class F>
double simpson(const F& f, double a, double b) {
    return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b));
}

template <class F>
void split_panel(const F& f, double a, double b, PanelSplit& acc) {
    const double fa = f(a);
    const double fb = f(b);
    auto book = [&](double lo, double hi) {
        const double v = simpson(f, lo, hi);
        if (v >= 0.0) acc.positive += v; else acc.negative -= v;
    };
    if ((fa > 0.0 && fb < 0.0) || (fa < 0.0 && fb > 0.0)) {
        double lo = a, hi = b;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
            const double mid = 0.5 * (lo + hi);
            if ((f(mid) > 0.0) == (fa > 0.0)) lo = mid; else hi = mid;
        }
        const double root = 0.5 * (lo + hi);
        book(a, root);
        book(root, b);
    } else {
        book(a, b);
    }
}

}  // namespace

VehicleRegen regen_energy_over_cycle(const VehicleSpec& spec, const DriveCycle& cycle, double eta) {
    spec.validate();
    if (!(eta > 0.0 && eta <= 1.0)) throw InvalidInput("recovery efficiency must lie in (0, 1]");

    VehicleRegen out;
    PanelSplit split;
    const auto s = cycle.samples();
    for (std::size_t i = 1; i < s.size(); ++i) {
        const auto& p = s[i - 1];
        const auto& q = s[i];
        const double h = q.t - p.t;
        const double accel = (q.v - p.v) / h;
        const double climb = (q.elevation - p.elevation) / h;
        auto speed = [&](double tau) { return p.v + accel * tau; };
        auto braking_power = [&](double tau) {
            const double v = speed(tau);
            return -spec.mass * v * accel - spec.mass * spec.g * climb - aero_power(spec, v) -
                   tire_power(spec, v);
        };
        for (int k = 0; k < kPanels; ++k) {
            const double a = h * k / kPanels;
            const double b = h * (k + 1) / kPanels;
            split_panel(braking_power, a, b, split);
            out.aero_loss += simpson([&](double tau) { return aero_power(spec, speed(tau)); }, a, b);
            out.tire_loss += simpson([&](double tau) { return tire_power(spec, speed(tau)); }, a, b);
        }
    }

    out.gross_ke_delta = vehicle_kinetic_energy(spec, s.back().v) - vehicle_kinetic_energy(spec, s.front().v);
    out.gross_pe_delta = spec.mass * spec.g * (s.back().elevation - s.front().elevation);
    out.braking_energy = split.positive;
    out.traction_work = split.negative;
    out.net_recoverable = eta * split.positive;

    out.ledger.input_work = -out.gross_ke_delta - out.gross_pe_delta + out.traction_work;
    out.ledger.loss_aero = out.aero_loss;
    out.ledger.loss_friction = out.tire_loss;
    out.ledger.loss_electrical = (1.0 - eta) * split.positive;
    out.ledger.delivered_electrical = out.net_recoverable;
    out.ledger.validate();
    return out;
}

}  // namespace rbs::sources
