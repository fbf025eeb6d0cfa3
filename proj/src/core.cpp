#include "rbs/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <type_traits>

namespace rbs {

template <class Tag>
NonNegativeSeries<Tag>::NonNegativeSeries(std::vector<Sample> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 2) {
        throw InvalidInput("trace needs at least 2 samples, got " + std::to_string(samples_.size()));
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const auto& s = samples_[i];
        if (!std::isfinite(s.t) || !std::isfinite(s.value)) {
            throw InvalidInput("non-finite sample at index " + std::to_string(i));
        }
        if (s.value < 0.0) {
            throw InvalidInput("negative sample value at index " + std::to_string(i));
        }
        if (i > 0 && !(s.t > samples_[i - 1].t)) {
            throw InvalidInput("sample times must be strictly increasing (index " + std::to_string(i) + ")");
        }
    }
}

template <class Tag>
std::vector<double> NonNegativeSeries<Tag>::times() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.t);
    return out;
}

template <class Tag>
std::vector<double> NonNegativeSeries<Tag>::values() const {
    std::vector<double> out;
    out.reserve(samples_.size());
    for (const auto& s : samples_) out.push_back(s.value);
    return out;
}

template <class Tag>
double NonNegativeSeries<Tag>::value_at(double t) const {
    if (t <= samples_.front().t) return samples_.front().value;
    if (t >= samples_.back().t) return samples_.back().value;
    auto hi = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double x, const Sample& s) { return x < s.t; });
    auto lo = hi - 1;
    const double w = (t - lo->t) / (hi->t - lo->t);
    return lo->value + w * (hi->value - lo->value);
}

template <class Tag>
NonNegativeSeries<Tag> NonNegativeSeries<Tag>::slice(double a, double b) const {
    if (!(a < b) || a < t_begin() || b > t_end()) {
        throw RangeError("interval [" + std::to_string(a) + ", " + std::to_string(b) +
                         "] is outside trace span [" + std::to_string(t_begin()) + ", " +
                         std::to_string(t_end()) + "]");
    }
    std::vector<Sample> out;
    out.push_back({a, value_at(a)});
    for (const auto& s : samples_) {
        if (s.t > a && s.t < b) out.push_back(s);
    }
    out.push_back({b, value_at(b)});
    return NonNegativeSeries(std::move(out));
}

template <class Tag>
double NonNegativeSeries<Tag>::max_value() const {
    double m = samples_.front().value;
    for (const auto& s : samples_) m = std::max(m, s.value);
    return m;
}

template class NonNegativeSeries<SpeedTag>;
template class NonNegativeSeries<WindTag>;

// ---------------------------------------------------------------------------

double AnnularRim::mass() const {
    return density * kPi * (r_outer * r_outer - r_inner * r_inner) * thickness;
}

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw InvalidSpec(std::string("flywheel ") + name + " must be positive and finite");
    }
}

}  // namespace

void FlywheelSpec::validate() const {
    std::visit(
        [](const auto& g) {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, UniformDisk>) {
                require_positive(g.mass, "mass");
                require_positive(g.radius, "radius");
            } else if constexpr (std::is_same_v<G, AnnularRim>) {
                require_positive(g.density, "density");
                require_positive(g.r_outer, "r_outer");
                if (!(g.r_inner >= 0.0)) throw InvalidSpec("flywheel r_inner must be non-negative");
                require_positive(g.thickness, "thickness");
                if (!(g.r_inner < g.r_outer)) throw InvalidSpec("flywheel r_inner must be below r_outer");
            } else {
                require_positive(g.inertia, "inertia");
            }
        },
        geometry);
}

double inertia(const FlywheelSpec& spec) {
    spec.validate();
    return std::visit(
        [](const auto& g) -> double {
            using G = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<G, UniformDisk>) {
                return 0.5 * g.mass * g.radius * g.radius;
            } else if constexpr (std::is_same_v<G, AnnularRim>) {
                return 0.5 * g.mass() * (g.r_outer * g.r_outer + g.r_inner * g.r_inner);
            } else {
                return g.inertia;
            }
        },
        spec.geometry);
}

double kinetic_energy(double inertia_kg_m2, double omega) {
    if (!(inertia_kg_m2 > 0.0)) throw InvalidInput("inertia must be positive");
    if (omega < 0.0) throw InvalidInput("angular velocity must be non-negative");
    return 0.5 * inertia_kg_m2 * omega * omega;
}

double required_torque(double inertia_kg_m2, double alpha) {
    if (!(inertia_kg_m2 > 0.0)) throw InvalidInput("inertia must be positive");
    return inertia_kg_m2 * alpha;
}

// ---------------------------------------------------------------------------

double EnergyLedger::residual() const {
    return std::abs(input_work - (flywheel_ke_delta + total_losses() + delivered_electrical));
}

double EnergyLedger::relative_residual() const {
    return residual() / std::max(1.0, std::abs(input_work));
}

void EnergyLedger::validate() const {
    for (double v : {input_work, flywheel_ke_delta, loss_friction, loss_aero, loss_electrical,
                     delivered_electrical}) {
        if (!std::isfinite(v)) throw NumericFault("energy ledger holds a non-finite value");
    }
    if (loss_friction < 0.0 || loss_aero < 0.0 || loss_electrical < 0.0) {
        throw InvalidInput("energy ledger losses must be non-negative");
    }
}

EnergyLedger& EnergyLedger::operator+=(const EnergyLedger& o) {
    input_work += o.input_work;
    flywheel_ke_delta += o.flywheel_ke_delta;
    loss_friction += o.loss_friction;
    loss_aero += o.loss_aero;
    loss_electrical += o.loss_electrical;
    delivered_electrical += o.delivered_electrical;
    return *this;
}

}  // namespace rbs
