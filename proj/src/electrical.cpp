#include "rbs/electrical.hpp"

#include <algorithm>
#include <cmath>

namespace rbs::electrical {

void Alternator::validate() const {
    if (!(efficiency > 0.0 && efficiency <= 1.0)) throw ConfigError("alternator efficiency must lie in (0, 1]");
    if (!(load_coeff >= 0.0) || !std::isfinite(load_coeff)) {
        throw ConfigError("alternator load coefficient must be non-negative");
    }
}

AlternatorOutput alternator_step(const Alternator& alt, double omega, double dt) {
    alt.validate();
    if (omega < 0.0) throw InvalidInput("alternator speed must be non-negative");
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
    const double torque = alt.load_coeff * omega;
    const double shaft_work = torque * omega * dt;
    return {alt.efficiency * shaft_work, torque, (1.0 - alt.efficiency) * shaft_work};
}

std::string_view to_string(Destination d) {
    return d == Destination::Battery ? "battery" : "grid";
}

void UltracapBank::validate() const {
    if (!(capacitance > 0.0) || !std::isfinite(capacitance)) throw ConfigError("bank capacitance must be positive");
    if (!(v_max > 0.0)) throw ConfigError("bank v_max must be positive");
    if (v_dump > v_max) throw ConfigError("bank v_dump must not exceed v_max");
    if (!(v_reset >= 0.0 && v_reset < v_dump)) throw ConfigError("bank v_reset must lie in [0, v_dump)");
    if (!(voltage >= 0.0 && voltage <= v_dump)) throw ConfigError("bank voltage must lie in [0, v_dump]");
    if (!(trickle_min >= 0.0)) throw ConfigError("bank trickle_min must be non-negative");
}

ChargeResult charge_step(const UltracapBank& bank, double p_in, double dt, double t_start) {
    bank.validate();
    if (!(p_in >= 0.0) || !std::isfinite(p_in)) throw InvalidInput("charge power must be non-negative");
    if (!(dt > 0.0)) throw InvalidInput("dt must be positive");

    ChargeResult out{bank, {}, 0.0, 0.0};
    const double incoming = p_in * dt;
    if (incoming == 0.0) return out;
    if (p_in < bank.trickle_min) {
        out.rejected = incoming;
        return out;
    }
    out.accepted = incoming;

    const double e_dump = bank.energy_at(bank.v_dump);
    const double e_reset = bank.energy_at(bank.v_reset);
    double stored = bank.energy();
    double remaining = incoming;
    double elapsed = 0.0;
    while (stored + remaining >= e_dump) {
        const double fill = e_dump - stored;
        elapsed += fill / p_in;
        out.events.push_back({t_start + elapsed, e_dump - e_reset, bank.destination});
        remaining -= fill;
        stored = e_reset;
    }
    stored += remaining;
    out.bank.voltage = std::min(bank.v_max, std::sqrt(2.0 * stored / bank.capacitance));
    return out;
}

}  // namespace rbs::electrical
