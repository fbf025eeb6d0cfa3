#pragma once

// Regenerative-energy sources: wind (swept-rotor power with the Betz
// coefficient) and road vehicles (kinetic/potential energy balance).

#include <span>
#include <vector>

#include "rbs/core.hpp"

namespace rbs::sources {

// Upper bound of the Betz coefficient, 16/27.
inline constexpr double kBetzLimit = 16.0 / 27.0;

struct WindSite {
    double rho = 1.225;             // kg/m^3
    double area = 1.0;              // m^2, rotor swept area
    double cut_in_velocity = 0.0;   // m/s
    double eta = 0.9;               // recovery efficiency in (0, 1]

    // Throws InvalidInput when an invariant fails.
    void validate() const;
};

// c_b = (1 + r)(1 - r^2) / 2 with r = V_out / V_in. Throws DomainError
// outside [0, 1].
double betz_coefficient(double v_ratio);

// 1/2 rho A v^3 c_b in watts.
double wind_power(const WindSite& site, double v, double c_b);

enum class SegmentRule { Simpson, Analytic };

// Exact integral of v(t)^3 over one linear segment of width h.
double cubed_segment_simpson(double v0, double v1, double h);
double cubed_segment_analytic(double v0, double v1, double h);

// Integral of v(t)^3 over [a, b] for the piecewise-linear interpolant of the
// trace, counting only the portions where v >= cut_in. Segments are split at
// the cut-in crossing so gating is exact. Throws RangeError when [a, b] is
// not inside the trace span.
double gated_cubed_integral(const WindTrace& trace, double a, double b, double cut_in,
                            SegmentRule rule = SegmentRule::Simpson);

// Recoverable energy in joules: 1/2 eta c_b rho A int v^3 dt over [a, b].
double recoverable_wind_energy(const WindSite& site, const WindTrace& trace, double a, double b,
                               double c_b, SegmentRule rule = SegmentRule::Simpson);

// ---------------------------------------------------------------------------
// Vehicles

struct VehicleSpec {
    double mass = 1000.0;        // kg including payload
    double g = 9.81;             // m/s^2
    double drag_area = 0.0;      // C_d A_f, m^2
    double air_density = 1.225;  // kg/m^3
    double rolling_coeff = 0.0;

    void validate() const;
};

struct CycleSample {
    double t;          // s
    double v;          // m/s
    double elevation;  // m
};

class DriveCycle {
public:
    // Throws InvalidInput for fewer than 2 samples, non-increasing time,
    // negative or non-finite speed.
    explicit DriveCycle(std::vector<CycleSample> samples);

    std::span<const CycleSample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }

private:
    std::vector<CycleSample> samples_;
};

// 1/2 M v^2
double vehicle_kinetic_energy(const VehicleSpec& spec, double v);

// M g dy, with dy > 0 for a downhill drop (energy released).
double vehicle_potential_delta(const VehicleSpec& spec, double delta_y);

// Aerodynamic and rolling resistance power at speed v.
double aero_power(const VehicleSpec& spec, double v);
double tire_power(const VehicleSpec& spec, double v);

// Energy balance of a drive cycle. Braking power is what remains of the
// kinetic and potential energy release after aero and tire losses:
//   f(t) = -d/dt[KE + PE] - P_aero - P_tire
// where f > 0 must be absorbed by the brakes (recoverable at eta) and f < 0
// must be supplied as traction.
//
// The ledger maps onto EnergyLedger as
//   input_work           = -dKE - dPE + traction
//   loss_aero            = aerodynamic dissipation
//   loss_friction        = tire dissipation
//   loss_electrical      = (1 - eta) * braking
//   delivered_electrical = eta * braking (net recoverable)
//   flywheel_ke_delta    = 0
struct VehicleRegen {
    EnergyLedger ledger;
    double gross_ke_delta = 0.0;  // KE_end - KE_start
    double gross_pe_delta = 0.0;  // M g (elev_end - elev_start)
    double aero_loss = 0.0;
    double tire_loss = 0.0;
    double braking_energy = 0.0;  // integral of max(0, f)
    double traction_work = 0.0;   // integral of max(0, -f)
    double net_recoverable = 0.0;
};

VehicleRegen regen_energy_over_cycle(const VehicleSpec& spec, const DriveCycle& cycle, double eta);

}  // namespace rbs::sources
