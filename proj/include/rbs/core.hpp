#pragma once

// Shared quantities for the flywheel RBS toolkit: unit conversion, sampled
// time series, flywheel geometry and the energy ledger.
//
// Everything is SI internally. rpm and inches only show up at I/O boundaries.

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "rbs/errors.hpp"

namespace rbs {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double rpm_to_rad_s(double rpm) { return rpm * 2.0 * kPi / 60.0; }
constexpr double rad_s_to_rpm(double rad_s) { return rad_s * 60.0 / (2.0 * kPi); }
constexpr double inches_to_m(double inches) { return inches * 0.0254; }

struct Sample {
    double t;
    double value;

    bool operator==(const Sample&) const = default;
};

// Ordered (t, value) samples with t strictly increasing and value >= 0.
// Tag only distinguishes angular-velocity traces from wind-speed traces.
template <class Tag>
class NonNegativeSeries {
public:
    explicit NonNegativeSeries(std::vector<Sample> samples);

    std::span<const Sample> samples() const { return samples_; }
    std::size_t size() const { return samples_.size(); }
    const Sample& operator[](std::size_t i) const { return samples_[i]; }
    const Sample& front() const { return samples_.front(); }
    const Sample& back() const { return samples_.back(); }

    double t_begin() const { return samples_.front().t; }
    double t_end() const { return samples_.back().t; }
    double duration() const { return t_end() - t_begin(); }

    std::vector<double> times() const;
    std::vector<double> values() const;

    // Piecewise-linear interpolation; holds the end values outside the span.
    double value_at(double t) const;

    // Sub-series on [a, b] with interpolated end points. Requires
    // t_begin() <= a < b <= t_end(); throws RangeError otherwise.
    NonNegativeSeries slice(double a, double b) const;

    double max_value() const;

    bool operator==(const NonNegativeSeries&) const = default;

private:
    std::vector<Sample> samples_;
};

struct SpeedTag {};
struct WindTag {};

// Angular velocity in rad/s versus time in seconds.
using SpeedTrace = NonNegativeSeries<SpeedTag>;
// Wind speed in m/s versus time in seconds.
using WindTrace = NonNegativeSeries<WindTag>;

extern template class NonNegativeSeries<SpeedTag>;
extern template class NonNegativeSeries<WindTag>;

// ---------------------------------------------------------------------------
// Flywheel geometry

struct UniformDisk {
    double mass;    // kg
    double radius;  // m
    bool operator==(const UniformDisk&) const = default;
};

// Thick rim / annulus of uniform density.
struct AnnularRim {
    double density;    // kg/m^3
    double r_outer;    // m
    double r_inner;    // m
    double thickness;  // m

    double mass() const;
    bool operator==(const AnnularRim&) const = default;
};

struct DirectInertia {
    double inertia;  // kg m^2
    bool operator==(const DirectInertia&) const = default;
};

struct FlywheelSpec {
    std::variant<UniformDisk, AnnularRim, DirectInertia> geometry;

    // Throws InvalidSpec when a dimension is non-positive or r_inner >= r_outer.
    void validate() const;
    bool operator==(const FlywheelSpec&) const = default;
};

// Mass moment of inertia about the spin axis.
//   UniformDisk   1/2 M R^2
//   AnnularRim    1/2 M (r_o^2 + r_i^2), M = rho pi (r_o^2 - r_i^2) h
//   DirectInertia I
double inertia(const FlywheelSpec& spec);

// 1/2 I w^2. Throws InvalidInput for I <= 0 or negative omega.
double kinetic_energy(double inertia_kg_m2, double omega);

// T = I alpha; the sign follows alpha.
double required_torque(double inertia_kg_m2, double alpha);

// ---------------------------------------------------------------------------
// Energy ledger
//
// input_work = flywheel_ke_delta + loss_friction + loss_aero + loss_electrical
//              + delivered_electrical
struct EnergyLedger {
    double input_work = 0.0;
    double flywheel_ke_delta = 0.0;
    double loss_friction = 0.0;
    double loss_aero = 0.0;
    double loss_electrical = 0.0;
    double delivered_electrical = 0.0;

    double total_losses() const { return loss_friction + loss_aero + loss_electrical; }

    // |input - (dKE + losses + delivered)|
    double residual() const;

    // residual / max(1, |input|)
    double relative_residual() const;

    // Throws NumericFault if any field is non-finite, InvalidInput if a loss
    // is negative.
    void validate() const;

    EnergyLedger& operator+=(const EnergyLedger& other);
    bool operator==(const EnergyLedger&) const = default;
};

}  // namespace rbs
