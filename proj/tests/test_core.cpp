#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <limits>

#include "rbs/core.hpp"
#include "support.hpp"

using namespace rbs;

TEST_CASE("unit conversions") {
    CHECK(rpm_to_rad_s(60.0) == doctest::Approx(2.0 * kPi));
    CHECK(rad_s_to_rpm(rpm_to_rad_s(500.0)) == doctest::Approx(500.0));
    CHECK(inches_to_m(11.5) == doctest::Approx(0.2921));
}

TEST_CASE("uniform disk inertia") {
    CHECK(inertia(FlywheelSpec{UniformDisk{2.0, 0.2}}) == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(inertia(FlywheelSpec{DirectInertia{0.7}}) == 0.7);
}

TEST_CASE("annular rim inertia of the prototype geometry") {
    const AnnularRim rim{2700.0, 0.14605, 0.10, 0.01905};
    CHECK(rim.mass() == doctest::Approx(1.8308873361570686).epsilon(1e-14));
    CHECK(inertia(FlywheelSpec{rim}) == doctest::Approx(0.0286814016757105).epsilon(1e-14));
}

TEST_CASE("a solid rim equals a disk of the same mass") {
    const AnnularRim rim{7850.0, 0.3, 0.0, 0.05};
    const double m = rim.mass();
    CHECK(inertia(FlywheelSpec{rim}) == doctest::Approx(inertia(FlywheelSpec{UniformDisk{m, 0.3}})));
}

TEST_CASE("invalid flywheel geometry is rejected") {
    CHECK_THROWS_AS((FlywheelSpec{UniformDisk{-1.0, 0.2}}.validate()), InvalidSpec);
    CHECK_THROWS_AS((FlywheelSpec{UniformDisk{1.0, 0.0}}.validate()), InvalidSpec);
    CHECK_THROWS_AS((FlywheelSpec{AnnularRim{2700.0, 0.1, 0.1, 0.02}}.validate()), InvalidSpec);
    CHECK_THROWS_AS((FlywheelSpec{AnnularRim{2700.0, 0.1, 0.2, 0.02}}.validate()), InvalidSpec);
    CHECK_THROWS_AS((FlywheelSpec{DirectInertia{0.0}}.validate()), InvalidSpec);
    CHECK_THROWS_AS((inertia(FlywheelSpec{DirectInertia{-2.0}})), InvalidSpec);
}

TEST_CASE("kinetic energy and torque") {
    CHECK(kinetic_energy(0.04, 100.0) == doctest::Approx(200.0));
    CHECK(kinetic_energy(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(kinetic_energy(1.0, -1.0), InvalidInput);
    CHECK_THROWS_AS(kinetic_energy(0.0, 1.0), InvalidInput);
    CHECK(required_torque(0.5, 8.0) == doctest::Approx(4.0));
}

TEST_CASE("kinetic energy scales with the square of speed") {
    test::Gen gen;
    for (int i = 0; i < 200; ++i) {
        const double I = gen.uniform(1e-3, 10.0);
        const double w = gen.uniform(0.0, 1000.0);
        const double k = gen.uniform(0.1, 10.0);
        CHECK(kinetic_energy(I, k * w) == doctest::Approx(k * k * kinetic_energy(I, w)).epsilon(1e-12));
    }
}

TEST_CASE("speed trace construction") {
    CHECK_THROWS_AS(SpeedTrace({{0.0, 1.0}}), InvalidInput);
    CHECK_THROWS_AS(SpeedTrace({{0.0, 1.0}, {0.0, 2.0}}), InvalidInput);
    CHECK_THROWS_AS(SpeedTrace({{1.0, 1.0}, {0.5, 2.0}}), InvalidInput);
    CHECK_THROWS_AS(SpeedTrace({{0.0, 1.0}, {1.0, -2.0}}), InvalidInput);
    CHECK_THROWS_AS(SpeedTrace({{0.0, std::numeric_limits<double>::quiet_NaN()}, {1.0, 2.0}}), InvalidInput);

    const SpeedTrace tr({{0.0, 0.0}, {2.0, 4.0}, {4.0, 0.0}});
    CHECK(tr.size() == 3);
    CHECK(tr.duration() == 4.0);
    CHECK(tr.value_at(1.0) == doctest::Approx(2.0));
    CHECK(tr.value_at(3.5) == doctest::Approx(1.0));
    CHECK(tr.value_at(-1.0) == 0.0);
    CHECK(tr.value_at(9.0) == 0.0);
    CHECK(tr.max_value() == 4.0);
}

TEST_CASE("slicing interpolates the end points") {
    const SpeedTrace tr({{0.0, 0.0}, {2.0, 4.0}, {4.0, 0.0}});
    const auto s = tr.slice(1.0, 3.0);
    REQUIRE(s.size() == 3);
    CHECK(s.front().value == doctest::Approx(2.0));
    CHECK(s[1].t == 2.0);
    CHECK(s.back().value == doctest::Approx(2.0));
    CHECK_THROWS_AS(tr.slice(-1.0, 1.0), RangeError);
    CHECK_THROWS_AS(tr.slice(3.0, 5.0), RangeError);
    CHECK_THROWS_AS(tr.slice(2.0, 2.0), RangeError);
}

TEST_CASE("energy ledger bookkeeping") {
    EnergyLedger l;
    l.input_work = 100.0;
    l.flywheel_ke_delta = 60.0;
    l.loss_friction = 10.0;
    l.loss_aero = 5.0;
    l.loss_electrical = 5.0;
    l.delivered_electrical = 20.0;
    CHECK(l.total_losses() == 20.0);
    CHECK(l.residual() == doctest::Approx(0.0));
    CHECK_NOTHROW(l.validate());

    EnergyLedger sum = l;
    sum += l;
    CHECK(sum.input_work == 200.0);
    CHECK(sum.residual() == doctest::Approx(0.0));

    l.delivered_electrical = 10.0;
    CHECK(l.residual() == doctest::Approx(10.0));
    CHECK(l.relative_residual() == doctest::Approx(0.1));

    EnergyLedger small;
    small.input_work = 0.5;
    CHECK(small.relative_residual() == doctest::Approx(0.5));

    EnergyLedger bad;
    bad.loss_aero = -1.0;
    CHECK_THROWS_AS(bad.validate(), InvalidInput);
    bad.loss_aero = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(bad.validate(), NumericFault);
}
