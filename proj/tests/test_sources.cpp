#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rbs/csv.hpp"
#include "rbs/sources.hpp"
#include "support.hpp"

using namespace rbs;
using namespace rbs::sources;

TEST_CASE("Betz coefficient values") {
    CHECK(betz_coefficient(0.0) == doctest::Approx(0.5));
    CHECK(betz_coefficient(1.0) == 0.0);
    CHECK(betz_coefficient(1.0 / 3.0) == doctest::Approx(16.0 / 27.0).epsilon(1e-15));
    CHECK_THROWS_AS(betz_coefficient(-0.01), DomainError);
    CHECK_THROWS_AS(betz_coefficient(1.01), DomainError);
}

TEST_CASE("Betz coefficient never exceeds its limit") {
    test::Gen gen;
    for (int i = 0; i < 1000; ++i) {
        CHECK(betz_coefficient(gen.uniform(0.0, 1.0)) <= kBetzLimit + 1e-15);
    }
}

TEST_CASE("wind power") {
    WindSite site;
    site.area = 10.0;
    CHECK(wind_power(site, 5.0, 0.5) == doctest::Approx(0.5 * 1.225 * 10.0 * 125.0 * 0.5));
    CHECK_THROWS_AS(wind_power(site, 5.0, 0.7), DomainError);
    CHECK_THROWS_AS(wind_power(site, -1.0, 0.5), InvalidInput);
}

TEST_CASE("constant wind matches the closed form") {
    WindSite site;
    site.area = 10.0;
    site.eta = 0.9;
    const auto trace = csv::read_wind_trace(test::fixture("wind_constant.csv"));
    const double e = recoverable_wind_energy(site, trace, 0.0, 10.0, 0.5);
    CHECK(test::rel_err(e, 3445.3125) < 1e-12);
    const double half = recoverable_wind_energy(site, trace, 2.5, 7.5, 0.5);
    CHECK(test::rel_err(half, 3445.3125 / 2.0) < 1e-12);
}

TEST_CASE("segment rules agree on linear wind") {
    test::Gen gen;
    for (int i = 0; i < 200; ++i) {
        const double v0 = gen.uniform(0.0, 25.0);
        const double v1 = gen.uniform(0.0, 25.0);
        const double h = gen.uniform(0.01, 10.0);
        const double exact = h * (v0 + v1) * (v0 * v0 + v1 * v1) / 4.0;
        CHECK(cubed_segment_simpson(v0, v1, h) == doctest::Approx(exact).epsilon(1e-12));
        CHECK(cubed_segment_analytic(v0, v1, h) == doctest::Approx(exact).epsilon(1e-12));
    }
}

TEST_CASE("cut-in gating splits segments at the crossing") {
    const WindTrace ramp({{0.0, 0.0}, {10.0, 10.0}});
    // v = t, integrate t^3 over [5, 10]
    const double exact = (std::pow(10.0, 4) - std::pow(5.0, 4)) / 4.0;
    CHECK(gated_cubed_integral(ramp, 0.0, 10.0, 5.0, SegmentRule::Simpson) == doctest::Approx(exact).epsilon(1e-12));
    CHECK(gated_cubed_integral(ramp, 0.0, 10.0, 5.0, SegmentRule::Analytic) == doctest::Approx(exact).epsilon(1e-12));

    const WindTrace down({{0.0, 10.0}, {10.0, 0.0}});
    CHECK(gated_cubed_integral(down, 0.0, 10.0, 5.0, SegmentRule::Simpson) == doctest::Approx(exact).epsilon(1e-12));

    const WindTrace calm({{0.0, 2.0}, {5.0, 3.0}});
    CHECK(gated_cubed_integral(calm, 0.0, 5.0, 4.0, SegmentRule::Simpson) == 0.0);
}

TEST_CASE("gated energy is monotone in the cut-in speed") {
    test::Gen gen(11);
    for (int i = 0; i < 30; ++i) {
        std::vector<Sample> s;
        double t = 0.0;
        for (int k = 0; k < 40; ++k) {
            s.push_back({t, gen.uniform(0.0, 20.0)});
            t += gen.uniform(0.1, 2.0);
        }
        const WindTrace tr(s);
        double prev = gated_cubed_integral(tr, tr.t_begin(), tr.t_end(), 0.0, SegmentRule::Analytic);
        for (double cut = 2.0; cut <= 20.0; cut += 2.0) {
            const double e = gated_cubed_integral(tr, tr.t_begin(), tr.t_end(), cut, SegmentRule::Analytic);
            CHECK(e <= prev + 1e-9 * prev);
            prev = e;
        }
    }
}

TEST_CASE("wind interval checks") {
    WindSite site;
    const WindTrace tr({{0.0, 5.0}, {10.0, 5.0}});
    CHECK_THROWS_AS(recoverable_wind_energy(site, tr, -1.0, 5.0, 0.5), RangeError);
    CHECK_THROWS_AS(recoverable_wind_energy(site, tr, 2.0, 11.0, 0.5), RangeError);
    site.eta = 0.0;
    CHECK_THROWS_AS(recoverable_wind_energy(site, tr, 0.0, 5.0, 0.5), InvalidInput);
}

TEST_CASE("vehicle energy terms") {
    VehicleSpec v;
    CHECK(vehicle_kinetic_energy(v, 20.0) == doctest::Approx(200000.0));
    CHECK(vehicle_potential_delta(v, 2.0) == doctest::Approx(1000.0 * 9.81 * 2.0));
    v.drag_area = 0.6;
    v.rolling_coeff = 0.01;
    CHECK(aero_power(v, 10.0) == doctest::Approx(0.5 * 1.225 * 0.6 * 1000.0));
    CHECK(tire_power(v, 10.0) == doctest::Approx(0.01 * 1000.0 * 9.81 * 10.0));
}

TEST_CASE("lossless flat stop recovers the full kinetic energy") {
    const auto cycle = csv::read_drive_cycle(test::fixture("cycle_stop.csv"));
    const auto r = regen_energy_over_cycle(VehicleSpec{}, cycle, 1.0);
    CHECK(r.braking_energy == doctest::Approx(200000.0).epsilon(1e-14));
    CHECK(r.net_recoverable == doctest::Approx(200000.0).epsilon(1e-14));
    CHECK(r.traction_work == 0.0);
    CHECK(std::abs(r.ledger.residual()) < 1e-9);
}

TEST_CASE("road losses reduce recoverable energy") {
    const auto cycle = csv::read_drive_cycle(test::fixture("cycle_stop.csv"));
    VehicleSpec v;
    v.drag_area = 0.7;
    v.rolling_coeff = 0.012;
    const auto r = regen_energy_over_cycle(v, cycle, 0.8);
    CHECK(r.braking_energy < 200000.0);
    CHECK(r.aero_loss > 0.0);
    CHECK(r.tire_loss > 0.0);
    CHECK(r.net_recoverable == doctest::Approx(0.8 * r.braking_energy));
    const double decomposition = r.braking_energy - r.traction_work + r.aero_loss + r.tire_loss;
    CHECK(std::abs(decomposition + r.gross_ke_delta) <= 1e-9 * 200000.0);
}

TEST_CASE("downhill at constant speed recovers potential energy") {
    const DriveCycle cycle({{0.0, 10.0, 50.0}, {10.0, 10.0, 40.0}});
    const auto r = regen_energy_over_cycle(VehicleSpec{}, cycle, 1.0);
    CHECK(r.braking_energy == doctest::Approx(1000.0 * 9.81 * 10.0));
    CHECK(r.gross_ke_delta == 0.0);
}

TEST_CASE("drive cycle ledger closes on random cycles") {
    test::Gen gen(5);
    for (int i = 0; i < 50; ++i) {
        std::vector<CycleSample> s;
        double t = 0.0;
        double y = 0.0;
        for (int k = 0; k < 30; ++k) {
            s.push_back({t, gen.uniform(0.0, 30.0), y});
            t += gen.uniform(0.5, 5.0);
            y += gen.uniform(-3.0, 3.0);
        }
        VehicleSpec v;
        v.mass = gen.uniform(500.0, 3000.0);
        v.drag_area = gen.uniform(0.0, 1.0);
        v.rolling_coeff = gen.uniform(0.0, 0.02);
        const auto r = regen_energy_over_cycle(v, DriveCycle(s), gen.uniform(0.1, 1.0));
        CHECK(r.ledger.relative_residual() < 1e-9);
        CHECK(r.braking_energy >= 0.0);
        CHECK(r.traction_work >= 0.0);
    }
}

TEST_CASE("drive cycle validation") {
    CHECK_THROWS_AS(DriveCycle({{0.0, 1.0, 0.0}}), InvalidInput);
    CHECK_THROWS_AS(DriveCycle({{0.0, 1.0, 0.0}, {0.0, 1.0, 0.0}}), InvalidInput);
    CHECK_THROWS_AS(DriveCycle({{0.0, -1.0, 0.0}, {1.0, 1.0, 0.0}}), InvalidInput);
    const DriveCycle ok({{0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}});
    CHECK_THROWS_AS(regen_energy_over_cycle(VehicleSpec{}, ok, 1.5), InvalidInput);
}
