#pragma once

// Quadrature, least-squares polynomial fitting and bench-test energy
// evaluation over sampled speed traces.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rbs/core.hpp"

namespace rbs::analysis {

enum class Quadrature { Trapezoid, Simpson };

// Composite rule over possibly irregular abscissae. Simpson pairs segments
// using the non-uniform three-point weights; an odd trailing segment falls
// back to the trapezoid rule. Throws InvalidInput for fewer than 2 samples,
// mismatched lengths or non-increasing abscissae.
double integrate(std::span<const double> t, std::span<const double> y,
                 Quadrature method = Quadrature::Simpson);

double integrate(const SpeedTrace& trace, Quadrature method = Quadrature::Simpson);

// Integral of the squared samples (pointwise square, then integrate).
double integrate_squared(const SpeedTrace& trace, Quadrature method = Quadrature::Trapezoid);

inline constexpr int kMaxFitDegree = 10;

struct PolyFit {
    int degree = 0;
    std::vector<double> coefficients;  // ascending powers of t
    double residual_rms = 0.0;

    double operator()(double t) const;
};

// Least-squares polynomial fit via normal equations on a time axis shifted to
// its midpoint and scaled onto [-1, 1]; coefficients are mapped back to the
// original axis. Throws RankError when samples <= degree, InvalidInput for a
// negative degree or degree > kMaxFitDegree.
PolyFit fit_polynomial(std::span<const double> t, std::span<const double> y, int degree);
PolyFit fit_polynomial(const SpeedTrace& trace, int degree);

// Bench-test energy expression with three time-integrated speed segments,
// evaluated exactly as written:
//   1/2 I ( -[int w1 dt]^2 + [int w2 dt]^2 + [int w3 dt]^2 )
// The result has units of kg m^2 rad^2, not joules.
double eq7_literal(const SpeedTrace& seg1, const SpeedTrace& seg2, const SpeedTrace& seg3,
                   double inertia_kg_m2, Quadrature method = Quadrature::Trapezoid);

// Free-spin minus braking expression evaluated exactly as written:
//   1/2 I ( int w_fs^2 dt - int w_b^2 dt )
// The result has units of J s, not joules.
double eq8_literal(const SpeedTrace& free_spin, const SpeedTrace& braking, double inertia_kg_m2,
                   Quadrature method = Quadrature::Trapezoid);

// Kinetic energy released between the peak speed (over both traces) and the
// final free-spin sample: 1/2 I (w_peak^2 - w_end^2). Always >= 0.
double net_recovered_energy(const SpeedTrace& free_spin, const SpeedTrace& braking,
                            double inertia_kg_m2);

// A single bench recording cut at the flywheel peak. The plateau is the span
// where omega stays within plateau_tol (relative) of the peak; it is empty
// when the peak is a single instant.
struct BenchSegments {
    SpeedTrace braking;                    // start .. first peak
    std::optional<SpeedTrace> plateau;     // first peak .. last peak
    SpeedTrace free_spin;                  // last peak .. end
    double t_peak_first = 0.0;
    double t_peak_last = 0.0;
    double omega_peak = 0.0;
};

// Throws InvalidInput when the peak sits on the first or last sample.
BenchSegments segment_bench_trace(const SpeedTrace& trace, double plateau_tol = 0.0);

// eq7_literal over a segmented trace; an empty plateau contributes zero.
double eq7_literal(const BenchSegments& segments, double inertia_kg_m2,
                   Quadrature method = Quadrature::Trapezoid);

// ---------------------------------------------------------------------------
// Table aggregation

struct BenchCaseRow {
    std::string case_id;
    double omega_max_rpm = 0.0;
    double braking_s = 0.0;
    double free_spin_s = 0.0;
    double energy_j = 0.0;
};

struct CaseSummary {
    std::string case_id;
    double omega_max_rpm = 0.0;
    double braking_s = 0.0;
    double avg_free_spin_s = 0.0;  // rounded half-up to 0.1 s
    double avg_energy_j = 0.0;     // rounded half-up to 1 J
    std::size_t rows = 0;
};

// Half-up rounding to the given number of decimals.
double round_half_up(double x, int decimals);

// Groups rows by case_id in order of first appearance and averages free-spin
// period and energy. Rows of one case must agree on omega_max and braking
// period. Throws InvalidInput for empty input or non-positive fields.
std::vector<CaseSummary> aggregate_cases(std::span<const BenchCaseRow> rows);

}  // namespace rbs::analysis
