#include "rbs/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace rbs::analysis {

namespace {

void check_abscissae(std::span<const double> t, std::span<const double> y) {
    if (t.size() != y.size()) throw InvalidInput("abscissae and ordinates differ in length");
    if (t.size() < 2) throw InvalidInput("integration needs at least 2 samples");
    for (std::size_t i = 1; i < t.size(); ++i) {
        if (!(t[i] > t[i - 1])) throw InvalidInput("abscissae must be strictly increasing");
    }
}

// Solve the dense symmetric system a x = b by Gaussian elimination with
// partial pivoting. a is row-major n x n and is overwritten.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        }
        if (std::abs(a[piv * n + col]) < 1e-300) throw RankError("normal equations are singular");
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
        x[i] = s / a[i * n + i];
    }
    return x;
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

double integrate(std::span<const double> t, std::span<const double> y, Quadrature method) {
    check_abscissae(t, y);
    const std::size_t n = t.size();
    double sum = 0.0;
    if (method == Quadrature::Trapezoid) {
        for (std::size_t i = 1; i < n; ++i) sum += 0.5 * (t[i] - t[i - 1]) * (y[i] + y[i - 1]);
        return sum;
    }
    std::size_t i = 0;
    for (; i + 2 < n; i += 2) {
        const double h0 = t[i + 1] - t[i];
        const double h1 = t[i + 2] - t[i + 1];
        const double hs = h0 + h1;
        sum += hs / 6.0 *
               ((2.0 - h1 / h0) * y[i] + hs * hs / (h0 * h1) * y[i + 1] + (2.0 - h0 / h1) * y[i + 2]);
    }
    if (i + 1 < n) sum += 0.5 * (t[i + 1] - t[i]) * (y[i + 1] + y[i]);
    return sum;
}

double integrate(const SpeedTrace& trace, Quadrature method) {
    const auto t = trace.times();
    const auto y = trace.values();
    return integrate(t, y, method);
}

double integrate_squared(const SpeedTrace& trace, Quadrature method) {
    const auto t = trace.times();
    auto y = trace.values();
    for (double& v : y) v *= v;
    return integrate(t, y, method);
}

// ---------------------------------------------------------------------------

double PolyFit::operator()(double t) const {
    double acc = 0.0;
    for (std::size_t k = coefficients.size(); k-- > 0;) acc = acc * t + coefficients[k];
    return acc;
}

PolyFit fit_polynomial(std::span<const double> t, std::span<const double> y, int degree) {
    if (degree < 0) throw InvalidInput("fit degree must be non-negative");
    if (degree > kMaxFitDegree) {
        throw InvalidInput("fit degree " + std::to_string(degree) + " exceeds the limit of " +
                           std::to_string(kMaxFitDegree));
    }
    if (t.size() != y.size()) throw InvalidInput("abscissae and ordinates differ in length");
    if (t.size() <= static_cast<std::size_t>(degree)) {
        throw RankError("need more than " + std::to_string(degree) + " samples for a degree " +
                        std::to_string(degree) + " fit, got " + std::to_string(t.size()));
    }

    const auto [tmin_it, tmax_it] = std::minmax_element(t.begin(), t.end());
    const double mid = 0.5 * (*tmin_it + *tmax_it);
    const double half = 0.5 * (*tmax_it - *tmin_it);
    const double scale = half > 0.0 ? half : 1.0;

    const std::size_t m = static_cast<std::size_t>(degree) + 1;
    std::vector<double> ata(m * m, 0.0);
    std::vector<double> aty(m, 0.0);
    std::vector<double> powers(2 * m - 1);
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double x = (t[i] - mid) / scale;
        powers[0] = 1.0;
        for (std::size_t k = 1; k < powers.size(); ++k) powers[k] = powers[k - 1] * x;
        for (std::size_t r = 0; r < m; ++r) {
            aty[r] += powers[r] * y[i];
            for (std::size_t c = 0; c < m; ++c) ata[r * m + c] += powers[r + c];
        }
    }
    const auto scaled = solve_dense(std::move(ata), std::move(aty));

    // p(t) = sum_k s_k ((t - mid)/scale)^k, expanded in powers of t.
    std::vector<double> coeffs(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        const double sk = scaled[k] / std::pow(scale, static_cast<double>(k));
        for (std::size_t j = 0; j <= k; ++j) {
            coeffs[j] += sk * binomial(static_cast<int>(k), static_cast<int>(j)) *
                         std::pow(-mid, static_cast<double>(k - j));
        }
    }

    PolyFit fit{degree, std::move(coeffs), 0.0};
    double ss = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        double acc = 0.0;
        const double x = (t[i] - mid) / scale;
        for (std::size_t k = m; k-- > 0;) acc = acc * x + scaled[k];
        const double r = y[i] - acc;
        ss += r * r;
    }
    fit.residual_rms = std::sqrt(ss / static_cast<double>(t.size()));
    return fit;
}

PolyFit fit_polynomial(const SpeedTrace& trace, int degree) {
    const auto t = trace.times();
    const auto y = trace.values();
    return fit_polynomial(t, y, degree);
}

// ---------------------------------------------------------------------------

double eq7_literal(const SpeedTrace& seg1, const SpeedTrace& seg2, const SpeedTrace& seg3,
                   double inertia_kg_m2, Quadrature method) {
    if (!(inertia_kg_m2 > 0.0)) throw InvalidInput("inertia must be positive");
    const double a = integrate(seg1, method);
    const double b = integrate(seg2, method);
    const double c = integrate(seg3, method);
    return 0.5 * inertia_kg_m2 * (-a * a + b * b + c * c);
}

double eq8_literal(const SpeedTrace& free_spin, const SpeedTrace& braking, double inertia_kg_m2,
                   Quadrature method) {
    if (!(inertia_kg_m2 > 0.0)) throw InvalidInput("inertia must be positive");
    return 0.5 * inertia_kg_m2 *
           (integrate_squared(free_spin, method) - integrate_squared(braking, method));
}

double net_recovered_energy(const SpeedTrace& free_spin, const SpeedTrace& braking,
                            double inertia_kg_m2) {
    const double peak = std::max(free_spin.max_value(), braking.max_value());
    const double end = free_spin.back().value;
    return kinetic_energy(inertia_kg_m2, peak) - kinetic_energy(inertia_kg_m2, end);
}

BenchSegments segment_bench_trace(const SpeedTrace& trace, double plateau_tol) {
    if (plateau_tol < 0.0 || plateau_tol >= 1.0) throw InvalidInput("plateau tolerance must lie in [0, 1)");
    const auto s = trace.samples();
    const double peak = trace.max_value();
    const double floor = peak * (1.0 - plateau_tol);

    std::size_t first = 0;
    while (s[first].value < floor) ++first;
    std::size_t last = s.size() - 1;
    while (s[last].value < floor) --last;
    if (first == 0) throw InvalidInput("trace peaks at its first sample; no braking segment");
    if (last == s.size() - 1) throw InvalidInput("trace peaks at its last sample; no free-spin segment");

    auto sub = [&](std::size_t a, std::size_t b) {
        return SpeedTrace(std::vector<Sample>(s.begin() + static_cast<std::ptrdiff_t>(a),
                                              s.begin() + static_cast<std::ptrdiff_t>(b) + 1));
    };
    BenchSegments out{sub(0, first), std::nullopt, sub(last, s.size() - 1), s[first].t, s[last].t, peak};
    if (last > first) out.plateau = sub(first, last);
    return out;
}

double eq7_literal(const BenchSegments& segments, double inertia_kg_m2, Quadrature method) {
    if (segments.plateau) {
        return eq7_literal(segments.braking, *segments.plateau, segments.free_spin, inertia_kg_m2, method);
    }
    if (!(inertia_kg_m2 > 0.0)) throw InvalidInput("inertia must be positive");
    const double a = integrate(segments.braking, method);
    const double c = integrate(segments.free_spin, method);
    return 0.5 * inertia_kg_m2 * (-a * a + c * c);
}

// ---------------------------------------------------------------------------

double round_half_up(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::floor(x * scale + 0.5) / scale;
}

std::vector<CaseSummary> aggregate_cases(std::span<const BenchCaseRow> rows) {
    if (rows.empty()) throw InvalidInput("no bench rows to aggregate");

    struct Acc {
        CaseSummary summary;
        double free_spin_sum = 0.0;
        double energy_sum = 0.0;
    };
    std::vector<Acc> groups;
    std::map<std::string, std::size_t> index;

    for (const auto& row : rows) {
        if (!(row.omega_max_rpm > 0.0 && row.braking_s > 0.0 && row.free_spin_s > 0.0 && row.energy_j > 0.0)) {
            throw InvalidInput("bench row for case '" + row.case_id + "' has a non-positive field");
        }
        auto [it, inserted] = index.try_emplace(row.case_id, groups.size());
        if (inserted) {
            groups.push_back({CaseSummary{row.case_id, row.omega_max_rpm, row.braking_s, 0.0, 0.0, 0}});
        }
        auto& g = groups[it->second];
        if (g.summary.omega_max_rpm != row.omega_max_rpm || g.summary.braking_s != row.braking_s) {
            throw InvalidInput("rows of case '" + row.case_id + "' disagree on speed or braking period");
        }
        g.free_spin_sum += row.free_spin_s;
        g.energy_sum += row.energy_j;
        ++g.summary.rows;
    }

    std::vector<CaseSummary> out;
    out.reserve(groups.size());
    for (auto& g : groups) {
        const double n = static_cast<double>(g.summary.rows);
        g.summary.avg_free_spin_s = round_half_up(g.free_spin_sum / n, 1);
        g.summary.avg_energy_j = round_half_up(g.energy_sum / n, 0);
        out.push_back(g.summary);
    }
    return out;
}

}  // namespace rbs::analysis
