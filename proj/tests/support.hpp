#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "rbs/core.hpp"

namespace rbs::test {

inline const std::string kFixtures = RBS_FIXTURE_DIR;
inline const std::string kData = RBS_DATA_DIR;

inline std::string fixture(const std::string& name) { return kFixtures + "/" + name; }

// Fixed-seed generator shared by the property tests.
class Gen {
public:
    explicit Gen(std::uint64_t seed = 0x5eed2012) : rng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    bool coin() { return integer(0, 1) == 1; }

    // Strictly increasing, irregular abscissae starting at t0.
    std::vector<double> times(std::size_t n, double t0, double min_step, double max_step) {
        std::vector<double> t{t0};
        while (t.size() < n) t.push_back(t.back() + uniform(min_step, max_step));
        return t;
    }

    SpeedTrace speed_trace(std::size_t n, double w_max) {
        const auto t = times(n, uniform(0.0, 5.0), 0.01, 0.5);
        std::vector<Sample> s;
        for (double x : t) s.push_back({x, uniform(0.0, w_max)});
        return SpeedTrace(std::move(s));
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

// Plain trapezoid over samples of f(omega), kept independent of the library.
template <class F>
double brute_trapezoid(std::span<const Sample> s, F f) {
    double acc = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        acc += (s[i].t - s[i - 1].t) * (f(s[i].value) + f(s[i - 1].value)) / 2.0;
    }
    return acc;
}

}  // namespace rbs::test
