#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

namespace verbtrack {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Reduce an angle to (-pi, pi].
inline double wrap_angle(double a) {
    a = std::fmod(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    if (a > kPi) a -= kTwoPi;
    return a;
}

// Shortest angular distance, in [0, pi].
inline double angular_distance(double a, double b) {
    double d = std::fabs(wrap_angle(a - b));
    return d; // wrap_angle already yields |d| <= pi
}

// atan2 with the (0,0) -> 0 convention used throughout for directions.
inline double direction_or_zero(double y, double x) {
    if (x == 0.0 && y == 0.0) return 0.0;
    return wrap_angle(std::atan2(y, x));
}

double log_bessel_i0(double kappa);   // log I0, |rel err| <~ 1e-12 on [0, 1e3]
double bessel_a(double kappa);        // A(kappa) = I1/I0
double vm_kappa_from_rbar(double rbar, double cap); // A^{-1}(rbar), Fisher init + Newton

// Deterministic 64-bit mixing for deriving independent sub-seeds.
inline std::uint64_t mix_seed(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
    return mix_seed(a ^ mix_seed(b));
}
inline std::uint64_t mix_seed(std::uint64_t a, const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) { h ^= c; h *= 1099511628211ull; }
    return mix_seed(a, h);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads. Results must be written
// to pre-sized slots so the outcome is independent of scheduling.
inline void parallel_for_indexed(std::size_t n, int jobs,
                                 const std::function<void(std::size_t)>& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::size_t stride = static_cast<std::size_t>(jobs);
    for (int w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w]() {
            for (std::size_t i = static_cast<std::size_t>(w); i < n; i += stride) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace verbtrack
