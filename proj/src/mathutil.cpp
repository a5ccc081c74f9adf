#include "verbtrack/mathutil.hpp"

#include <algorithm>

namespace verbtrack {

namespace {

// Power series sum_m (x^2/4)^m / (m!)^2; safe in double up to x ~ 80.
double i0_series(double x) {
    double term = 1.0, sum = 1.0;
    double q = x * x / 4.0;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * m);
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

double i1_series(double x) {
    double term = x / 2.0, sum = term;
    double q = x * x / 4.0;
    for (int m = 1; m < 200; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1.0));
        sum += term;
        if (term < sum * 1e-17) break;
    }
    return sum;
}

// Large-argument expansions: I_nu(x) ~ e^x / sqrt(2 pi x) * S_nu(1/x).
double i0_asymptotic_factor(double x) {
    double r = 1.0 / x;
    return 1.0 + r * (1.0 / 8.0 + r * (9.0 / 128.0 + r * (75.0 / 1024.0
               + r * (11025.0 / 98304.0 + r * (893025.0 / 3932160.0)))));
}

double i1_asymptotic_factor(double x) {
    double r = 1.0 / x;
    return 1.0 - r * (3.0 / 8.0 + r * (15.0 / 128.0 + r * (105.0 / 1024.0
               + r * (14175.0 / 98304.0 + r * (1091475.0 / 3932160.0)))));
}

constexpr double kSeriesCutoff = 80.0;

} // namespace

double log_bessel_i0(double kappa) {
    double x = std::fabs(kappa);
    if (x <= kSeriesCutoff) return std::log(i0_series(x));
    return x - 0.5 * std::log(kTwoPi * x) + std::log(i0_asymptotic_factor(x));
}

double bessel_a(double kappa) {
    double x = std::fabs(kappa);
    if (x < 1e-8) return x / 2.0;
    if (x <= kSeriesCutoff) return i1_series(x) / i0_series(x);
    return i1_asymptotic_factor(x) / i0_asymptotic_factor(x);
}

// Solve A(kappa) = rbar. Start from the classic rbar(2-rbar^2)/(1-rbar^2)
// approximation and polish with safeguarded Newton so the concentration
// update is an exact maximizer (keeps EM monotone to float precision).
double vm_kappa_from_rbar(double rbar, double cap) {
    if (!(rbar > 0.0)) return 0.0;
    if (rbar >= bessel_a(cap)) return cap;
    double r2 = rbar * rbar;
    double kappa = rbar * (2.0 - r2) / std::max(1e-12, 1.0 - r2);
    kappa = std::clamp(kappa, 1e-12, cap);
    for (int it = 0; it < 50; ++it) {
        double a = bessel_a(kappa);
        double da = 1.0 - a * a - a / kappa; // A'(k) via Bessel recurrence
        if (da <= 0.0) break;
        double step = (a - rbar) / da;
        double next = std::clamp(kappa - step, 0.0, cap);
        if (std::fabs(next - kappa) <= 1e-13 * std::max(1.0, kappa)) {
            kappa = next;
            break;
        }
        kappa = next;
        if (kappa == 0.0 || kappa == cap) break;
    }
    return kappa;
}

} // namespace verbtrack
