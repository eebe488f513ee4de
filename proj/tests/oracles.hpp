#pragma once

// Test-only reference computations, kept independent of the library paths
// they are used to check.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace oracles {

// Invert a strictly increasing function by bisection.
inline double bisect_increasing(const std::function<double(double)>& f, double target, double lo,
                                double hi, int iters = 200) {
    double flo = f(lo) - target;
    double fhi = f(hi) - target;
    if (flo > 0.0 || fhi < 0.0) throw std::runtime_error("bisect_increasing: bad bracket");
    for (int i = 0; i < iters; ++i) {
        const double mid = 0.5 * (lo + hi);
        if ((f(mid) - target) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Slit length from capacity through the linkage e^t = 1 + d^2/(4(1+d)),
// inverted numerically (never through the closed form under test).
inline double slit_length_by_inversion(double t) {
    auto cap = [](double d) { return std::log1p(d * d / (4.0 * (1.0 + d))); };
    return bisect_increasing(cap, t, 0.0, 1e6);
}

// Central finite difference of a complex map along both axes.
inline std::complex<double> central_diff(
    const std::function<std::complex<double>(std::complex<double>)>& f, std::complex<double> z,
    double h) {
    return (f(z + h) - f(z - h)) / (2.0 * h);
}

}  // namespace oracles
