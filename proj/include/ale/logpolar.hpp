#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ale {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// e^{x+iy} - 1, accurate when the result is small. Plain exp followed by
// subtraction loses all digits for |x|,|y| ~ 1e-15; this keeps full relative
// precision (real part via expm1 and the half-angle identity).
inline cplx cexpm1(double x, double y) {
    const double em = std::expm1(x);
    const double hs = std::sin(0.5 * y);
    return {em * std::cos(y) - 2.0 * hs * hs, (1.0 + em) * std::sin(y)};
}

inline cplx cexpm1(const cplx& w) { return cexpm1(w.real(), w.imag()); }

// Reduce an angle to [-pi, pi).
inline double wrap_angle(double theta) {
    double w = std::remainder(theta, kTwoPi);  // (-pi, pi]
    return w == kPi ? -kPi : w;
}

// A point e^{s+i theta} of the closed exterior disk. Keeping (s, theta)
// instead of rectangular coordinates lets differences against unit-modulus
// points be formed through cexpm1, so s survives down to ~1e-15.
struct LogPolarPoint {
    double s = 0.0;      // log radius, >= 0
    double theta = 0.0;  // radians

    LogPolarPoint() = default;
    LogPolarPoint(double s_, double theta_) : s(s_), theta(theta_) {
        if (!(s_ >= 0.0)) throw std::domain_error("LogPolarPoint: log-radius s must be >= 0");
    }

    double radius() const { return std::exp(s); }
    // |z| - 1 without cancellation
    double radius_minus_one() const { return std::expm1(s); }
    cplx to_complex() const { return std::polar(std::exp(s), theta); }
};

// Lossy inverse (|z|-1 is recovered only to absolute ~1e-16); used by tests
// and rendering, never on the boundary-adjacent evaluation paths.
inline LogPolarPoint logpolar_from(const cplx& z) {
    const double n = std::norm(z);
    if (!(n >= 1.0)) {
        if (n > 1.0 - 1e-12) return LogPolarPoint(0.0, std::arg(z));
        throw std::domain_error("logpolar_from: point inside the unit disk");
    }
    return LogPolarPoint(0.5 * std::log1p(n - 1.0), std::arg(z));
}

inline bool finite(const cplx& z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace ale
