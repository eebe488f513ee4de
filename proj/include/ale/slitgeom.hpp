#pragma once

#include "ale/logpolar.hpp"

namespace ale::slitgeom {

// Evaluation landed exactly on a point where the requested quantity is
// singular (the two base pre-images e^{+-i beta_t} for the derivative).
struct SingularPointError : std::domain_error {
    double theta;
    explicit SingularPointError(double theta_)
        : std::domain_error("slit map derivative is singular at a base pre-image"), theta(theta_) {}
};

// Capacity/length/base-angle dictionary for the radial slit attached at 1.
// e^t = 1 + d^2/(4(1+d)) ties the two parametrizations together.
double length_from_capacity(double t);
double capacity_from_length(double d);
double base_angle(double t);

struct SlitParams {
    double t;     // logarithmic capacity
    double d;     // slit length
    double beta;  // base half-angle: f_t(e^{+-i beta}) = 1

    static SlitParams from_capacity(double t);
    static SlitParams from_length(double d);
};

// Precomputed constants for repeated evaluations of one slit map; composition
// orbits and density scans construct this once per block instead of paying
// the capacity/length/angle conversions on every point.
struct SlitEval {
    double d;
    double beta;
    double exp_t;       // 1 + d^2/(4(1+d))
    double em1_neg_t;   // e^{-t} - 1
    double rho;         // d/(2 sqrt(1+d))
    double scale;       // 2 sqrt(1+d)/(2+d)
    explicit SlitEval(const SlitParams& p);
};

cplx slit_map(const SlitEval& ev, const LogPolarPoint& z);
LogPolarPoint slit_map_logpolar(const SlitEval& ev, const LogPolarPoint& z);
cplx slit_map_deriv(const SlitEval& ev, const LogPolarPoint& z);

// log |f_t'(z)| through the log-polar image radius; shares the orbit walk and
// avoids the complex map entirely. Returns -inf at z = 1.
double slit_map_deriv_log_abs(const SlitEval& ev, const LogPolarPoint& z,
                              const LogPolarPoint& image);

// f_t: exterior disk -> exterior disk minus (1, 1+d(t)], f_t(z) = e^t z + O(1).
// The square root is taken in the factored form z sqrt(1-e^{i beta}/z) sqrt(1-e^{-i beta}/z)
// with principal roots of the two near-unity factors: continuous on the closed
// exterior disk and automatically on the e^t z branch at infinity.
cplx slit_map(double t, const LogPolarPoint& z);

// Same map through the half-plane decomposition m_Delta . f~_d . m_H, returning
// log-polar output so that log|f_t(z)| keeps relative accuracy for points that
// stay within ~1e-15 of the circle. Composition orbits use this path.
LogPolarPoint slit_map_logpolar(double t, const LogPolarPoint& z);

// f_t'(z) via the factorization H_t(z) e^t (z-1) / ((z-e^{i beta})(z-e^{-i beta}))^{1/2}
// with H_t(z) = e^{-t} f_t(z)/z. Returns 0 at z=1 exactly; throws
// SingularPointError at the base pre-images.
cplx slit_map_deriv(double t, const LogPolarPoint& z);

// The bounded Moebius-like factor H_t(z) = e^{-t} f_t(z) / z.
cplx h_factor(double t, const LogPolarPoint& z);

// Half-plane slit map F_t(z) = sqrt(z^2 - 4t), branch continuous on the closed
// upper half-plane with F_t(z) ~ z at infinity. Boundary rows (Im z = 0) are
// the continuous extension; Im z < 0 is rejected.
cplx halfplane_slit_map(double t, cplx z);

// m_H(z) = i(z-1)/(z+1): exterior disk -> upper half-plane, m_H(1)=0, m_H(inf)=i.
cplx mobius_to_halfplane(const cplx& z);

// m_Delta(w) = (1-iw)/(1+iw): upper half-plane -> exterior disk, m_Delta(0)=1.
cplx mobius_to_disk(const cplx& w);

// f~_d(w) = 2 sqrt(d+1)/(d+2) * sqrt(w^2 - rho^2), rho = d/(2 sqrt(d+1)):
// upper half-plane onto upper half-plane minus (0, i d/(d+2)].
cplx scaled_halfplane_slit(double d, cplx w);

// rho(d): the positive base pre-image of f~_d on the real axis.
double halfplane_base_preimage(double d);

}  // namespace ale::slitgeom
