#include "ale/slitgeom.hpp"

#include <cmath>
#include <limits>

namespace ale::slitgeom {

namespace {

// Principal square root with the upper-half-plane boundary convention:
// inputs on the negative real axis are treated as having Im = +0.
cplx psqrt_hp(cplx w) {
    if (w.imag() == 0.0) w = cplx(w.real(), +0.0);
    return std::sqrt(w);
}

}  // namespace

double length_from_capacity(double t) {
    if (!(t >= 0.0)) throw std::domain_error("length_from_capacity: capacity must be >= 0");
    // d(t) = 2 e^t (1 + sqrt(1-e^{-t})) - 2 = 2 expm1(t) + 2 e^t sqrt(-expm1(-t))
    return 2.0 * std::expm1(t) + 2.0 * std::exp(t) * std::sqrt(-std::expm1(-t));
}

double capacity_from_length(double d) {
    if (!(d >= 0.0)) throw std::domain_error("capacity_from_length: length must be >= 0");
    return std::log1p(d * d / (4.0 * (1.0 + d)));
}

double base_angle(double t) {
    const double d = length_from_capacity(t);
    return 2.0 * std::atan(d / (2.0 * std::sqrt(d + 1.0)));
}

SlitParams SlitParams::from_capacity(double t) {
    const double d = length_from_capacity(t);
    return {t, d, 2.0 * std::atan(d / (2.0 * std::sqrt(d + 1.0)))};
}

SlitParams SlitParams::from_length(double d) {
    const double t = capacity_from_length(d);
    return {t, d, 2.0 * std::atan(d / (2.0 * std::sqrt(d + 1.0)))};
}

SlitEval::SlitEval(const SlitParams& p) : d(p.d), beta(p.beta) {
    const double root = std::sqrt(1.0 + d);
    const double dd4 = d * d / (4.0 * (1.0 + d));
    exp_t = 1.0 + dd4;
    em1_neg_t = -dd4 / exp_t;  // e^{-t} - 1 = -(e^t - 1)/e^t
    rho = d / (2.0 * root);
    scale = 2.0 * root / (d + 2.0);
}

cplx slit_map(const SlitEval& ev, const LogPolarPoint& z) {
    const double s = z.s;
    const double th = wrap_angle(z.theta);
    if (ev.d == 0.0) return std::polar(std::exp(s), th);

    const cplx delta = cexpm1(s, th);  // z - 1
    const cplx zc = 1.0 + delta;
    // 1 - e^{+-i beta}/z = -(e^{-s + i(+-beta - theta)} - 1); both factors lie in
    // the closed right half-plane, so the principal roots are the right branch.
    const cplx q = std::sqrt(-cexpm1(-s, ev.beta - th)) * std::sqrt(-cexpm1(-s, -ev.beta - th));
    const cplx series = delta * delta / zc + (2.0 - 2.0 * ev.em1_neg_t) + (2.0 + delta) * q;
    return 0.5 * ev.exp_t * series;
}

cplx slit_map(double t, const LogPolarPoint& z) {
    if (!(t >= 0.0)) throw std::domain_error("slit_map: capacity must be >= 0");
    return slit_map(SlitEval(SlitParams::from_capacity(t)), z);
}

double halfplane_base_preimage(double d) {
    if (!(d >= 0.0)) throw std::domain_error("halfplane_base_preimage: length must be >= 0");
    return d / (2.0 * std::sqrt(d + 1.0));
}

cplx scaled_halfplane_slit(double d, cplx w) {
    if (!(d >= 0.0)) throw std::domain_error("scaled_halfplane_slit: length must be >= 0");
    if (w.imag() < 0.0) throw std::domain_error("scaled_halfplane_slit: point below the real axis");
    const double rho = halfplane_base_preimage(d);
    const double scale = 2.0 * std::sqrt(d + 1.0) / (d + 2.0);
    return scale * psqrt_hp(w - rho) * psqrt_hp(w + rho);
}

LogPolarPoint slit_map_logpolar(const SlitEval& ev, const LogPolarPoint& z) {
    const double s = z.s;
    const double th = wrap_angle(z.theta);
    if (ev.d == 0.0) return LogPolarPoint(s, th);

    // m_H(z): real part -2 Im(z-1)/|z+1|^2, imaginary part (|z|^2-1)/|z+1|^2.
    const cplx delta = cexpm1(s, th);
    const double nd = std::norm(2.0 + delta);
    const double x = -2.0 * delta.imag() / nd;
    const double y = std::expm1(2.0 * s) / nd;

    const cplx w = ev.scale * psqrt_hp(cplx(x - ev.rho, y)) * psqrt_hp(cplx(x + ev.rho, y));

    const double wx = w.real();
    const double wy = std::max(w.imag(), 0.0);
    // |m_Delta(w)|^2 - 1 = 4 Im w / |1+iw|^2 keeps tiny log-radii exact.
    const double den = wx * wx + (1.0 - wy) * (1.0 - wy);
    const double s_out = 0.5 * std::log1p(4.0 * wy / den);
    const double theta_out = std::atan2(-2.0 * wx, 1.0 - wx * wx - wy * wy);
    return LogPolarPoint(std::max(s_out, 0.0), wrap_angle(theta_out));
}

LogPolarPoint slit_map_logpolar(double t, const LogPolarPoint& z) {
    if (!(t >= 0.0)) throw std::domain_error("slit_map_logpolar: capacity must be >= 0");
    return slit_map_logpolar(SlitEval(SlitParams::from_capacity(t)), z);
}

cplx slit_map_deriv(const SlitEval& ev, const LogPolarPoint& z) {
    if (ev.d == 0.0) return {1.0, 0.0};
    const double s = z.s;
    const double th = wrap_angle(z.theta);

    const cplx delta = cexpm1(s, th);  // z - 1
    if (delta == 0.0) return {0.0, 0.0};
    const cplx zc = 1.0 + delta;
    const cplx q1 = std::sqrt(-cexpm1(-s, ev.beta - th));
    const cplx q2 = std::sqrt(-cexpm1(-s, -ev.beta - th));
    if (q1 == 0.0 || q2 == 0.0) throw SingularPointError(th);
    const cplx q = q1 * q2;
    const cplx f =
        0.5 * ev.exp_t * (delta * delta / zc + (2.0 - 2.0 * ev.em1_neg_t) + (2.0 + delta) * q);
    return f * delta / (zc * zc * q);
}

cplx slit_map_deriv(double t, const LogPolarPoint& z) {
    if (!(t >= 0.0)) throw std::domain_error("slit_map_deriv: capacity must be >= 0");
    return slit_map_deriv(SlitEval(SlitParams::from_capacity(t)), z);
}

double slit_map_deriv_log_abs(const SlitEval& ev, const LogPolarPoint& z,
                              const LogPolarPoint& image) {
    if (ev.d == 0.0) return 0.0;
    const double s = z.s;
    const double th = wrap_angle(z.theta);

    // |f'| = |f| |z-1| / (|z|^2 |q1| |q2|); |f| = e^{image.s} from the orbit.
    const double em = std::expm1(s);
    const double hs = std::sin(0.5 * th);
    const double ndelta = em * em + 4.0 * (1.0 + em) * hs * hs;  // |z-1|^2
    if (ndelta == 0.0) return -std::numeric_limits<double>::infinity();
    const double em_neg = -em / (1.0 + em);  // expm1(-s)
    const double h1 = std::sin(0.5 * (ev.beta - th));
    const double h2 = std::sin(0.5 * (ev.beta + th));
    const double nq1 = em_neg * em_neg + 4.0 * (1.0 + em_neg) * h1 * h1;
    const double nq2 = em_neg * em_neg + 4.0 * (1.0 + em_neg) * h2 * h2;
    if (nq1 == 0.0 || nq2 == 0.0) throw SingularPointError(th);
    return image.s + 0.5 * std::log(ndelta) - 2.0 * s - 0.25 * std::log(nq1 * nq2);
}

cplx h_factor(double t, const LogPolarPoint& z) {
    const cplx f = slit_map(t, z);
    return std::exp(-t) * f / std::polar(std::exp(z.s), wrap_angle(z.theta));
}

cplx halfplane_slit_map(double t, cplx z) {
    if (!(t >= 0.0)) throw std::domain_error("halfplane_slit_map: capacity must be >= 0");
    if (z.imag() < 0.0) throw std::domain_error("halfplane_slit_map: point below the real axis");
    const double a = 2.0 * std::sqrt(t);
    return psqrt_hp(z - a) * psqrt_hp(z + a);
}

cplx mobius_to_halfplane(const cplx& z) {
    if (z == cplx(-1.0, 0.0)) throw std::domain_error("mobius_to_halfplane: pole at z = -1");
    return cplx(0.0, 1.0) * (z - 1.0) / (z + 1.0);
}

cplx mobius_to_disk(const cplx& w) {
    if (w.imag() < 0.0) throw std::domain_error("mobius_to_disk: point below the real axis");
    if (w == cplx(0.0, 1.0)) throw std::domain_error("mobius_to_disk: pole at w = i");
    const cplx iw(-w.imag(), w.real());
    return (1.0 - iw) / (1.0 + iw);
}

}  // namespace ale::slitgeom
