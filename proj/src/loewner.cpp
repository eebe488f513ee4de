#include "ale/loewner.hpp"

#include <algorithm>
#include <cmath>

namespace ale::loewner {

DrivingFunction::DrivingFunction(std::vector<double> jump_times, std::vector<double> values)
    : values_(std::move(values)) {
    if (jump_times.empty() || jump_times.size() != values_.size())
        throw std::invalid_argument("DrivingFunction: need one value per jump time");
    times_.reserve(jump_times.size() + 1);
    times_.push_back(0.0);
    for (double t : jump_times) {
        if (!(t > times_.back()))
            throw std::invalid_argument("DrivingFunction: jump times must be strictly increasing");
        times_.push_back(t);
    }
}

DrivingFunction DrivingFunction::constant(double theta, double total_time) {
    return DrivingFunction({total_time}, {theta});
}

DrivingFunction DrivingFunction::from_blocks(const std::vector<double>& angles,
                                             const std::vector<double>& capacities) {
    if (angles.size() != capacities.size())
        throw std::invalid_argument("from_blocks: size mismatch");
    std::vector<double> times(capacities.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < capacities.size(); ++i) times[i] = (acc += capacities[i]);
    return DrivingFunction(std::move(times), angles);
}

DrivingFunction DrivingFunction::from_cluster(const cluster::ClusterState& state) {
    std::vector<double> angles(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) angles[i] = state.blocks()[i].theta;
    return DrivingFunction(state.cum_capacity(), angles);
}

double DrivingFunction::value_at(double t) const {
    if (t <= times_[1]) return values_.front();
    if (t >= times_.back()) return values_.back();
    const auto it = std::lower_bound(times_.begin() + 1, times_.end(), t);
    return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double DrivingFunction::sup_norm(double T, double offset) const {
    double m = 0.0;
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (times_[k] >= T) break;  // segment k lives on (C_k, C_{k+1}]
        m = std::max(m, std::abs(values_[k] - offset));
    }
    return m;
}

DrivingFunction DrivingFunction::scaled(double factor) const {
    DrivingFunction out = *this;
    for (double& v : out.values_) v *= factor;
    return out;
}

DrivingFunction DrivingFunction::shifted(double offset) const {
    DrivingFunction out = *this;
    for (double& v : out.values_) v += offset;
    return out;
}

namespace {

struct Rhs {
    double s, theta;
    cplx dlog;
};

// radial/angular reverse system plus the log-derivative integrand
inline Rhs rhs(double s, double theta, double xi_val, bool with_deriv) {
    const double delta = theta - xi_val;
    const cplx e = cexpm1(s, delta);  // u e^{-i Xi} - 1
    const double den = std::norm(e);
    Rhs r{std::expm1(2.0 * s) / den,
          -2.0 * (1.0 + std::expm1(s)) * std::sin(delta) / den,
          {0.0, 0.0}};
    if (with_deriv) r.dlog = 1.0 - 2.0 / (e * e);
    return r;
}

struct State4 {
    double y[4];
};

inline State4 axpy(const State4& y, double h, const double k[4][7], const double* w, int stages,
                   int dim) {
    State4 out = y;
    for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < stages; ++j) acc += w[j] * k[i][j];
        out.y[i] += h * acc;
    }
    return out;
}

}  // namespace

FlowState reverse_flow_raw(const DrivingFunction& xi, double T, const LogPolarPoint& z,
                           double tol, bool with_deriv) {
    if (!(T >= 0.0)) throw std::domain_error("reverse_flow: T must be >= 0");
    if (T > xi.total_time() * (1.0 + 1e-12) + 1e-300)
        throw std::domain_error("reverse_flow: T exceeds the driver's total capacity");
    if (!(tol > 0.0)) throw std::domain_error("reverse_flow: tol must be > 0");

    // breakpoints of Xi_t = xi_{T-t}
    std::vector<double> breaks{0.0};
    const auto& jt = xi.jump_times();
    for (std::size_t k = jt.size(); k-- > 1;) {
        const double b = T - jt[k - 1] + 0.0;  // jt[0] is C_0 = 0
        if (b > 1e-15 && b < T - 1e-15) breaks.push_back(b);
    }
    std::sort(breaks.begin(), breaks.end());
    breaks.push_back(T);

    // Dormand-Prince 5(4)
    static const double A[7][6] = {
        {0, 0, 0, 0, 0, 0},
        {1.0 / 5, 0, 0, 0, 0, 0},
        {3.0 / 40, 9.0 / 40, 0, 0, 0, 0},
        {44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0},
        {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0},
        {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0},
        {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
    static const double B5[7] = {35.0 / 384,      0, 500.0 / 1113, 125.0 / 192,
                                 -2187.0 / 6784, 11.0 / 84, 0};
    static const double E[7] = {71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
                                22.0 / 525,   -1.0 / 40};

    const int dim = with_deriv ? 4 : 2;
    State4 y{{z.s, wrap_angle(z.theta), 0.0, 0.0}};
    const double s_floor = std::max(z.s, 1e-12);
    const double h_min = 1e-15 * std::max(1.0, T);

    for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
        const double ta = breaks[seg], tb = breaks[seg + 1];
        const double xi_val = xi.value_at(T - 0.5 * (ta + tb));
        double t = ta;
        double h = tb - ta;
        double k[4][7];

        auto eval = [&](const State4& st, int col) {
            const Rhs r = rhs(st.y[0], st.y[1], xi_val, with_deriv);
            k[0][col] = r.s;
            k[1][col] = r.theta;
            k[2][col] = r.dlog.real();
            k[3][col] = r.dlog.imag();
        };

        eval(y, 0);
        while (t < tb) {
            const bool final_step = h >= tb - t;
            if (final_step) h = tb - t;
            if (h < h_min) throw FlowSingularError(t);

            for (int stage = 1; stage < 7; ++stage) {
                const State4 ys = axpy(y, h, k, A[stage], stage, dim);
                eval(ys, stage);
            }
            const State4 ynew = axpy(y, h, k, B5, 7, dim);

            double err = 0.0;
            bool ok = true;
            for (int i = 0; i < dim; ++i) {
                double ei = 0.0;
                for (int j = 0; j < 7; ++j) ei += E[j] * k[i][j];
                ei *= h;
                const double floor_i = (i == 0) ? s_floor : 1e-2;
                const double wt = tol * std::max({std::abs(y.y[i]), std::abs(ynew.y[i]), floor_i});
                if (!std::isfinite(ei) || !std::isfinite(ynew.y[i])) ok = false;
                err = std::max(err, std::abs(ei) / wt);
            }

            if (ok && err <= 1.0) {
                t = final_step ? tb : t + h;
                y = ynew;
                // FSAL: stage 7 of the accepted step is the next step's stage 1
                for (int i = 0; i < dim; ++i) k[i][0] = k[i][6];
                h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
            } else {
                h *= ok ? std::max(0.1, 0.9 * std::pow(err, -0.2)) : 0.1;
            }
        }
    }

    return {y.y[0], wrap_angle(y.y[1]), {y.y[2], y.y[3]}, with_deriv};
}

cplx reverse_flow(const DrivingFunction& xi, double T, const LogPolarPoint& z, double tol) {
    const FlowState f = reverse_flow_raw(xi, T, z, tol, false);
    return std::polar(std::exp(f.s), f.theta);
}

cplx reverse_flow_deriv(const DrivingFunction& xi, double T, const LogPolarPoint& z, double tol) {
    const FlowState f = reverse_flow_raw(xi, T, z, tol, true);
    return std::exp(f.deriv_log);
}

double reference_radial(double r, double t) {
    if (!(r >= 1.0)) throw std::domain_error("reference_radial: start radius must be >= 1");
    if (!(t >= 0.0)) throw std::domain_error("reference_radial: time must be >= 0");
    const double b = (r + 1.0) * (r + 1.0);
    const double w = ((r - 1.0) * (r - 1.0) - 4.0 * r * std::expm1(-t)) / b;
    return b * std::exp(t) / (2.0 * r) * (1.0 + std::sqrt(w)) - 1.0;
}

double angular_lifetime(double theta) {
    const double c = std::cos(0.5 * std::remainder(theta, kTwoPi));
    return -2.0 * std::log(std::abs(c));
}

double reference_angular(double theta, double t) {
    if (!(t >= 0.0)) throw std::domain_error("reference_angular: time must be >= 0");
    const double th = std::remainder(theta, kTwoPi);  // (-pi, pi], antipode stays +pi
    if (t > angular_lifetime(th) * (1.0 + 1e-12) + 1e-15)
        throw std::domain_error("reference_angular: time beyond the angular lifetime");
    const double c = std::cos(0.5 * th);
    double a = 2.0 * c * c * std::exp(t) - 1.0;
    a = std::min(1.0, std::max(-1.0, a));
    return std::copysign(std::acos(a), th);
}

TipCheckReport check_tip_estimate(const DrivingFunction& xi, const LogPolarPoint& z, double T,
                                  double tol) {
    constexpr double A = 100.0;
    TipCheckReport rep;
    const double argz = wrap_angle(z.theta);
    const double rm1 = z.radius_minus_one();
    const double lhs = xi.sup_norm(T) + std::abs(argz);
    const double rhsv = std::exp(-T) * rm1 / A;
    rep.hypothesis_margin = rhsv - lhs;
    rep.admissible = z.s > 0.0 && z.radius() < 2.0 && lhs <= rhsv;
    if (!rep.admissible) return rep;

    const FlowState f = reverse_flow_raw(xi, T, z, tol, false);
    rep.arg_margin = xi.sup_norm(T, argz) - std::abs(wrap_angle(f.theta - argz));
    rep.radial_margin = reference_radial(z.radius(), T) - std::exp(f.s);
    rep.arg_violation = rep.arg_margin < -10.0 * tol;
    rep.radial_violation = rep.radial_margin < -10.0 * tol;
    return rep;
}

AwayCheckReport check_away_estimate(const DrivingFunction& xi, const LogPolarPoint& z, double T,
                                    double tol) {
    constexpr double A = 100.0;
    AwayCheckReport rep;
    const double argz = wrap_angle(z.theta);
    const double th = std::abs(argz);
    if (!(th > 0.0) || !(th < kPi)) return rep;

    rep.lifetime_margin = angular_lifetime(th) - T;
    if (rep.lifetime_margin < 0.0) return rep;

    const double v0 = reference_angular(th, T);
    const double one_minus_cos = 2.0 * std::pow(std::sin(0.5 * v0), 2);
    const double lhs = xi.sup_norm(T) + z.radius_minus_one();
    const double rhsv = one_minus_cos / (A * std::sqrt(std::expm1(T)));
    rep.hypothesis_margin = rhsv - lhs;
    if (!(lhs <= rhsv)) return rep;
    rep.admissible = true;

    // reflect to arg z > 0
    const DrivingFunction xr = argz < 0.0 ? xi.scaled(-1.0) : xi;
    const FlowState f = reverse_flow_raw(xr, T, LogPolarPoint(z.s, th), tol, false);

    const double bound = 2.0 * lhs * std::tan(0.5 * th) / std::tan(0.5 * v0);
    rep.angular_margin = bound - std::abs(f.theta - v0);
    rep.angular_violation = rep.angular_margin < -10.0 * tol;
    rep.radial_log_ratio =
        std::log(std::expm1(f.s) * std::tan(0.5 * v0) / (z.radius_minus_one() * std::tan(0.5 * th)));
    return rep;
}

DerivRatioReport deriv_ratio_monitor(const DrivingFunction& xi, const LogPolarPoint& z, double T,
                                     double tol) {
    constexpr double A = 100.0;
    DerivRatioReport rep;
    const double argz = wrap_angle(z.theta);
    const double th = std::abs(argz);
    const double rm1 = z.radius_minus_one();
    const double nrm = xi.sup_norm(T);

    const DrivingFunction xr = argz < 0.0 ? xi.scaled(-1.0) : xi;
    const FlowState f = reverse_flow_raw(xr, T, LogPolarPoint(z.s, th), tol, true);
    const double log_mod = f.deriv_log.real();  // log |Psi'_T(z)|

    rep.tip_admissible =
        z.s > 0.0 && z.radius() < 2.0 && nrm + th <= std::exp(-T) * rm1 / A;
    {
        const double log_slit = std::log(std::abs(slitgeom::slit_map_deriv(T, z)));
        rep.tip_log_ratio = std::abs(log_mod - log_slit);
        const double denom = std::exp(T) * std::pow(nrm + th, 2) / (rm1 * rm1);
        rep.tip_normalized = rep.tip_log_ratio == 0.0 ? 0.0 : rep.tip_log_ratio / denom;
    }

    if (th > 0.0 && th < kPi && T <= angular_lifetime(th)) {
        const double v0 = reference_angular(th, T);
        const double one_minus_cos = 2.0 * std::pow(std::sin(0.5 * v0), 2);
        rep.away_admissible = nrm + rm1 <= one_minus_cos / (A * std::sqrt(std::expm1(T)));
        rep.away_log_ratio =
            std::abs(log_mod + std::log(std::tan(0.5 * v0)) - std::log(std::tan(0.5 * th)));
        const double denom = (nrm + rm1) * std::sqrt(std::expm1(T)) / one_minus_cos;
        rep.away_normalized = rep.away_log_ratio == 0.0 ? 0.0 : rep.away_log_ratio / denom;
    }

    const double one_minus_cos_z = 2.0 * std::pow(std::sin(0.5 * th), 2);
    rep.lower_bound_ratio =
        std::exp(log_mod) * std::sqrt(std::expm1(T)) * (nrm + rm1) / (rm1 * one_minus_cos_z);
    return rep;
}

double continuity_check(const DrivingFunction& xi1, const DrivingFunction& xi2, double T,
                        double eps, double tol) {
    if (T > std::min(xi1.total_time(), xi2.total_time()) * (1.0 + 1e-12))
        throw std::domain_error("continuity_check: T exceeds a driver's total capacity");
    std::vector<double> grid;
    for (double t : xi1.jump_times())
        if (t > 0.0 && t <= T) grid.push_back(t);
    for (double t : xi2.jump_times())
        if (t > 0.0 && t <= T) grid.push_back(t);
    grid.push_back(T);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    double worst = 0.0;
    for (double t : grid) {
        for (double r : {1.0 + eps, 2.0, 10.0}) {
            for (int i = 0; i < 64; ++i) {
                const LogPolarPoint z(std::log(r), -kPi + kTwoPi * i / 64.0);
                const cplx a = reverse_flow(xi1, t, z, tol);
                const cplx b = reverse_flow(xi2, t, z, tol);
                worst = std::max(worst, std::abs(a - b));
            }
        }
    }
    return worst;
}

}  // namespace ale::loewner
