#include "ale/cluster.hpp"

#include <algorithm>
#include <cmath>

namespace ale::cluster {

namespace sg = ale::slitgeom;

void ClusterState::append_particle(double theta, double c) {
    if (!(c > 0.0)) throw std::invalid_argument("append_particle: capacity must be > 0");
    if (c < 1e-14)
        throw std::invalid_argument("append_particle: capacity below double-precision slit resolution");
    const sg::SlitParams p = sg::SlitParams::from_capacity(c);
    blocks_.push_back({theta, c, p.d, p.beta});
    // Kahan step
    const double y = c - carry_;
    const double t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
    cum_.push_back(sum_);
}

double ClusterState::sup_abs_angle() const {
    double m = 0.0;
    for (const auto& b : blocks_) m = std::max(m, std::abs(b.theta));
    return m;
}

MapEval evaluate(const ClusterState& state, const LogPolarPoint& z, DerivMode mode) {
    LogPolarPoint p(z.s, wrap_angle(z.theta));
    cplx deriv(1.0, 0.0);
    double log_abs = 0.0;
    const auto& blocks = state.blocks();
    for (std::size_t i = blocks.size(); i-- > 0;) {
        const BuildingBlock& b = blocks[i];
        const sg::SlitEval ev(sg::SlitParams{b.c, b.d, b.beta});
        const LogPolarPoint local(p.s, wrap_angle(p.theta - b.theta));
        try {
            // rotation factors cancel: (e^{i th} f(e^{-i th} z))' = f'(e^{-i th} z)
            const LogPolarPoint out = sg::slit_map_logpolar(ev, local);
            if (mode == DerivMode::full) {
                const cplx dv = sg::slit_map_deriv(ev, local);
                deriv *= dv;
                log_abs += std::log(std::abs(dv));
            } else if (mode == DerivMode::log_abs) {
                log_abs += sg::slit_map_deriv_log_abs(ev, local, out);
            }
            p = LogPolarPoint(out.s, wrap_angle(out.theta + b.theta));
        } catch (const sg::SingularPointError& e) {
            throw MapEvalError(e.what(), i + 1);
        }
    }
    return {p.to_complex(), deriv, log_abs, p};
}

cplx map_point(const ClusterState& state, const LogPolarPoint& z) {
    return evaluate(state, z, DerivMode::none).value;
}

LogPolarPoint map_point_logpolar(const ClusterState& state, const LogPolarPoint& z) {
    return evaluate(state, z, DerivMode::none).value_logpolar;
}

cplx map_deriv(const ClusterState& state, const LogPolarPoint& z) {
    return evaluate(state, z, DerivMode::full).deriv;
}

double map_deriv_log_abs(const ClusterState& state, const LogPolarPoint& z) {
    return evaluate(state, z, DerivMode::log_abs).log_abs_deriv;
}

std::size_t parent_of(const ClusterState& state, std::size_t j, double tol) {
    const std::size_t n = state.size();
    if (j < 1 || j > n) throw std::invalid_argument("parent_of: particle index out of range");
    const auto& blocks = state.blocks();

    // f_j sends both base pre-images e^{i(theta_j +- beta_j)} to e^{i theta_j},
    // so the descent starts there.
    LogPolarPoint p(0.0, wrap_angle(blocks[j - 1].theta));
    std::vector<std::size_t> hits;
    for (std::size_t k = j - 1; k >= 1; --k) {
        const BuildingBlock& b = blocks[k - 1];
        const LogPolarPoint local(p.s, wrap_angle(p.theta - b.theta));
        cplx u;
        LogPolarPoint out(0.0, 0.0);
        try {
            u = sg::slit_map(b.c, local);
            out = sg::slit_map_logpolar(b.c, local);
        } catch (const sg::SingularPointError& e) {
            throw MapEvalError(e.what(), k);
        }
        // membership of u in (1, 1+d_k] with tol*d_k margins
        const double margin = tol * b.d;
        if (std::abs(u.imag()) <= margin && u.real() >= 1.0 - margin &&
            u.real() <= 1.0 + b.d + margin) {
            hits.push_back(k);
        }
        p = LogPolarPoint(out.s, wrap_angle(out.theta + b.theta));
    }
    if (hits.size() >= 2) throw ParentAmbiguityError(hits[0], hits[1]);
    if (hits.size() == 1) return hits[0];
    if (p.s > 10.0 * tol) throw ParentClassificationError(p.s);
    return 0;
}

bool omega_event(const std::vector<double>& angles, double beta_c) {
    for (std::size_t j = 1; j < angles.size(); ++j)
        if (!(std::abs(angles[j] - angles[j - 1]) < beta_c)) return false;
    return true;
}

namespace {

cplx trace_eval(const ClusterState& state, double theta, int& flagged) {
    try {
        return map_point(state, LogPolarPoint(0.0, theta));
    } catch (const MapEvalError&) {
        ++flagged;
        return map_point(state, LogPolarPoint(0.0, theta + 1e-12));
    }
}

struct TraceBuilder {
    const ClusterState& state;
    double tol_abs;  // refine_tol * cluster scale
    std::size_t cap;
    int flagged = 0;
    std::vector<cplx> out;

    void segment(double ta, const cplx& wa, double tb, const cplx& wb, int depth) {
        if (depth >= 24 || out.size() >= cap || std::abs(wb - wa) <= tol_abs) {
            out.push_back(wb);
            return;
        }
        const double tm = 0.5 * (ta + tb);
        const cplx wm = trace_eval(state, tm, flagged);
        segment(ta, wa, tm, wm, depth + 1);
        segment(tm, wm, tb, wb, depth + 1);
    }
};

}  // namespace

BoundaryTrace boundary_trace(const ClusterState& state, std::size_t target_points,
                             double refine_tol) {
    const std::size_t n0 = std::max<std::size_t>(target_points, 8);
    BoundaryTrace trace;

    if (state.empty()) {
        trace.points.reserve(n0 + 1);
        for (std::size_t i = 0; i < n0; ++i)
            trace.points.push_back(std::polar(1.0, -kPi + kTwoPi * double(i) / double(n0)));
        trace.points.push_back(trace.points.front());
        return trace;
    }

    // Uniform grid plus the tip/base pre-image angles of the blocks; chord
    // refinement alone cannot land on the tips (the derivative vanishes there).
    // Near-coincident special angles (collapsed clusters) keep one
    // representative so the grid stays O(target_points).
    std::vector<double> special;
    special.reserve(3 * state.size());
    for (const BuildingBlock& b : state.blocks()) {
        special.push_back(wrap_angle(b.theta));
        special.push_back(wrap_angle(b.theta + b.beta));
        special.push_back(wrap_angle(b.theta - b.beta));
    }
    std::sort(special.begin(), special.end());
    const double sep = kTwoPi / double(n0) / 16.0;
    std::vector<double> grid;
    grid.reserve(n0 + special.size());
    for (double a : special)
        if (grid.empty() || a - grid.back() >= sep) grid.push_back(a);
    for (std::size_t i = 0; i < n0; ++i) grid.push_back(-kPi + kTwoPi * double(i) / double(n0));
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    std::vector<cplx> vals(grid.size());
    int flagged = 0;
    double scale = 1.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        vals[i] = trace_eval(state, grid[i], flagged);
        scale = std::max(scale, std::abs(vals[i]));
    }

    TraceBuilder builder{state, refine_tol * scale, std::max<std::size_t>(16 * n0, 1 << 16),
                         flagged, {}};
    builder.out.push_back(vals[0]);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool last = i + 1 == grid.size();
        const double tb = last ? grid[0] + kTwoPi : grid[i + 1];
        const cplx wb = last ? vals[0] : vals[i + 1];
        builder.segment(grid[i], vals[i], tb, wb, 0);
    }
    trace.points = std::move(builder.out);
    trace.flagged = builder.flagged;
    // closes by construction: the final segment ends at vals[0]
    return trace;
}

double derivative_lower_bound_ratio(const ClusterState& state, const LogPolarPoint& z) {
    const double mod = std::abs(map_deriv(state, z));
    const double rm1 = z.radius_minus_one();
    const double dth = wrap_angle(z.theta - state.last_angle());
    const double denom = rm1 * 2.0 * std::pow(std::sin(0.5 * dth), 2);
    const double num = std::sqrt(std::expm1(state.total_capacity())) * (state.sup_abs_angle() + rm1);
    return mod * num / denom;
}

}  // namespace ale::cluster
