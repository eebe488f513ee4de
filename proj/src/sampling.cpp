#include "ale/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace ale::sampling {

namespace sg = ale::slitgeom;
namespace cl = ale::cluster;

const char* to_string(Model m) { return m == Model::ale ? "ale" : "markov"; }

const char* to_string(CapacityRule r) {
    switch (r) {
        case CapacityRule::constant: return "constant";
        case CapacityRule::alpha_deriv: return "alpha-deriv";
        case CapacityRule::equal_slit: return "equal-slit";
        case CapacityRule::deriv_squared: return "deriv-squared";
        case CapacityRule::fixed_image_length: return "fixed-image-length";
    }
    return "?";
}

Model model_from_string(const std::string& s) {
    if (s == "ale") return Model::ale;
    if (s == "markov") return Model::markov;
    throw std::invalid_argument("unknown model: " + s);
}

CapacityRule capacity_rule_from_string(const std::string& s) {
    if (s == "constant") return CapacityRule::constant;
    if (s == "alpha-deriv") return CapacityRule::alpha_deriv;
    if (s == "equal-slit") return CapacityRule::equal_slit;
    if (s == "deriv-squared") return CapacityRule::deriv_squared;
    if (s == "fixed-image-length") return CapacityRule::fixed_image_length;
    throw std::invalid_argument("unknown capacity rule: " + s);
}

double ModelParams::resolved_sigma() const {
    if (sigma) return *sigma;
    if (gamma) return std::pow(c, *gamma);
    throw std::invalid_argument("ModelParams: one of sigma/gamma required");
}

void ModelParams::validate() const {
    if (!(c > 0.0)) throw std::invalid_argument("ModelParams: c must be > 0");
    if (sigma.has_value() == gamma.has_value())
        throw std::invalid_argument("ModelParams: exactly one of sigma/gamma");
    if (T.has_value() == n.has_value())
        throw std::invalid_argument("ModelParams: exactly one of T/n");
    if (T && !(*T > 0.0)) throw std::invalid_argument("ModelParams: T must be > 0");
    if (n && *n == 0) throw std::invalid_argument("ModelParams: n must be >= 1");
    if (!(resolved_sigma() > 0.0))
        throw std::invalid_argument("ModelParams: sigma must be > 0");
    if (sigma_tilde && !(*sigma_tilde > 0.0))
        throw std::invalid_argument("ModelParams: sigma_tilde must be > 0");
    if (model == Model::markov && capacity_rule != CapacityRule::constant)
        throw std::invalid_argument("ModelParams: the markov model uses constant capacities");
}

namespace {

// Assemble and refine the node grid for log-density `logf` on
// [center-pi, center+pi). Seeds: window endpoints, the geometric ladder
// center +- sigma 2^j, a sigma/10-spaced core within +-50 sigma, and any
// caller-supplied knots. Panels are bisected until the trapezoid/midpoint
// discrepancy is below panel_rel_tol of the panel or below an absolute floor
// tied to the coarse total, or the spacing floor is hit.
DensityTable build_table(const std::function<double(double)>& logf, double center, double sigma,
                         const DensityOptions& opts, const std::vector<double>& extra_knots) {
    const double lo = center - kPi, hi = center + kPi;
    const double min_gap = opts.min_spacing_factor * sigma;

    // geometric ladder at ratio 2^{1/4} (a refinement of the doubling ladder;
    // keeps the seed-grid trapezoid within ~1e-4 of the refined integral)
    std::vector<double> seeds{lo, hi, center};
    for (double step = sigma; step < kPi; step *= 1.18920711500272107) {
        seeds.push_back(center + step);
        seeds.push_back(center - step);
    }
    const double core_step = 0.1 * sigma;
    const int core_n = static_cast<int>(opts.core_halfwidth / 0.1);
    for (int i = 1; i <= core_n; ++i) {
        seeds.push_back(center + i * core_step);
        seeds.push_back(center - i * core_step);
    }
    for (double k : extra_knots) seeds.push_back(center + std::remainder(k - center, kTwoPi));

    std::sort(seeds.begin(), seeds.end());
    std::vector<double> nodes;
    nodes.reserve(seeds.size());
    for (double sd : seeds) {
        if (sd < lo || sd > hi) continue;
        if (!nodes.empty() && sd - nodes.back() < 0.45 * min_gap) continue;
        nodes.push_back(sd);
    }
    if (nodes.back() != hi) nodes.push_back(hi);

    // log-density at the seed nodes; scale everything by its maximum
    std::vector<double> logs(nodes.size());
    double ref = -1e300;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        logs[i] = logf(nodes[i]);
        // -inf is a legitimate density zero; +inf and NaN are not
        if (!(logs[i] < 1e300)) throw DensityError("non-finite density", nodes[i]);
        ref = std::max(ref, logs[i]);
    }

    std::vector<double> vals(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) vals[i] = std::exp(logs[i] - ref);

    double coarse = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        coarse += 0.5 * (vals[i] + vals[i + 1]) * (nodes[i + 1] - nodes[i]);
    const double floor_abs = opts.floor_fraction * coarse;

    auto eval = [&](double th) {
        const double lg = logf(th);
        if (std::isnan(lg) || !(lg < 1e300)) throw DensityError("non-finite density", th);
        return std::exp(lg - ref);
    };

    // recursive bisection, emitting nodes in order
    std::vector<double> out_nodes{nodes[0]};
    std::vector<double> out_vals{vals[0]};
    std::function<void(double, double, double, double, int)> refine =
        [&](double a, double fa, double b, double fb, int depth) {
            const double width = b - a;
            if (width > min_gap && depth < opts.max_depth) {
                const double m = 0.5 * (a + b);
                const double fm = eval(m);
                const double trap = 0.5 * (fa + fb) * width;
                const double fine = 0.25 * (fa + 2.0 * fm + fb) * width;
                const double err = std::abs(fine - trap);
                if (err > opts.panel_rel_tol * std::abs(fine) && err > floor_abs) {
                    refine(a, fa, m, fm, depth + 1);
                    refine(m, fm, b, fb, depth + 1);
                    return;
                }
                out_nodes.push_back(m);
                out_vals.push_back(fm);
            }
            out_nodes.push_back(b);
            out_vals.push_back(fb);
        };
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i)
        refine(nodes[i], vals[i], nodes[i + 1], vals[i + 1], 0);

    DensityTable table;
    table.nodes = std::move(out_nodes);
    table.values = std::move(out_vals);
    table.log_scale = ref;
    table.z_scaled_coarse = coarse;
    table.window_center = center;
    table.sigma = sigma;

    table.cdf.resize(table.nodes.size());
    table.cdf[0] = 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < table.nodes.size(); ++i) {
        acc += 0.5 * (table.values[i] + table.values[i + 1]) *
               (table.nodes[i + 1] - table.nodes[i]);
        table.cdf[i + 1] = acc;
    }
    if (!(acc > 0.0)) throw DensityError("density integrates to zero", center);
    table.z_scaled = acc;
    table.log_Z = ref + std::log(acc);
    table.Z = std::exp(table.log_Z);
    for (double& cv : table.cdf) cv /= acc;
    table.cdf.back() = 1.0;
    return table;
}

}  // namespace

DensityTable build_density_slit(double t, double theta_prev, double eta, double sigma,
                                const DensityOptions& opts,
                                const std::vector<double>& extra_knots) {
    if (!(sigma > 0.0)) throw std::invalid_argument("build_density_slit: sigma must be > 0");
    if (t == 0.0 || eta == 0.0) {
        return build_table([](double) { return 0.0; }, theta_prev, sigma, opts, extra_knots);
    }
    const sg::SlitEval ev(sg::SlitParams::from_capacity(t));
    auto logf = [=](double th) {
        const LogPolarPoint z(sigma, wrap_angle(th - theta_prev));
        return -eta * sg::slit_map_deriv_log_abs(ev, z, sg::slit_map_logpolar(ev, z));
    };
    return build_table(logf, theta_prev, sigma, opts, extra_knots);
}

DensityTable build_density_ale(const cluster::ClusterState& state, const ModelParams& params,
                               const DensityOptions& opts) {
    const double sigma = params.resolved_sigma();
    const double center = state.empty() ? 0.0 : state.last_angle();
    if (state.empty() || params.eta == 0.0) {
        return build_table([](double) { return 0.0; }, center, sigma, opts, {});
    }
    std::vector<double> knots;
    knots.reserve(state.size());
    for (const auto& b : state.blocks()) knots.push_back(b.theta);
    const double eta = params.eta;
    auto logf = [&state, sigma, eta](double th) {
        return -eta * cl::map_deriv_log_abs(state, LogPolarPoint(sigma, th));
    };
    return build_table(logf, center, sigma, opts, knots);
}

DensityTable build_density_markov(std::size_t k, double theta_prev, const ModelParams& params,
                                  const DensityOptions& opts) {
    if (k < 1) throw std::invalid_argument("build_density_markov: k must be >= 1");
    const double t = params.c * static_cast<double>(k - 1);
    return build_density_slit(t, theta_prev, params.eta, params.resolved_sigma(), opts);
}

double sample(const DensityTable& table, double u) {
    if (!(u >= 0.0) || !(u < 1.0)) throw std::invalid_argument("sample: u must be in [0,1)");
    const auto it = std::upper_bound(table.cdf.begin(), table.cdf.end(), u);
    std::size_t i = static_cast<std::size_t>(it - table.cdf.begin());
    i = std::min(std::max<std::size_t>(i, 1), table.cdf.size() - 1) - 1;
    const double c0 = table.cdf[i], c1 = table.cdf[i + 1];
    if (!(c1 > c0)) return table.nodes[i];
    const double frac = (u - c0) / (c1 - c0);
    return table.nodes[i] + frac * (table.nodes[i + 1] - table.nodes[i]);
}

double density_moment(const DensityTable& table, int p, double x) {
    if (p != 1 && p != 2) throw std::invalid_argument("density_moment: p must be 1 or 2");
    if (!(x > 0.0) || x > kPi + 1e-15) throw std::invalid_argument("density_moment: need 0 < x <= pi");
    const double c = table.window_center;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < table.nodes.size(); ++i) {
        const double a0 = table.nodes[i], b0 = table.nodes[i + 1];
        if (b0 <= c - x || a0 >= c + x) continue;
        const double f0 = table.values[i], f1 = table.values[i + 1];
        // clip the panel at the moment window, interpolating the density
        auto interp = [&](double th) { return f0 + (f1 - f0) * (th - a0) / (b0 - a0); };
        const double a = std::max(a0, c - x), b = std::min(b0, c + x);
        const double fa = a == a0 ? f0 : interp(a);
        const double fb = b == b0 ? f1 : interp(b);
        const double ga = std::pow(a - c, p) * fa;
        const double gb = std::pow(b - c, p) * fb;
        acc += 0.5 * (ga + gb) * (b - a);
    }
    return acc / table.z_scaled;
}

double capacity_increment(const cluster::ClusterState& state, double theta,
                          const ModelParams& params) {
    const double c = params.c;
    switch (params.capacity_rule) {
        case CapacityRule::constant:
            return c;
        case CapacityRule::alpha_deriv: {
            if (params.alpha == 0.0 || state.empty()) return c;
            const double lg =
                cl::map_deriv_log_abs(state, LogPolarPoint(params.resolved_sigma(), theta));
            return c * std::exp(-params.alpha * lg);
        }
        case CapacityRule::deriv_squared: {
            if (state.empty()) return c;
            const double lg =
                cl::map_deriv_log_abs(state, LogPolarPoint(params.resolved_sigma_tilde(), theta));
            return c * std::exp(-2.0 * lg);
        }
        case CapacityRule::equal_slit: {
            const double prev = state.total_capacity();
            const double target = sg::length_from_capacity(prev) + sg::length_from_capacity(c);
            return sg::capacity_from_length(target) - prev;
        }
        case CapacityRule::fixed_image_length: {
            if (state.empty()) return c;
            const double dc = sg::length_from_capacity(c);
            auto g = [&](double d) {
                const double lg = cl::map_deriv_log_abs(state, LogPolarPoint(std::log1p(d), theta));
                return d * std::exp(lg) - dc;
            };
            // g(0+) = -d(c) < 0; scan geometrically for the first sign change
            double lo = dc * std::pow(2.0, -40);
            if (g(lo) > 0.0) throw BracketError("fixed-image-length: no bracket", 0.0, lo);
            double hi = lo;
            bool found = false;
            for (int j = 0; j < 64 && hi < 1e6; ++j) {
                hi = lo * 2.0;
                if (g(hi) > 0.0) {
                    found = true;
                    break;
                }
                lo = hi;
            }
            if (!found)
                throw BracketError("fixed-image-length: no sign change", dc * std::pow(2.0, -40), hi);
            for (int it = 0; it < 100; ++it) {
                const double mid = 0.5 * (lo + hi);
                if (g(mid) <= 0.0)
                    lo = mid;
                else
                    hi = mid;
                if ((hi - lo) <= 1e-12 * hi) break;
            }
            return sg::capacity_from_length(0.5 * (lo + hi));
        }
    }
    throw std::logic_error("capacity_increment: unhandled rule");
}

Trajectory run_model(const ModelParams& params, CounterRng& rng) {
    params.validate();
    Trajectory traj;
    traj.params = params;
    traj.seed = params.seed;

    const bool fixed_count = params.n.has_value();
    const bool constant_rule = params.capacity_rule == CapacityRule::constant;
    // N = floor(T/c) for constant increments; variable rules stop on predicted
    // total capacity, with a hard cap against runaway shrinking increments
    const std::size_t budget =
        fixed_count ? *params.n
                    : (constant_rule ? static_cast<std::size_t>(std::floor(*params.T / params.c))
                                     : static_cast<std::size_t>(100'000'000));

    cluster::ClusterState state;
    double theta_prev = 0.0;
    try {
        for (std::size_t k = 1; k <= budget; ++k) {
            DensityTable table =
                params.model == Model::markov
                    ? build_density_markov(k, theta_prev, params)
                    : build_density_ale(state, params);
            const double u = rng.next_double();
            double theta = sample(table, u);
            if (k == 1 && params.pin_theta1) theta = 0.0;
            const double ck = capacity_increment(state, theta, params);

            // variable-capacity rules stop at n(T) = sup{n : C_n < T}
            if (!fixed_count && !constant_rule && state.total_capacity() + ck >= *params.T) break;

            state.append_particle(theta, ck);
            traj.angles.push_back(theta);
            traj.capacities.push_back(ck);
            traj.slit_lengths.push_back(state.blocks().back().d);
            traj.base_angles.push_back(state.blocks().back().beta);
            traj.cum_capacity.push_back(state.total_capacity());
            traj.log_Z.push_back(table.log_Z);
            theta_prev = theta;
        }
    } catch (const std::exception& e) {
        traj.aborted = true;
        traj.abort_reason = e.what();
    }
    traj.omega = cluster::omega_event(traj.angles, sg::base_angle(params.c));
    return traj;
}

cluster::ClusterState state_from(const Trajectory& traj) {
    cluster::ClusterState st;
    for (std::size_t i = 0; i < traj.size(); ++i)
        st.append_particle(traj.angles[i], traj.capacities[i]);
    return st;
}

std::vector<std::size_t> annotate_parents(Trajectory& traj, double tol) {
    const cluster::ClusterState st = state_from(traj);
    traj.parents.assign(traj.size(), -1);
    std::vector<std::size_t> ambiguous;
    for (std::size_t j = 1; j <= traj.size(); ++j) {
        try {
            traj.parents[j - 1] = static_cast<long long>(cluster::parent_of(st, j, tol));
        } catch (const cluster::ParentAmbiguityError&) {
            ambiguous.push_back(j);
        } catch (const cluster::ParentClassificationError&) {
            ambiguous.push_back(j);
        }
    }
    return ambiguous;
}

}  // namespace ale::sampling
