#include "ale/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstring>

namespace ale::harness {

namespace sp = ale::sampling;
namespace cl = ale::cluster;
namespace sg = ale::slitgeom;
namespace lw = ale::loewner;

namespace {

std::uint64_t fnv1a(std::uint64_t h, const double* data, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &data[i], sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xff;
            h *= 0x100000001b3ull;
        }
    }
    return h;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Cell {
    double eta, c;
    std::optional<double> gamma, sigma;
};

std::vector<Cell> sweep_cells(const ExperimentConfig& config) {
    std::vector<Cell> cells;
    for (double eta : config.eta_values)
        for (double c : config.c_values) {
            if (!config.gamma_values.empty())
                for (double g : config.gamma_values) cells.push_back({eta, c, g, std::nullopt});
            else
                for (double s : config.sigma_values) cells.push_back({eta, c, std::nullopt, s});
        }
    return cells;
}

}  // namespace

PhaseReport run_phase_experiment(const ExperimentConfig& config) {
    config.validate();
    PhaseReport report;
    const std::vector<Cell> cells = sweep_cells(config);
    report.cells.resize(cells.size());

    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
        const Cell& cell = cells[ci];
        PhaseCell& out = report.cells[ci];
        out.eta = cell.eta;
        out.c = cell.c;
        out.gamma = cell.gamma ? *cell.gamma : std::nan("");
        out.replicas = config.replicas;
        const auto t0 = std::chrono::steady_clock::now();

        sp::ModelParams base;
        try {
            base = config.cell_params(cell.eta, cell.c, cell.gamma, cell.sigma);
            base.validate();
            out.beta_c = sg::base_angle(cell.c);
            out.sigma = base.resolved_sigma();
        } catch (const std::exception& e) {
            out.failed = true;
            out.error = e.what();
            continue;
        }

        std::vector<char> omega(config.replicas, 0);
        std::vector<double> sup_gap(config.replicas, 0.0);
        std::vector<sp::Trajectory> trajs(config.replicas);
        std::vector<std::string> errors(config.replicas);

        parallel_for(config.replicas, config.threads, [&](std::size_t r) {
            sp::ModelParams p = base;
            p.seed = CounterRng::derive(CounterRng::derive(config.seed, ci), r);
            CounterRng rng(p.seed);
            sp::Trajectory traj = sp::run_model(p, rng);
            if (traj.aborted) {
                errors[r] = traj.abort_reason;
                return;
            }
            omega[r] = traj.omega ? 1 : 0;
            double gap = 0.0;
            for (std::size_t j = 1; j < traj.angles.size(); ++j)
                gap = std::max(gap, std::abs(traj.angles[j] - traj.angles[j - 1]));
            sup_gap[r] = gap;
            trajs[r] = std::move(traj);
        });

        for (std::size_t r = 0; r < config.replicas; ++r) {
            if (!errors[r].empty()) {
                out.failed = true;
                out.error = errors[r];
            }
        }
        if (out.failed) {
            out.runtime_s = elapsed_s(t0);
            continue;
        }

        std::uint64_t digest = 0xcbf29ce484222325ull;
        double gap_sum = 0.0;
        for (std::size_t r = 0; r < config.replicas; ++r) {
            out.omega_count += omega[r];
            gap_sum += sup_gap[r];
            digest = fnv1a(digest, trajs[r].angles.data(), trajs[r].angles.size());
            digest = fnv1a(digest, trajs[r].capacities.data(), trajs[r].capacities.size());
        }
        out.omega_freq = static_cast<double>(out.omega_count) / config.replicas;
        out.ci = wilson_interval(out.omega_count, config.replicas);
        out.mean_sup_gap = gap_sum / config.replicas;
        out.traj_digest = digest;
        out.runtime_s = elapsed_s(t0);
    }
    return report;
}

MomentReport run_moment_experiment(const ExperimentConfig& config) {
    MomentReport report;
    report.t = config.moment_t;
    const double x = sg::base_angle(config.moment_t) / 2.0;

    std::vector<double> sigmas;
    const std::size_t steps = std::max<std::size_t>(config.sigma_steps, 2);
    for (std::size_t i = 0; i < steps; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(steps - 1);
        sigmas.push_back(config.sigma_min * std::pow(config.sigma_max / config.sigma_min, f));
    }

    for (double eta : config.eta_values) {
        std::vector<double> lsig, lz, lm2, m2s;
        for (double sigma : sigmas) {
            const sp::DensityTable table = sp::build_density_slit(config.moment_t, 0.0, eta, sigma);
            const double m2 = sp::density_moment(table, 2, x);
            report.rows.push_back({eta, sigma, table.log_Z, m2, x});
            lsig.push_back(std::log(sigma));
            lz.push_back(table.log_Z);
            lm2.push_back(std::log(m2));
            m2s.push_back(m2);
        }
        MomentSummary s;
        s.eta = eta;
        const LineFit zf = fit_line(lsig, lz);
        s.z_slope = zf.slope;
        s.z_slope_residual = zf.rms_residual;
        double zmin = 1e300, zmax = -1e300;
        for (double v : lz) {
            zmin = std::min(zmin, v);
            zmax = std::max(zmax, v);
        }
        s.z_max_over_min = std::exp(zmax - zmin);
        s.m2_slope = fit_line(lsig, lm2).slope;
        double blo = 1e300, bhi = 0.0, llo = 1e300, lhi = 0.0;
        for (std::size_t i = 0; i < sigmas.size(); ++i) {
            const double r = m2s[i] / (sigmas[i] * sigmas[i]);
            blo = std::min(blo, r);
            bhi = std::max(bhi, r);
            const double rl = r / std::log(x / sigmas[i]);
            llo = std::min(llo, rl);
            lhi = std::max(lhi, rl);
        }
        s.m2_bracket = bhi / blo;
        s.m2_log_bracket = lhi / llo;
        report.summaries.push_back(s);
    }
    return report;
}

double slit_convergence_gap(const sp::Trajectory& traj, double radius, std::size_t rays) {
    if (traj.angles.empty()) return 0.0;
    const double th1 = traj.angles.front();
    cl::ClusterState state;
    double gap = 0.0;
    const double logr = std::log(radius);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        state.append_particle(traj.angles[k], traj.capacities[k]);
        const double t = state.total_capacity();
        for (std::size_t i = 0; i < rays; ++i) {
            const double ang = -kPi + kTwoPi * static_cast<double>(i) / static_cast<double>(rays);
            const LogPolarPoint z(logr, ang);
            const cplx lhs = cl::map_point(state, z);
            const cplx rhs = std::polar(1.0, th1) *
                             sg::slit_map(t, LogPolarPoint(logr, wrap_angle(ang - th1)));
            gap = std::max(gap, std::abs(lhs - rhs));
        }
    }
    return gap;
}

ConvergenceReport run_convergence_experiment(const ExperimentConfig& config) {
    config.validate();
    ConvergenceReport report;
    report.radius = config.radius;
    report.rays = config.rays;
    const double eta = config.eta_values.front();
    const std::optional<double> gamma =
        config.gamma_values.empty() ? std::nullopt : std::optional<double>(config.gamma_values.front());
    const std::optional<double> sigma =
        config.sigma_values.empty() ? std::nullopt : std::optional<double>(config.sigma_values.front());

    for (std::size_t ci = 0; ci < config.c_values.size(); ++ci) {
        const double c = config.c_values[ci];
        sp::ModelParams base = config.cell_params(eta, c, gamma, sigma);
        base.validate();

        std::vector<ConvergenceRun> runs(config.replicas);
        parallel_for(config.replicas, config.threads, [&](std::size_t r) {
            sp::ModelParams p = base;
            p.seed = CounterRng::derive(CounterRng::derive(config.seed, ci), r);
            CounterRng rng(p.seed);
            const sp::Trajectory traj = sp::run_model(p, rng);
            ConvergenceRun& run = runs[r];
            run.c = c;
            run.sigma = p.resolved_sigma();
            if (traj.aborted) {
                run.failed = true;
                return;
            }
            run.omega = traj.omega;
            run.sup_gap = slit_convergence_gap(traj, config.radius, config.rays);
        });

        ConvergenceCellSummary cell;
        cell.c = c;
        std::vector<double> all, om;
        for (const ConvergenceRun& r : runs) {
            if (r.failed) continue;
            ++cell.runs;
            all.push_back(r.sup_gap);
            if (r.omega) {
                ++cell.omega_runs;
                om.push_back(r.sup_gap);
            }
            report.runs.push_back(r);
        }
        cell.median_gap_all = median(all);
        cell.median_gap_omega = median(om);
        report.cells.push_back(cell);
    }
    return report;
}

namespace {

RatioStats ratio_stats(std::vector<double> v) {
    RatioStats s;
    s.count = v.size();
    if (v.empty()) return s;
    s.med = median(v);
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    return s;
}

lw::DrivingFunction random_driver(CounterRng& rng, double amplitude, double T) {
    const int n = 1 + static_cast<int>(rng.next_u64() % 16);
    std::vector<double> caps(n), vals(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        caps[i] = rng.uniform(0.2, 1.0);
        total += caps[i];
        vals[i] = rng.uniform(-amplitude, amplitude);
    }
    for (double& cv : caps) cv *= 1.25 * T / total;
    return lw::DrivingFunction::from_blocks(vals, caps);
}

}  // namespace

EstimateReport run_estimate_checks(const ExperimentConfig& config) {
    EstimateReport report;
    report.cases = config.cases;
    const double tol = 1e-10;
    const bool do_tip = config.estimates_kind != "away";
    const bool do_away = config.estimates_kind != "tip";

    std::vector<double> tip_ratios, away_ratios, lower_ratios, away_radial;

    for (std::size_t i = 0; i < config.cases; ++i) {
        CounterRng rng(CounterRng::derive(CounterRng::derive(config.seed, 0x9d), i));
        const bool tip_case = do_tip && (!do_away || i % 2 == 0);

        if (tip_case) {
            const double T = config.estimates_T ? *config.estimates_T : rng.uniform(0.05, 1.0);
            const double r = rng.uniform(1.05, 1.9);
            const double budget = std::exp(-T) * (r - 1.0) / 100.0;
            const double argz = rng.uniform(-0.4, 0.4) * budget;
            const double amp = rng.uniform(0.1, 0.9) * (budget - std::abs(argz));
            const lw::DrivingFunction xi = random_driver(rng, std::max(amp, 0.0), T);
            const LogPolarPoint z(std::log(r), argz);
            const lw::TipCheckReport rep = lw::check_tip_estimate(xi, z, T, tol);
            if (!rep.admissible) continue;
            ++report.tip_admissible;
            report.tip_arg_violations += rep.arg_violation ? 1 : 0;
            report.tip_radial_violations += rep.radial_violation ? 1 : 0;
            const lw::DerivRatioReport dr = lw::deriv_ratio_monitor(xi, z, T, tol);
            tip_ratios.push_back(dr.tip_log_ratio);
            lower_ratios.push_back(dr.lower_bound_ratio);
        } else if (do_away) {
            const double th = rng.uniform(0.3, 2.7) * (rng.next_double() < 0.5 ? -1.0 : 1.0);
            const double lifetime = lw::angular_lifetime(th);
            const double T =
                config.estimates_T ? *config.estimates_T : rng.uniform(0.1, 0.9) * std::min(1.0, lifetime);
            if (T > lifetime) continue;  // inadmissible by construction
            const double v0 = lw::reference_angular(std::abs(th), T);
            const double budget =
                2.0 * std::pow(std::sin(0.5 * v0), 2) / (100.0 * std::sqrt(std::expm1(T)));
            const double s = rng.uniform(0.05, 0.45) * budget;
            const lw::DrivingFunction xi = random_driver(rng, 0.45 * budget, T);
            const LogPolarPoint z(std::log1p(s), th);
            const lw::AwayCheckReport rep = lw::check_away_estimate(xi, z, T, tol);
            if (!rep.admissible) continue;
            ++report.away_admissible;
            report.away_angular_violations += rep.angular_violation ? 1 : 0;
            away_radial.push_back(rep.radial_log_ratio);
            const lw::DerivRatioReport dr = lw::deriv_ratio_monitor(xi, z, T, tol);
            away_ratios.push_back(dr.away_log_ratio);
            lower_ratios.push_back(dr.lower_bound_ratio);
        }
    }

    report.vacuous = (report.tip_admissible + report.away_admissible) == 0;
    report.tip_log_ratio = ratio_stats(std::move(tip_ratios));
    report.away_log_ratio = ratio_stats(std::move(away_ratios));
    report.lower_bound_ratio = ratio_stats(std::move(lower_ratios));
    report.away_radial_log_ratio = ratio_stats(std::move(away_radial));
    return report;
}

}  // namespace ale::harness
