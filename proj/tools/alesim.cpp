// Command-line front end: simulate | phase | moments | converge | estimates | trace.
// Every run writes report.json (config echo + seed + results) into --out; the
// estimate checks drive the exit code per their zero-violation contract.

#include <chrono>
#include <cstdio>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ale/harness/config.hpp"
#include "ale/harness/experiments.hpp"
#include "ale/harness/io.hpp"
#include "ale/harness/svg.hpp"

namespace hn = ale::harness;
namespace sp = ale::sampling;

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    bool pin_theta1 = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON config file");
    cmd->add_option("--out", flags.out_dir, "output directory");
    cmd->add_option("--seed", flags.seed, "master seed");
    cmd->add_option("--threads", flags.threads, "replica worker threads");
    cmd->add_flag("--pin-theta1", flags.pin_theta1, "fix the first angle to 0");
}

hn::ExperimentConfig load_config(const CommonFlags& flags, const std::string& experiment) {
    hn::ExperimentConfig config;
    if (!flags.config_path.empty())
        config = hn::ExperimentConfig::from_json_file(flags.config_path);
    config.experiment = experiment;
    if (!flags.out_dir.empty()) config.output_dir = flags.out_dir;
    if (flags.seed) config.seed = *flags.seed;
    if (flags.threads) config.threads = *flags.threads;
    if (flags.pin_theta1) config.pin_theta1 = true;
    if (config.gamma_values.empty() && config.sigma_values.empty())
        config.gamma_values = {2.0};
    if (!config.T && !config.n) config.T = 0.05;
    return config;
}

double run_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

sp::Trajectory simulate_one(const hn::ExperimentConfig& config) {
    const auto cell = config.cell_params(
        config.eta_values.front(), config.c_values.front(),
        config.gamma_values.empty() ? std::nullopt
                                    : std::optional<double>(config.gamma_values.front()),
        config.sigma_values.empty() ? std::nullopt
                                    : std::optional<double>(config.sigma_values.front()));
    auto p = cell;
    p.seed = ale::CounterRng::derive(config.seed, 0);
    ale::CounterRng rng(p.seed);
    return sp::run_model(p, rng);
}

int cmd_simulate(const hn::ExperimentConfig& config, bool with_trace) {
    const auto t0 = std::chrono::steady_clock::now();
    hn::ensure_directory(config.output_dir);
    sp::Trajectory traj = simulate_one(config);

    std::vector<std::size_t> ambiguous;
    if (config.with_parents && !traj.aborted) ambiguous = sp::annotate_parents(traj);
    hn::write_trajectory_csv(config.output_dir + "/trajectory.csv", traj);

    std::string results = hn::trajectory_summary_json(traj);
    if (with_trace && !traj.aborted) {
        const auto state = sp::state_from(traj);
        const auto trace =
            ale::cluster::boundary_trace(state, config.target_points, config.refine_tol);
        hn::write_cluster_svg(config.output_dir + "/cluster.svg", trace.points);
        hn::write_angles_svg(config.output_dir + "/angles.svg", traj.angles);
        const double aspect = hn::principal_aspect_ratio(trace.points);
        results.pop_back();  // strip the closing brace and extend
        results += ",\n\"trace_points\": " + std::to_string(trace.points.size()) +
                   ",\n\"trace_flagged\": " + std::to_string(trace.flagged) +
                   ",\n\"growth_aspect_ratio\": " + hn::format_full(aspect) + "\n}";
    }
    hn::write_report_json(config.output_dir + "/report.json", config, results);
    hn::write_timing_json(config.output_dir + "/timing.json", {{"total_s", run_seconds(t0)}});

    std::printf("%s: n=%zu omega=%d%s ambiguous_parents=%zu\n", with_trace ? "trace" : "simulate",
                traj.size(), traj.omega ? 1 : 0, traj.aborted ? " ABORTED" : "",
                ambiguous.size());
    if (traj.aborted) {
        std::fprintf(stderr, "aborted: %s\n", traj.abort_reason.c_str());
        return 1;
    }
    return 0;
}

int cmd_phase(const hn::ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    hn::ensure_directory(config.output_dir);
    const hn::PhaseReport report = hn::run_phase_experiment(config);
    hn::write_phase_csv(config.output_dir + "/phase.csv", report);
    hn::write_report_json(config.output_dir + "/report.json", config,
                          hn::phase_report_json(report));
    std::vector<std::pair<std::string, double>> timings{{"total_s", run_seconds(t0)}};
    bool ok = true;
    for (const auto& cell : report.cells) {
        timings.emplace_back("cell_eta" + std::to_string(cell.eta) + "_c" + std::to_string(cell.c),
                             cell.runtime_s);
        std::printf("phase eta=%g c=%g sigma=%.3g: omega %zu/%zu = %.3f [%.3f, %.3f]%s\n",
                    cell.eta, cell.c, cell.sigma, cell.omega_count, cell.replicas, cell.omega_freq,
                    cell.ci.lo, cell.ci.hi, cell.failed ? " FAILED" : "");
        if (cell.failed) {
            ok = false;
            std::fprintf(stderr, "cell error: %s\n", cell.error.c_str());
        }
    }
    hn::write_timing_json(config.output_dir + "/timing.json", timings);
    return ok ? 0 : 1;
}

int cmd_moments(const hn::ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    hn::ensure_directory(config.output_dir);
    const hn::MomentReport report = hn::run_moment_experiment(config);
    hn::write_moments_csv(config.output_dir + "/moments.csv", report);
    hn::write_report_json(config.output_dir + "/report.json", config,
                          hn::moment_report_json(report));
    hn::write_timing_json(config.output_dir + "/timing.json", {{"total_s", run_seconds(t0)}});
    for (const auto& s : report.summaries)
        std::printf("moments eta=%g: Z slope %.4f (rms %.2e), m2 slope %.4f, brackets %.2f / %.2f\n",
                    s.eta, s.z_slope, s.z_slope_residual, s.m2_slope, s.m2_bracket,
                    s.m2_log_bracket);
    return 0;
}

int cmd_converge(const hn::ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    hn::ensure_directory(config.output_dir);
    const hn::ConvergenceReport report = hn::run_convergence_experiment(config);
    hn::write_converge_csv(config.output_dir + "/converge.csv", report);
    hn::write_report_json(config.output_dir + "/report.json", config,
                          hn::convergence_report_json(report));
    hn::write_timing_json(config.output_dir + "/timing.json", {{"total_s", run_seconds(t0)}});
    for (const auto& cell : report.cells)
        std::printf("converge c=%g: median gap %.4g (omega runs %zu/%zu: %.4g)\n", cell.c,
                    cell.median_gap_all, cell.omega_runs, cell.runs, cell.median_gap_omega);
    return 0;
}

int cmd_estimates(const hn::ExperimentConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    hn::ensure_directory(config.output_dir);
    const hn::EstimateReport report = hn::run_estimate_checks(config);
    hn::write_report_json(config.output_dir + "/report.json", config,
                          hn::estimate_report_json(report));
    hn::write_timing_json(config.output_dir + "/timing.json", {{"total_s", run_seconds(t0)}});
    if (report.vacuous) {
        std::printf("estimates: no admissible cases\n");
        return 1;
    }
    const std::size_t violations = report.tip_arg_violations + report.tip_radial_violations +
                                   report.away_angular_violations;
    std::printf("estimates: %zu tip + %zu away admissible, %zu violations\n",
                report.tip_admissible, report.away_admissible, violations);
    return violations == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ALE(alpha,eta) conformal aggregation laboratory"};
    app.require_subcommand(1);

    CommonFlags flags;
    CLI::App* simulate = app.add_subcommand("simulate", "run one trajectory");
    CLI::App* phase = app.add_subcommand("phase", "omega-frequency sweep over (eta, c, gamma)");
    CLI::App* moments = app.add_subcommand("moments", "quadrature scaling of Z and moments");
    CLI::App* converge = app.add_subcommand("converge", "sup-distance to the single-slit map");
    CLI::App* estimates = app.add_subcommand("estimates", "randomized Loewner estimate checks");
    CLI::App* trace = app.add_subcommand("trace", "simulate and render cluster/angle SVGs");
    for (CLI::App* cmd : {simulate, phase, moments, converge, estimates, trace})
        add_common(cmd, flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) return cmd_simulate(load_config(flags, "simulate"), false);
        if (trace->parsed()) return cmd_simulate(load_config(flags, "trace"), true);
        if (phase->parsed()) return cmd_phase(load_config(flags, "phase"));
        if (moments->parsed()) return cmd_moments(load_config(flags, "moments"));
        if (converge->parsed()) return cmd_converge(load_config(flags, "converge"));
        if (estimates->parsed()) return cmd_estimates(load_config(flags, "estimates"));
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 2;
}
