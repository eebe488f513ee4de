#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ale/harness/config.hpp"
#include "ale/harness/stats.hpp"
#include "ale/loewner.hpp"
#include "ale/sampling.hpp"

namespace ale::harness {

struct PhaseCell {
    double eta = 0.0;
    double c = 0.0;
    double gamma = 0.0;  // NaN when sigma was given directly
    double sigma = 0.0;
    double beta_c = 0.0;
    std::size_t replicas = 0;
    std::size_t omega_count = 0;
    double omega_freq = 0.0;
    WilsonInterval ci{0.0, 0.0};
    double mean_sup_gap = 0.0;
    std::uint64_t traj_digest = 0;  // FNV over all sampled bits, replica order
    double runtime_s = 0.0;
    bool failed = false;
    std::string error;
};

struct PhaseReport {
    std::vector<PhaseCell> cells;
};

PhaseReport run_phase_experiment(const ExperimentConfig& config);

struct MomentRow {
    double eta = 0.0;
    double sigma = 0.0;
    double log_Z = 0.0;
    double second_moment = 0.0;
    double x = 0.0;  // moment window half-width (beta_t/2)
};

struct MomentSummary {
    double eta = 0.0;
    double z_slope = 0.0;
    double z_slope_residual = 0.0;
    double z_max_over_min = 0.0;
    double m2_slope = 0.0;
    double m2_bracket = 0.0;      // max/min of m2/sigma^2 over the sweep
    double m2_log_bracket = 0.0;  // max/min of m2/(sigma^2 log(x/sigma))
};

struct MomentReport {
    double t = 0.0;
    std::vector<MomentRow> rows;
    std::vector<MomentSummary> summaries;
};

MomentReport run_moment_experiment(const ExperimentConfig& config);

struct ConvergenceRun {
    double c = 0.0;
    double sigma = 0.0;
    double sup_gap = 0.0;
    bool omega = false;
    bool failed = false;
};

struct ConvergenceCellSummary {
    double c = 0.0;
    std::size_t runs = 0;
    std::size_t omega_runs = 0;
    double median_gap_all = 0.0;
    double median_gap_omega = 0.0;  // NaN if no omega runs
};

struct ConvergenceReport {
    double radius = 0.0;
    std::size_t rays = 0;
    std::vector<ConvergenceRun> runs;
    std::vector<ConvergenceCellSummary> cells;
};

ConvergenceReport run_convergence_experiment(const ExperimentConfig& config);

struct RatioStats {
    double min = 0.0;
    double med = 0.0;
    double max = 0.0;
    std::size_t count = 0;
};

struct EstimateReport {
    std::size_t cases = 0;
    std::size_t tip_admissible = 0;
    std::size_t away_admissible = 0;
    std::size_t tip_arg_violations = 0;
    std::size_t tip_radial_violations = 0;
    std::size_t away_angular_violations = 0;
    bool vacuous = false;  // no admissible case survived the screen
    RatioStats tip_log_ratio;
    RatioStats away_log_ratio;
    RatioStats lower_bound_ratio;
    RatioStats away_radial_log_ratio;
};

EstimateReport run_estimate_checks(const ExperimentConfig& config);

// sup over the jump-time grid and `rays` points of |z| = radius of
// |Phi_{n(t)}(z) - e^{i theta_1} f_t(e^{-i theta_1} z)|.
double slit_convergence_gap(const sampling::Trajectory& traj, double radius, std::size_t rays);

}  // namespace ale::harness
