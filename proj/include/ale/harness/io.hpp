#pragma once

#include <string>
#include <vector>

#include "ale/harness/experiments.hpp"
#include "ale/sampling.hpp"

namespace ale::harness {

// trajectory.csv: step,theta,c,d,beta,C_cum,parent with 17 significant
// digits; parent is -1 when not computed or ambiguous.
void write_trajectory_csv(const std::string& path, const sampling::Trajectory& traj);

// report.json: {"config": <echo>, "seed": ..., "results": <payload>}.
// Deterministic for fixed (config, seed); timings belong in timing.json.
void write_report_json(const std::string& path, const ExperimentConfig& config,
                       const std::string& results_json);

void write_timing_json(const std::string& path, const std::vector<std::pair<std::string, double>>& timings);

void write_phase_csv(const std::string& path, const PhaseReport& report);
void write_converge_csv(const std::string& path, const ConvergenceReport& report);
void write_moments_csv(const std::string& path, const MomentReport& report);

std::string json_escape(const std::string& s);
std::string format_full(double v);  // 17 significant digits

void ensure_directory(const std::string& path);

std::string phase_report_json(const PhaseReport& report);
std::string moment_report_json(const MomentReport& report);
std::string convergence_report_json(const ConvergenceReport& report);
std::string estimate_report_json(const EstimateReport& report);
std::string trajectory_summary_json(const sampling::Trajectory& traj);

}  // namespace ale::harness
