#include "ale/harness/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

namespace ale::harness {

using nlohmann::json;

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string json_escape(const std::string& s) { return json(s).dump(); }

void ensure_directory(const std::string& path) {
    std::filesystem::create_directories(path);
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    return out;
}

json stats_json(const RatioStats& s) {
    return json{{"min", s.min}, {"median", s.med}, {"max", s.max}, {"count", s.count}};
}

double sanitize(double v) { return std::isfinite(v) ? v : std::nan(""); }

}  // namespace

void write_trajectory_csv(const std::string& path, const sampling::Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "step,theta,c,d,beta,C_cum,parent\n";
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const long long parent = i < traj.parents.size() ? traj.parents[i] : -1;
        out << (i + 1) << ',' << format_full(traj.angles[i]) << ','
            << format_full(traj.capacities[i]) << ',' << format_full(traj.slit_lengths[i]) << ','
            << format_full(traj.base_angles[i]) << ',' << format_full(traj.cum_capacity[i]) << ','
            << parent << '\n';
    }
}

void write_report_json(const std::string& path, const ExperimentConfig& config,
                       const std::string& results_json) {
    std::ofstream out = open_out(path);
    out << "{\n\"config\": " << config.to_json() << ",\n\"seed\": " << config.seed
        << ",\n\"results\": " << results_json << "\n}\n";
}

void write_timing_json(const std::string& path,
                       const std::vector<std::pair<std::string, double>>& timings) {
    json j;
    for (const auto& [k, v] : timings) j[k] = v;
    std::ofstream out = open_out(path);
    out << j.dump(2) << "\n";
}

void write_phase_csv(const std::string& path, const PhaseReport& report) {
    std::ofstream out = open_out(path);
    out << "eta,c,gamma,sigma,beta_c,replicas,omega_count,omega_freq,wilson_lo,wilson_hi,"
           "mean_sup_gap,failed\n";
    for (const PhaseCell& cell : report.cells) {
        out << format_full(cell.eta) << ',' << format_full(cell.c) << ','
            << format_full(cell.gamma) << ',' << format_full(cell.sigma) << ','
            << format_full(cell.beta_c) << ',' << cell.replicas << ',' << cell.omega_count << ','
            << format_full(cell.omega_freq) << ',' << format_full(cell.ci.lo) << ','
            << format_full(cell.ci.hi) << ',' << format_full(cell.mean_sup_gap) << ','
            << (cell.failed ? 1 : 0) << '\n';
    }
}

void write_converge_csv(const std::string& path, const ConvergenceReport& report) {
    std::ofstream out = open_out(path);
    out << "c,sigma,sup_gap,omega\n";
    for (const ConvergenceRun& r : report.runs) {
        out << format_full(r.c) << ',' << format_full(r.sigma) << ',' << format_full(r.sup_gap)
            << ',' << (r.omega ? 1 : 0) << '\n';
    }
}

void write_moments_csv(const std::string& path, const MomentReport& report) {
    std::ofstream out = open_out(path);
    out << "eta,sigma,log_Z,second_moment,x\n";
    for (const MomentRow& r : report.rows) {
        out << format_full(r.eta) << ',' << format_full(r.sigma) << ',' << format_full(r.log_Z)
            << ',' << format_full(r.second_moment) << ',' << format_full(r.x) << '\n';
    }
}

std::string phase_report_json(const PhaseReport& report) {
    json cells = json::array();
    for (const PhaseCell& c : report.cells) {
        cells.push_back(json{{"eta", c.eta},
                             {"c", c.c},
                             {"gamma", sanitize(c.gamma)},
                             {"sigma", c.sigma},
                             {"beta_c", c.beta_c},
                             {"replicas", c.replicas},
                             {"omega_count", c.omega_count},
                             {"omega_freq", c.omega_freq},
                             {"wilson_lo", c.ci.lo},
                             {"wilson_hi", c.ci.hi},
                             {"mean_sup_gap", c.mean_sup_gap},
                             {"traj_digest", c.traj_digest},
                             {"failed", c.failed},
                             {"error", c.error}});
    }
    return json{{"cells", cells}}.dump(1);
}

std::string moment_report_json(const MomentReport& report) {
    json rows = json::array(), summaries = json::array();
    for (const MomentRow& r : report.rows)
        rows.push_back(json{{"eta", r.eta},
                            {"sigma", r.sigma},
                            {"log_Z", r.log_Z},
                            {"second_moment", r.second_moment},
                            {"x", r.x}});
    for (const MomentSummary& s : report.summaries)
        summaries.push_back(json{{"eta", s.eta},
                                 {"z_slope", s.z_slope},
                                 {"z_slope_residual", s.z_slope_residual},
                                 {"z_max_over_min", s.z_max_over_min},
                                 {"m2_slope", s.m2_slope},
                                 {"m2_bracket", s.m2_bracket},
                                 {"m2_log_bracket", s.m2_log_bracket}});
    return json{{"t", report.t}, {"rows", rows}, {"summaries", summaries}}.dump(1);
}

std::string convergence_report_json(const ConvergenceReport& report) {
    json cells = json::array();
    for (const ConvergenceCellSummary& c : report.cells)
        cells.push_back(json{{"c", c.c},
                             {"runs", c.runs},
                             {"omega_runs", c.omega_runs},
                             {"median_gap_all", sanitize(c.median_gap_all)},
                             {"median_gap_omega", sanitize(c.median_gap_omega)}});
    return json{{"radius", report.radius}, {"rays", report.rays}, {"cells", cells}}.dump(1);
}

std::string estimate_report_json(const EstimateReport& report) {
    json j{{"cases", report.cases},
           {"tip_admissible", report.tip_admissible},
           {"away_admissible", report.away_admissible},
           {"tip_arg_violations", report.tip_arg_violations},
           {"tip_radial_violations", report.tip_radial_violations},
           {"away_angular_violations", report.away_angular_violations},
           {"vacuous", report.vacuous},
           {"note", report.vacuous ? "no admissible cases" : "admissible cases checked"},
           {"tip_log_ratio", stats_json(report.tip_log_ratio)},
           {"away_log_ratio", stats_json(report.away_log_ratio)},
           {"lower_bound_ratio", stats_json(report.lower_bound_ratio)},
           {"away_radial_log_ratio", stats_json(report.away_radial_log_ratio)}};
    return j.dump(1);
}

std::string trajectory_summary_json(const sampling::Trajectory& traj) {
    json j{{"n", traj.size()},
           {"omega", traj.omega},
           {"aborted", traj.aborted},
           {"abort_reason", traj.abort_reason},
           {"seed", traj.seed},
           {"total_capacity", traj.cum_capacity.empty() ? 0.0 : traj.cum_capacity.back()}};
    if (!traj.angles.empty()) {
        j["theta1"] = traj.angles.front();
        double gap = 0.0;
        for (std::size_t i = 1; i < traj.angles.size(); ++i)
            gap = std::max(gap, std::abs(traj.angles[i] - traj.angles[i - 1]));
        j["max_consecutive_gap"] = gap;
    }
    return j.dump(1);
}

}  // namespace ale::harness
