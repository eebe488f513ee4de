#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ale/sampling.hpp"

namespace ale::harness {

// One configuration drives every subcommand; unused fields are ignored by the
// experiments that do not need them. JSON round-trips exactly (the echo that
// lands in report.json regenerates the run).
struct ExperimentConfig {
    std::string experiment = "simulate";  // simulate|phase|moments|converge|estimates|trace
    std::string model = "ale";
    double alpha = 0.0;
    std::vector<double> eta_values{4.0};
    std::vector<double> c_values{1e-3};
    std::vector<double> gamma_values;  // sigma = c^gamma per cell
    std::vector<double> sigma_values;  // alternative to gamma_values
    std::optional<double> T;
    std::optional<std::size_t> n;
    std::string capacity_rule = "constant";
    std::optional<double> sigma_tilde;
    std::size_t replicas = 1;
    int threads = 1;
    std::uint64_t seed = 1;
    bool pin_theta1 = false;
    bool with_parents = true;
    std::string output_dir = "out";

    // converge
    double radius = 2.0;
    std::size_t rays = 256;

    // estimates
    std::size_t cases = 500;
    std::string estimates_kind = "both";  // both|tip|away
    std::optional<double> estimates_T;

    // trace / rendering
    std::size_t target_points = 2000;
    double refine_tol = 0.01;

    // moments (pure quadrature)
    double moment_t = 0.01;
    double sigma_min = 1e-6;
    double sigma_max = 1e-3;
    std::size_t sigma_steps = 7;

    // Assemble per-run model parameters for one sweep cell.
    sampling::ModelParams cell_params(double eta, double c, std::optional<double> gamma,
                                      std::optional<double> sigma) const;

    void validate() const;

    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_json_file(const std::string& path);
};

// Minimal regularization exponent from the phase-transition statements:
// markov: (eta+1)/(2(eta-1)); ale: (2(lambda+1)eta+1)/(2(eta-1)) with
// lambda = 1/(eta-1) on 1 < eta < 3 and 1/2 for eta >= 3.
double gamma_threshold(double eta, sampling::Model model);

}  // namespace ale::harness
