#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ale/cluster.hpp"
#include "ale/rng.hpp"

namespace ale::sampling {

enum class Model { ale, markov };

enum class CapacityRule { constant, alpha_deriv, equal_slit, deriv_squared, fixed_image_length };

const char* to_string(Model m);
const char* to_string(CapacityRule r);
Model model_from_string(const std::string& s);
CapacityRule capacity_rule_from_string(const std::string& s);

struct ModelParams {
    Model model = Model::ale;
    double alpha = 0.0;
    double eta = 0.0;
    double c = 1e-3;                    // base capacity
    std::optional<double> sigma;        // exactly one of sigma / gamma
    std::optional<double> gamma;        // sigma = c^gamma
    std::optional<double> T;            // exactly one of T / n
    std::optional<std::size_t> n;
    CapacityRule capacity_rule = CapacityRule::constant;
    std::optional<double> sigma_tilde;  // capacity-rule regularization; defaults to sigma
    std::uint64_t seed = 0;
    bool pin_theta1 = false;

    double resolved_sigma() const;
    double resolved_sigma_tilde() const { return sigma_tilde ? *sigma_tilde : resolved_sigma(); }
    void validate() const;
};

struct DensityError : std::runtime_error {
    double theta;
    DensityError(const std::string& what, double theta_)
        : std::runtime_error(what + " at theta = " + std::to_string(theta_)), theta(theta_) {}
};

// Node grid, tabulated density (up to the positive factor e^{log_scale}),
// normalization and piecewise-linear CDF for one sampling window
// [center - pi, center + pi).
struct DensityTable {
    std::vector<double> nodes;
    std::vector<double> values;  // density * exp(-log_scale), >= 0
    std::vector<double> cdf;     // normalized, cdf.front()=0, cdf.back()=1
    double log_scale = 0.0;
    double z_scaled = 0.0;         // integral of `values` over the window
    double z_scaled_coarse = 0.0;  // seed-grid trapezoid, for consistency checks
    double log_Z = 0.0;            // log of the raw normalization
    double Z = 0.0;                // exp(log_Z); may overflow to inf for extreme eta
    double window_center = 0.0;
    double sigma = 0.0;
};

struct DensityOptions {
    double panel_rel_tol = 1e-4;      // per-panel refinement target
    double min_spacing_factor = 1e-3; // times sigma
    double core_halfwidth = 50.0;     // sigmas, resolved at sigma/10
    double floor_fraction = 1e-7;     // absolute acceptance floor, times coarse Z
    int max_depth = 40;
};

// density ~ |f'_t(e^{sigma + i(theta - theta_prev)})|^{-eta} for a single slit
// of capacity t; the common kernel behind the markov builder and the moment
// experiments. t = 0 or eta = 0 gives the uniform table.
DensityTable build_density_slit(double t, double theta_prev, double eta, double sigma,
                                const DensityOptions& opts = {},
                                const std::vector<double>& extra_knots = {});

// density ~ |Phi_{k-1}'(e^{sigma+i theta})|^{-eta}; knots are seeded at the
// previous attachment angles on top of the geometric ladder.
DensityTable build_density_ale(const cluster::ClusterState& state, const ModelParams& params,
                               const DensityOptions& opts = {});

DensityTable build_density_markov(std::size_t k, double theta_prev, const ModelParams& params,
                                  const DensityOptions& opts = {});

// Piecewise-linear inverse-CDF evaluation; deterministic in (table, u).
double sample(const DensityTable& table, double u);

// int_{|theta - center| <= x} (theta - center)^p * normalized density
double density_moment(const DensityTable& table, int p, double x);

struct BracketError : std::runtime_error {
    double lo, hi;
    BracketError(const std::string& what, double lo_, double hi_)
        : std::runtime_error(what + " (scanned [" + std::to_string(lo_) + ", " +
                             std::to_string(hi_) + "])"),
          lo(lo_),
          hi(hi_) {}
};

// Next capacity increment per the configured rule.
double capacity_increment(const cluster::ClusterState& state, double theta,
                          const ModelParams& params);

struct Trajectory {
    std::vector<double> angles;        // unwrapped
    std::vector<double> capacities;
    std::vector<double> slit_lengths;
    std::vector<double> base_angles;
    std::vector<double> cum_capacity;
    std::vector<double> log_Z;         // per-step normalization
    std::vector<long long> parents;    // filled by annotate_parents; -1 = ambiguous
    bool omega = false;
    std::uint64_t seed = 0;
    ModelParams params;
    bool aborted = false;
    std::string abort_reason;
    std::size_t size() const { return angles.size(); }
};

// One full trajectory: density build -> inverse-CDF sample -> capacity rule ->
// append. N = floor(T/c) for the constant rule; otherwise appends while the
// predicted total capacity stays below T. Any step error aborts with the
// partial trajectory and a diagnostic.
Trajectory run_model(const ModelParams& params, CounterRng& rng);

cluster::ClusterState state_from(const Trajectory& traj);

// Fills traj.parents via cluster::parent_of; ambiguous particles get -1 and
// are reported in the returned list.
std::vector<std::size_t> annotate_parents(Trajectory& traj, double tol = 1e-6);

}  // namespace ale::sampling
