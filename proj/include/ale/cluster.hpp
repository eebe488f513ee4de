#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ale/logpolar.hpp"
#include "ale/slitgeom.hpp"

namespace ale::cluster {

// One particle: attachment angle (unwrapped on the real line), capacity
// increment, and the derived slit length / base half-angle.
struct BuildingBlock {
    double theta;
    double c;
    double d;
    double beta;
};

// The composition Phi_n = f_1 . ... . f_n, kept as its block sequence plus
// compensated cumulative capacities. Immutable for evaluation once built;
// appends happen on the owning thread.
class ClusterState {
public:
    // Derives (d, beta) from c. Rejects c <= 0 and c below the slit-length
    // resolution of double precision (1e-14).
    void append_particle(double theta, double c);

    const std::vector<BuildingBlock>& blocks() const { return blocks_; }
    const std::vector<double>& cum_capacity() const { return cum_; }
    std::size_t size() const { return blocks_.size(); }
    bool empty() const { return blocks_.empty(); }
    double total_capacity() const { return cum_.empty() ? 0.0 : cum_.back(); }
    double last_angle() const { return blocks_.empty() ? 0.0 : blocks_.back().theta; }
    double sup_abs_angle() const;

private:
    std::vector<BuildingBlock> blocks_;
    std::vector<double> cum_;
    double sum_ = 0.0;
    double carry_ = 0.0;
};

// A slitgeom singularity hit while composing, annotated with the particle
// index (1-based) at which it occurred.
struct MapEvalError : std::runtime_error {
    std::size_t particle_index;
    MapEvalError(const std::string& what, std::size_t k)
        : std::runtime_error(what + " (at particle " + std::to_string(k) + ")"),
          particle_index(k) {}
};

enum class DerivMode { none, full, log_abs };

struct MapEval {
    cplx value;
    cplx deriv;
    double log_abs_deriv;  // log |Phi_n'(z)|, valid in log_abs (and full) mode
    LogPolarPoint value_logpolar;
};

// Evaluates Phi_n (and optionally Phi_n') at z, applying f_n first. The orbit
// is walked once in log-polar form and shared between value and derivative;
// log_abs mode accumulates only log|f_k'| along the orbit, which is all the
// angle densities need.
MapEval evaluate(const ClusterState& state, const LogPolarPoint& z, DerivMode mode);

cplx map_point(const ClusterState& state, const LogPolarPoint& z);
LogPolarPoint map_point_logpolar(const ClusterState& state, const LogPolarPoint& z);
cplx map_deriv(const ClusterState& state, const LogPolarPoint& z);
double map_deriv_log_abs(const ClusterState& state, const LogPolarPoint& z);

// Two slits both claimed the forward-mapped base point within tolerance.
struct ParentAmbiguityError : std::runtime_error {
    std::size_t candidate_newer, candidate_older;
    ParentAmbiguityError(std::size_t a, std::size_t b)
        : std::runtime_error("ambiguous parent: slits " + std::to_string(a) + " and " +
                             std::to_string(b) + " both within tolerance"),
          candidate_newer(a),
          candidate_older(b) {}
};

// The orbit reached stage 0 visibly off the unit circle with no slit claiming
// it; reported instead of silently resolving.
struct ParentClassificationError : std::runtime_error {
    double residual_log_radius;
    explicit ParentClassificationError(double s)
        : std::runtime_error("parent classification failed: orbit ended at log-radius " +
                             std::to_string(s)),
          residual_log_radius(s) {}
};

// Parent of particle j (1-based): maps the base point of particle j forward
// through f_{j-1}, ..., f_1 and returns the largest k whose slit segment
// e^{i theta_k} (1, 1+d_k] contains the image within tol*d_k transverse
// distance, or 0 when the orbit reaches stage 0 on the unit circle.
std::size_t parent_of(const ClusterState& state, std::size_t j, double tol = 1e-6);

// True iff every consecutive gap |theta_j - theta_{j-1}| is strictly below
// beta_c. Angles must follow the sampling convention
// theta_k in [theta_{k-1} - pi, theta_{k-1} + pi).
bool omega_event(const std::vector<double>& angles, double beta_c);

struct BoundaryTrace {
    std::vector<cplx> points;  // closed: first == last
    int flagged = 0;           // evaluations that needed a 1e-12 rad nudge
};

// Adaptive polyline of Phi_n(e^{i theta}): the theta-grid is bisected until
// adjacent image points are within refine_tol of the cluster scale or the
// depth cap is reached.
BoundaryTrace boundary_trace(const ClusterState& state, std::size_t target_points,
                             double refine_tol);

// Monitored ratio for the derivative lower bound: |Phi_n'(e^{s+i theta})|
// times sqrt(e^{C_n}-1) (sup_k|theta_k| + e^s - 1) / ((e^s-1)(1-cos(theta-theta_n))).
double derivative_lower_bound_ratio(const ClusterState& state, const LogPolarPoint& z);

}  // namespace ale::cluster
