#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "ale/loewner.hpp"
#include "ale/rng.hpp"

using namespace ale;
namespace lw = ale::loewner;
namespace sg = ale::slitgeom;
namespace cl = ale::cluster;

namespace {

cl::ClusterState random_state(CounterRng& rng, std::size_t n, double angle_scale = kPi) {
    cl::ClusterState st;
    double prev = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        prev = wrap_angle(prev + rng.uniform(-angle_scale, angle_scale));
        st.append_particle(prev, std::pow(10.0, rng.uniform(-4.0, -1.5)));
    }
    return st;
}

// small driver fitting the tip hypothesis budget at (z, T), A = 100
lw::DrivingFunction admissible_tip_driver(CounterRng& rng, double budget, double T) {
    const int n = 1 + int(rng.next_u64() % 12);
    std::vector<double> caps(n), vals(n);
    for (int i = 0; i < n; ++i) {
        caps[i] = rng.uniform(0.2, 1.0);
        vals[i] = rng.uniform(-budget, budget);
    }
    const double total = std::accumulate(caps.begin(), caps.end(), 0.0);
    for (double& c : caps) c *= 1.25 * T / total;
    return lw::DrivingFunction::from_blocks(vals, caps);
}

}  // namespace

TEST_CASE("driving function bookkeeping") {
    lw::DrivingFunction xi({0.5, 1.0, 1.75}, {0.3, -0.8, 0.1});
    CHECK(xi.total_time() == 1.75);
    CHECK(xi.value_at(0.2) == 0.3);
    CHECK(xi.value_at(0.5) == 0.3);    // cadlag: value on (C_{k-1}, C_k]
    CHECK(xi.value_at(0.5001) == -0.8);
    CHECK(xi.value_at(1.75) == 0.1);
    CHECK(xi.sup_norm(0.4) == 0.3);
    CHECK(xi.sup_norm(0.6) == 0.8);
    CHECK(xi.sup_norm(1.75) == 0.8);
    CHECK(xi.sup_norm(0.6, 0.3) == doctest::Approx(1.1).epsilon(1e-15));

    CHECK_THROWS_AS(lw::DrivingFunction({1.0, 0.5}, {0.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(lw::DrivingFunction({1.0}, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("reference flows") {
    SUBCASE("boundary start: r0_t = d(t) + 1") {
        for (double t : {1e-6, 1e-2, 0.5, 2.0}) {
            const double want = sg::length_from_capacity(t) + 1.0;
            CHECK(std::abs(lw::reference_radial(1.0, t) - want) < 1e-13 * want);
        }
    }
    SUBCASE("antipode is fixed") {
        for (double t : {0.1, 1.0, 10.0})
            CHECK(std::abs(lw::reference_angular(kPi, t) - kPi) < 1e-12);
    }
    SUBCASE("angle reaches zero exactly at the lifetime") {
        for (double th : {0.3, 1.2, 2.9}) {
            const double life = lw::angular_lifetime(th);
            CHECK(std::abs(lw::reference_angular(th, life)) < 2e-7);
            CHECK_THROWS_AS(lw::reference_angular(th, life * 1.01), std::domain_error);
        }
    }
    SUBCASE("monotonicity") {
        double prev_r = 1.3;
        double prev_a = lw::reference_angular(2.0, 0.0);
        CHECK(prev_a == doctest::Approx(2.0));
        for (double t = 0.05; t < 0.6; t += 0.05) {
            const double r = lw::reference_radial(1.3, t);
            const double a = lw::reference_angular(2.0, t);
            CHECK(r > prev_r);
            CHECK(a < prev_a);
            prev_r = r;
            prev_a = a;
        }
    }
}

TEST_CASE("reverse flow vs closed forms, constant driver") {
    SUBCASE("radial line matches reference_radial") {
        for (double r : {1.0001, 1.3, 3.0}) {
            for (double T : {0.01, 0.4, 1.5}) {
                const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
                const cplx u = lw::reverse_flow(zero, T, LogPolarPoint(std::log(r), 0.0), 1e-10);
                CHECK(std::abs(u.imag()) < 1e-12);
                CHECK(std::abs(u.real() - lw::reference_radial(r, T)) < 1e-8);
            }
        }
    }

    SUBCASE("boundary start matches reference_angular") {
        for (double th : {0.4, 1.5, 2.8}) {
            const double T = 0.7 * lw::angular_lifetime(th);
            const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
            const lw::FlowState f = lw::reverse_flow_raw(zero, T, LogPolarPoint(0.0, th), 1e-10, false);
            CHECK(std::abs(f.s) < 1e-12);  // stays on the circle
            CHECK(std::abs(f.theta - lw::reference_angular(th, T)) < 1e-8);
        }
    }

    SUBCASE("matches the slit map everywhere") {
        CounterRng rng(5);
        for (int i = 0; i < 60; ++i) {
            const double T = std::pow(10.0, rng.uniform(-3.0, 0.0));
            const LogPolarPoint z(rng.uniform(1e-4, 1.2), rng.uniform(-kPi, kPi));
            const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
            const double tol = 1e-9;
            const cplx u = lw::reverse_flow(zero, T, z, tol);
            const cplx f = sg::slit_map(T, z);
            CHECK(std::abs(u - f) <= 10.0 * tol * std::max(1.0, std::abs(f)) + 1e-12);
        }
    }

    SUBCASE("rotation equivariance: xi = arg z gives a rotated radial flow") {
        const double th = 0.9, T = 0.5;
        const lw::DrivingFunction c = lw::DrivingFunction::constant(th, T);
        const cplx u = lw::reverse_flow(c, T, LogPolarPoint(std::log(1.4), th), 1e-10);
        CHECK(std::abs(wrap_angle(std::arg(u) - th)) < 1e-9);
        CHECK(std::abs(std::abs(u) - lw::reference_radial(1.4, T)) < 1e-8);
    }
}

TEST_CASE("reverse flow derivative") {
    SUBCASE("constant zero driver matches the slit map derivative") {
        CounterRng rng(43);
        for (int i = 0; i < 40; ++i) {
            const double T = std::pow(10.0, rng.uniform(-3.0, 0.0));
            const LogPolarPoint z(rng.uniform(0.01, 1.2), rng.uniform(-kPi, kPi));
            const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
            const cplx num = lw::reverse_flow_deriv(zero, T, z, 1e-10);
            const cplx an = sg::slit_map_deriv(T, z);
            CHECK(std::abs(num - an) / std::abs(an) < 1e-6);
        }
    }
    SUBCASE("never zero") {
        CounterRng rng(47);
        for (int i = 0; i < 40; ++i) {
            const cl::ClusterState st = random_state(rng, 10);
            const lw::DrivingFunction xi = lw::DrivingFunction::from_cluster(st);
            const LogPolarPoint z(rng.uniform(0.05, 1.0), rng.uniform(-kPi, kPi));
            const cplx d = lw::reverse_flow_deriv(xi, xi.total_time(), z, 1e-9);
            CHECK(std::abs(d) > 0.0);
            CHECK(finite(d));
        }
    }
}

TEST_CASE("oracle identity: composition equals the reverse flow") {
    CounterRng rng(53);
    for (int i = 0; i < 12; ++i) {
        const cl::ClusterState st = random_state(rng, 20);
        const lw::DrivingFunction xi = lw::DrivingFunction::from_cluster(st);
        const double T = st.total_capacity();
        for (int j = 0; j < 6; ++j) {
            const LogPolarPoint z(rng.uniform(std::log(1.1), std::log(8.0)),
                                  rng.uniform(-kPi, kPi));
            const cplx via_ode = lw::reverse_flow(xi, T, z, 1e-10);
            const cplx via_comp = cl::map_point(st, z);
            CHECK(std::abs(via_ode - via_comp) / std::abs(via_comp) < 1e-6);

            const cplx dode = lw::reverse_flow_deriv(xi, T, z, 1e-10);
            const cplx dcomp = cl::map_deriv(st, z);
            CHECK(std::abs(dode - dcomp) / std::abs(dcomp) < 1e-5);
        }
    }
}

TEST_CASE("step-halving convergence and radial monotonicity") {
    CounterRng rng(59);
    const cl::ClusterState st = random_state(rng, 15);
    const lw::DrivingFunction xi = lw::DrivingFunction::from_cluster(st);
    const double T = st.total_capacity();
    const LogPolarPoint z(std::log(1.2), 0.7);

    const cplx coarse = lw::reverse_flow(xi, T, z, 1e-8);
    const cplx fine = lw::reverse_flow(xi, T, z, 5e-9);
    CHECK(std::abs(coarse - fine) <= 1e-8 * std::abs(fine) + 1e-14);

    double prev = 0.0;
    for (int i = 1; i <= 20; ++i) {
        const double t = T * i / 20.0;
        const lw::FlowState f = lw::reverse_flow_raw(xi, t, z, 1e-9, false);
        // r_t is nondecreasing in the flow-time horizon as well for these drivers
        CHECK(f.s >= 0.0);
        if (i > 1) CHECK(f.s > prev - 1e-12);
        prev = f.s;
    }
}

TEST_CASE("singularity reporting") {
    // boundary point driven straight into the singularity: theta = xi
    const lw::DrivingFunction xi = lw::DrivingFunction::constant(0.4, 2.0);
    CHECK_THROWS_AS(lw::reverse_flow(xi, 2.0, LogPolarPoint(0.0, 0.4), 1e-10),
                    lw::FlowSingularError);
    // beyond the angular lifetime the boundary orbit hits the driving point
    const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, 2.0);
    CHECK_THROWS_AS(lw::reverse_flow(zero, 2.0, LogPolarPoint(0.0, 0.5), 1e-10),
                    lw::FlowSingularError);
    CHECK_THROWS_AS(lw::reverse_flow(zero, 3.0, LogPolarPoint(0.1, 0.0), 1e-10),
                    std::domain_error);  // T exceeds the driver
}

TEST_CASE("half-plane reverse flow fixture validates the half-plane slit map") {
    // dh/dt = -2/h with h_0 = z integrates to h_T = sqrt(z^2 - 4T); march it
    // with fixed fine RK4 steps and compare against the closed form.
    auto rk4 = [](cplx z, double T) {
        const int n = 4000;
        const double h = T / n;
        cplx y = z;
        auto f = [](cplx u) { return -2.0 / u; };
        for (int i = 0; i < n; ++i) {
            const cplx k1 = f(y), k2 = f(y + 0.5 * h * k1), k3 = f(y + 0.5 * h * k2),
                       k4 = f(y + h * k3);
            y += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        return y;
    };
    for (cplx z : {cplx(0.5, 0.8), cplx(-1.2, 0.4), cplx(0.0, 2.0)}) {
        for (double T : {0.01, 0.05}) {
            CHECK(std::abs(rk4(z, T) - sg::halfplane_slit_map(T, z)) < 1e-9);
        }
    }
}

TEST_CASE("tip estimate checks") {
    CounterRng rng(61);

    SUBCASE("zero driver: both margins nonnegative, radial one at equality") {
        const double T = 0.4;
        const LogPolarPoint z(std::log(1.5), 0.0);
        const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
        const lw::TipCheckReport rep = lw::check_tip_estimate(zero, z, T, 1e-10);
        CHECK(rep.admissible);
        CHECK_FALSE(rep.arg_violation);
        CHECK_FALSE(rep.radial_violation);
        CHECK(std::abs(rep.radial_margin) < 1e-8);  // equality case
    }

    SUBCASE("random admissible cases: zero violations") {
        int admissible = 0;
        for (int i = 0; i < 120; ++i) {
            const double T = rng.uniform(0.05, 1.0);
            const double r = rng.uniform(1.05, 1.9);
            const double budget = std::exp(-T) * (r - 1.0) / 100.0;
            const double argz = rng.uniform(-0.4, 0.4) * budget;
            const lw::DrivingFunction xi =
                admissible_tip_driver(rng, (budget - std::abs(argz)) * 0.9, T);
            const lw::TipCheckReport rep =
                lw::check_tip_estimate(xi, LogPolarPoint(std::log(r), argz), T, 1e-10);
            if (!rep.admissible) continue;
            ++admissible;
            CHECK_FALSE(rep.arg_violation);
            CHECK_FALSE(rep.radial_violation);
        }
        CHECK(admissible > 80);
    }
}

TEST_CASE("away estimate checks") {
    CounterRng rng(67);

    SUBCASE("zero driver reproduces the angular reference") {
        const double th = 1.3;
        const double T = 0.5 * lw::angular_lifetime(th);
        const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
        const lw::AwayCheckReport rep =
            lw::check_away_estimate(zero, LogPolarPoint(1e-10, th), T, 1e-10);
        CHECK(rep.admissible);
        CHECK_FALSE(rep.angular_violation);
        CHECK(std::abs(rep.radial_log_ratio) < 1e-4);
    }

    SUBCASE("random admissible cases: zero violations of the factor-2 bound") {
        int admissible = 0;
        for (int i = 0; i < 120; ++i) {
            const double th = rng.uniform(0.3, 2.7) * (i % 2 ? 1.0 : -1.0);
            const double T = rng.uniform(0.1, 0.9) * std::min(1.0, lw::angular_lifetime(th));
            const double v0 = lw::reference_angular(std::abs(th), T);
            const double budget =
                2.0 * std::pow(std::sin(0.5 * v0), 2) / (100.0 * std::sqrt(std::expm1(T)));
            const double s = rng.uniform(0.1, 0.5) * budget;
            const lw::DrivingFunction xi = admissible_tip_driver(rng, budget * 0.4, T);
            const lw::AwayCheckReport rep =
                lw::check_away_estimate(xi, LogPolarPoint(std::log1p(s), th), T, 1e-10);
            if (!rep.admissible) continue;
            ++admissible;
            CHECK_FALSE(rep.angular_violation);
            CHECK(std::abs(rep.radial_log_ratio) <= 1.0);  // the explicit <= 1 part
        }
        CHECK(admissible > 80);
    }

    SUBCASE("radial tracking for boundary-hugging starts") {
        const double th = 2.0, T = 0.05;
        const double v0 = lw::reference_angular(th, T);
        const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
        const lw::FlowState f = lw::reverse_flow_raw(zero, T, LogPolarPoint(1e-8, th), 1e-11, false);
        const double predicted = 1e-8 * std::tan(0.5 * th) / std::tan(0.5 * v0);
        const double actual = std::expm1(f.s);
        CHECK(actual / predicted < std::exp(1.0));
        CHECK(actual / predicted > std::exp(-1.0));
    }
}

TEST_CASE("derivative ratio monitor") {
    CounterRng rng(71);

    SUBCASE("zero driver: tip ratio is the log of 1") {
        const double T = 0.3;
        const lw::DrivingFunction zero = lw::DrivingFunction::constant(0.0, T);
        const lw::DerivRatioReport rep =
            lw::deriv_ratio_monitor(zero, LogPolarPoint(std::log(1.4), 0.0), T);
        CHECK(rep.tip_log_ratio < 1e-6);
    }

    SUBCASE("monotone trend in the driver amplitude") {
        // doubling ||xi|| should not shrink the worst tip log-ratio
        const double T = 0.2, r = 1.5;
        const double budget = std::exp(-T) * (r - 1.0) / 100.0;
        double prev_worst = -1.0;
        for (double amp : {0.25 * budget, 0.5 * budget, budget}) {
            double worst = 0.0;
            for (int i = 0; i < 30; ++i) {
                const lw::DrivingFunction xi = admissible_tip_driver(rng, amp, T);
                const lw::DerivRatioReport rep =
                    lw::deriv_ratio_monitor(xi, LogPolarPoint(std::log(r), 0.0), T);
                worst = std::max(worst, rep.tip_log_ratio);
            }
            CHECK(worst >= prev_worst * 0.5);  // trend check, not a sharp bound
            prev_worst = worst;
        }
    }

    SUBCASE("lower bound ratio finite and positive") {
        for (int i = 0; i < 200; ++i) {
            const cl::ClusterState st = random_state(rng, 8, 0.5);
            const lw::DrivingFunction xi = lw::DrivingFunction::from_cluster(st);
            const LogPolarPoint z(rng.uniform(0.01, 1.0), rng.uniform(0.2, kPi - 0.2));
            const lw::DerivRatioReport rep = lw::deriv_ratio_monitor(xi, z, xi.total_time());
            CHECK(std::isfinite(rep.lower_bound_ratio));
            CHECK(rep.lower_bound_ratio > 0.0);
        }
    }
}

TEST_CASE("continuity of the driver-to-map correspondence") {
    CounterRng rng(73);
    const cl::ClusterState st = random_state(rng, 10, 0.4);
    const lw::DrivingFunction xi = lw::DrivingFunction::from_cluster(st);
    const double T = st.total_capacity();

    CHECK(lw::continuity_check(xi, xi, T, 0.1) == 0.0);

    SUBCASE("shrinking perturbations shrink the map distance") {
        double prev = 1e300;
        for (double pert : {0.3, 0.1, 0.03, 0.01}) {
            const lw::DrivingFunction xi2 = xi.shifted(pert);
            const double dist = lw::continuity_check(xi, xi2, T, 0.1);
            CHECK(dist < prev);
            CHECK(dist > 0.0);
            prev = dist;
        }
        CHECK(prev < 0.2);
    }

    SUBCASE("rigid rotation bound") {
        const double phi = 1e-3;
        const lw::DrivingFunction xi2 = xi.shifted(phi);
        // max |Psi| over the probe set is bounded by e^T * (10 + 4)
        const double dist = lw::continuity_check(xi, xi2, T, 0.1);
        CHECK(dist <= 2.0 * phi * std::exp(T) * 14.0);
    }
}
