#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ale/harness/config.hpp"
#include "ale/harness/experiments.hpp"
#include "ale/harness/io.hpp"
#include "ale/harness/stats.hpp"
#include "ale/harness/svg.hpp"

using namespace ale;
namespace hn = ale::harness;
namespace sp = ale::sampling;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

hn::ExperimentConfig small_markov_phase() {
    hn::ExperimentConfig config;
    config.experiment = "phase";
    config.model = "markov";
    config.eta_values = {4.0};
    config.c_values = {1e-3};
    config.gamma_values = {hn::gamma_threshold(4.0, sp::Model::markov) + 0.5};
    config.T = 0.02;
    config.replicas = 16;
    config.threads = 1;
    config.seed = 42;
    return config;
}

}  // namespace

TEST_CASE("gamma thresholds") {
    CHECK(hn::gamma_threshold(4.0, sp::Model::markov) == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    CHECK(hn::gamma_threshold(4.0, sp::Model::ale) == doctest::Approx(13.0 / 6.0).epsilon(1e-15));
    CHECK(hn::gamma_threshold(2.0, sp::Model::ale) == doctest::Approx(4.5).epsilon(1e-15));
    CHECK_THROWS_AS(hn::gamma_threshold(1.0, sp::Model::ale), std::domain_error);
    CHECK_THROWS_AS(hn::gamma_threshold(0.5, sp::Model::markov), std::domain_error);
}

TEST_CASE("statistics helpers") {
    SUBCASE("wilson interval contains the point estimate") {
        for (std::size_t n : {5, 40, 400}) {
            for (std::size_t k = 0; k <= n; k += std::max<std::size_t>(1, n / 7)) {
                const hn::WilsonInterval ci = hn::wilson_interval(k, n);
                const double p = double(k) / double(n);
                CHECK(ci.lo <= p + 1e-12);
                CHECK(ci.hi >= p - 1e-12);
                CHECK(ci.lo >= 0.0);
                CHECK(ci.hi <= 1.0);
            }
        }
    }
    SUBCASE("line fit recovers an exact line") {
        const hn::LineFit f = hn::fit_line({1.0, 2.0, 3.0, 4.0}, {0.5, 2.5, 4.5, 6.5});
        CHECK(f.slope == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(f.intercept == doctest::Approx(-1.5).epsilon(1e-12));
        CHECK(f.rms_residual < 1e-12);
    }
    SUBCASE("ks p-value is sane") {
        CHECK(hn::ks_pvalue(0.001, 100) > 0.999);
        CHECK(hn::ks_pvalue(0.5, 1000) < 1e-6);
    }
    SUBCASE("median") {
        CHECK(hn::median({3.0, 1.0, 2.0}) == 2.0);
        CHECK(hn::median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    }
}

TEST_CASE("config json round trip") {
    hn::ExperimentConfig config = small_markov_phase();
    config.sigma_tilde = 1e-7;
    config.estimates_T = 0.9;
    const std::string text = config.to_json();
    const hn::ExperimentConfig back = hn::ExperimentConfig::from_json(text);
    CHECK(back.model == "markov");
    CHECK(back.eta_values == config.eta_values);
    CHECK(back.c_values == config.c_values);
    CHECK(back.gamma_values == config.gamma_values);
    CHECK(back.T == config.T);
    CHECK(back.replicas == config.replicas);
    CHECK(back.seed == config.seed);
    CHECK(back.sigma_tilde == config.sigma_tilde);
    CHECK(back.estimates_T == config.estimates_T);
    CHECK(back.to_json() == text);

    SUBCASE("scalar sweep values are accepted") {
        const auto c = hn::ExperimentConfig::from_json(R"({"eta": 2.5, "c": 1e-4})");
        CHECK(c.eta_values == std::vector<double>{2.5});
        CHECK(c.c_values == std::vector<double>{1e-4});
    }
    SUBCASE("validation") {
        hn::ExperimentConfig bad = small_markov_phase();
        bad.replicas = 0;
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
        hn::ExperimentConfig bad2 = small_markov_phase();
        bad2.sigma_values = {1e-6};
        CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
    }
}

TEST_CASE("phase experiment determinism and thread invariance") {
    hn::ExperimentConfig config = small_markov_phase();
    const hn::PhaseReport one = hn::run_phase_experiment(config);

    config.threads = 4;
    const hn::PhaseReport four = hn::run_phase_experiment(config);
    REQUIRE(one.cells.size() == 1);
    REQUIRE(four.cells.size() == 1);
    CHECK_FALSE(one.cells[0].failed);
    CHECK(one.cells[0].traj_digest == four.cells[0].traj_digest);
    CHECK(one.cells[0].omega_count == four.cells[0].omega_count);
    CHECK(one.cells[0].mean_sup_gap == four.cells[0].mean_sup_gap);

    SUBCASE("rerun with the same seed is bit-identical") {
        const hn::PhaseReport again = hn::run_phase_experiment(config);
        CHECK(again.cells[0].traj_digest == four.cells[0].traj_digest);
    }
    SUBCASE("different seed changes the digest") {
        config.seed = 43;
        const hn::PhaseReport other = hn::run_phase_experiment(config);
        CHECK(other.cells[0].traj_digest != one.cells[0].traj_digest);
    }
}

TEST_CASE("phase experiment isolates bad cells") {
    hn::ExperimentConfig config = small_markov_phase();
    config.eta_values = {4.0, 3.0};
    config.c_values = {1e-3, -1.0};  // second c invalid
    const hn::PhaseReport rep = hn::run_phase_experiment(config);
    REQUIRE(rep.cells.size() == 4);
    int failed = 0, passed = 0;
    for (const auto& cell : rep.cells) (cell.failed ? failed : passed)++;
    CHECK(failed == 2);
    CHECK(passed == 2);
}

TEST_CASE("moment experiment slopes") {
    hn::ExperimentConfig config;
    config.experiment = "moments";
    config.eta_values = {2.0, 0.5};
    config.sigma_steps = 5;
    const hn::MomentReport rep = hn::run_moment_experiment(config);
    REQUIRE(rep.summaries.size() == 2);
    CHECK(std::abs(rep.summaries[0].z_slope - (-1.0)) < 0.05);
    CHECK(rep.summaries[1].z_max_over_min < 1.25);
}

TEST_CASE("convergence experiment") {
    hn::ExperimentConfig config;
    config.experiment = "converge";
    config.model = "markov";
    config.eta_values = {4.0};
    config.c_values = {3e-3};
    config.gamma_values = {4.0 / 3.0};
    config.T = 0.03;
    config.replicas = 6;
    config.rays = 64;
    config.seed = 9;
    const hn::ConvergenceReport rep = hn::run_convergence_experiment(config);
    REQUIRE(rep.cells.size() == 1);
    CHECK(rep.cells[0].runs == 6);
    CHECK(rep.cells[0].median_gap_all >= 0.0);
    CHECK(rep.cells[0].median_gap_all < 0.5);

    SUBCASE("single particle gives zero gap") {
        sp::Trajectory traj;
        traj.angles = {0.7};
        traj.capacities = {1e-3};
        CHECK(hn::slit_convergence_gap(traj, 2.0, 64) < 1e-13);
    }
}

TEST_CASE("estimate checks") {
    hn::ExperimentConfig config;
    config.experiment = "estimates";
    config.cases = 60;
    config.seed = 5;
    const hn::EstimateReport rep = hn::run_estimate_checks(config);
    CHECK_FALSE(rep.vacuous);
    CHECK(rep.tip_admissible > 10);
    CHECK(rep.away_admissible > 10);
    CHECK(rep.tip_arg_violations == 0);
    CHECK(rep.tip_radial_violations == 0);
    CHECK(rep.away_angular_violations == 0);
    CHECK(rep.lower_bound_ratio.min > 0.0);

    SUBCASE("deterministic rerun") {
        const hn::EstimateReport again = hn::run_estimate_checks(config);
        CHECK(again.tip_admissible == rep.tip_admissible);
        CHECK(again.tip_log_ratio.max == rep.tip_log_ratio.max);
    }

    SUBCASE("vacuity is visible, not a silent pass") {
        hn::ExperimentConfig vac = config;
        vac.estimates_kind = "away";
        vac.estimates_T = 5.0;  // beyond every angular lifetime bound log 2
        const hn::EstimateReport v = hn::run_estimate_checks(vac);
        CHECK(v.vacuous);
        const std::string j = hn::estimate_report_json(v);
        CHECK(j.find("no admissible cases") != std::string::npos);
    }
}

TEST_CASE("output files") {
    const std::string dir = "/tmp/ale_harness_test";
    std::filesystem::remove_all(dir);
    hn::ensure_directory(dir);

    SUBCASE("trajectory csv round-trips doubles exactly and carries parents") {
        sp::Trajectory traj;
        traj.angles = {kPi / 3.0 + 1e-16, -0.2};
        traj.capacities = {1e-3, 1e-3};
        traj.slit_lengths = {0.063, 0.063};
        traj.base_angles = {0.063, 0.063};
        traj.cum_capacity = {1e-3, 2e-3};
        traj.log_Z = {0.0, 0.0};
        traj.parents = {0, 1};
        hn::write_trajectory_csv(dir + "/trajectory.csv", traj);
        const std::string text = slurp(dir + "/trajectory.csv");
        CHECK(text.find("step,theta,c,d,beta,C_cum,parent") == 0);
        std::istringstream lines(text);
        std::string line;
        std::getline(lines, line);
        std::getline(lines, line);
        // 17 significant digits reproduce the double bit-for-bit
        const std::string theta_field = line.substr(2, line.find(',', 2) - 2);
        CHECK(std::strtod(theta_field.c_str(), nullptr) == traj.angles[0]);
        CHECK(line.back() == '0');
        std::getline(lines, line);
        CHECK(line.back() == '1');
    }

    SUBCASE("report json embeds config and seed") {
        hn::ExperimentConfig config = small_markov_phase();
        hn::write_report_json(dir + "/report.json", config, "{\"x\": 1}");
        const std::string text = slurp(dir + "/report.json");
        CHECK(text.find("\"config\"") != std::string::npos);
        CHECK(text.find("\"seed\": 42") != std::string::npos);
        CHECK(text.find("\"markov\"") != std::string::npos);
    }

    SUBCASE("cluster svg is a single closed polyline") {
        cluster::ClusterState st;
        const auto trace = cluster::boundary_trace(st, 64, 0.05);
        hn::write_cluster_svg(dir + "/cluster.svg", trace.points);
        const std::string text = slurp(dir + "/cluster.svg");
        CHECK(text.find("<svg") != std::string::npos);
        CHECK(text.find("<polyline") != std::string::npos);
        // 65 coordinate pairs
        std::size_t commas = 0;
        for (char ch : text.substr(text.find("points="))) commas += ch == ',';
        CHECK(commas == 65);
    }

    SUBCASE("angles svg") {
        hn::write_angles_svg(dir + "/angles.svg", {0.1, 0.2, -0.3, 0.15});
        const std::string text = slurp(dir + "/angles.svg");
        CHECK(text.find("polyline") != std::string::npos);
    }
}

TEST_CASE("principal aspect ratio statistic") {
    SUBCASE("slit-like point sets are strongly anisotropic") {
        std::vector<cplx> pts;
        for (int i = 0; i <= 200; ++i) {
            const double r = 1.0 + 7.76 * i / 200.0;
            pts.push_back(std::polar(r, 0.85) + cplx(0.0, 1e-3 * std::sin(i * 0.7)));
        }
        // circle points are excluded by the radius filter
        for (int i = 0; i < 200; ++i) pts.push_back(std::polar(1.0, -kPi + kTwoPi * i / 200.0));
        CHECK(hn::principal_aspect_ratio(pts, 1.0 + 1e-6) > 100.0);
    }
    SUBCASE("isotropic growth is near 1") {
        std::vector<cplx> pts;
        for (int i = 0; i < 500; ++i) pts.push_back(std::polar(1.5, -kPi + kTwoPi * i / 500.0));
        CHECK(hn::principal_aspect_ratio(pts) < 1.3);
    }
}
