#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "cesaro/builtins.hpp"
#include "cesaro/dissipativity.hpp"
#include "cesaro/vi_engine.hpp"
#include "test_support.hpp"

using namespace cesaro;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<StateIndex, InputIndex> pair_of(const TransitionSystem& sys, const char* state,
                                          const char* input) {
    return {*sys.find_state(state), *sys.find_input(input)};
}

/// One state, a zero-cost loop at coordinate distance 0 and a cost-1 loop at
/// input distance 2 from it.
TransitionSystem two_loop_system() {
    return parse_system(
        "state a 0\n"
        "input p 0\n"
        "input q 2\n"
        "trans a p a 0\n"
        "trans a q a 1\n");
}

}  // namespace

TEST_CASE("suboptimality gap") {
    TransitionSystem fig1 = make_fig1();
    CHECK(suboptimality_gap(fig1, 0.0) == kInf);

    TransitionSystem loops = two_loop_system();
    CHECK(suboptimality_gap(loops, 0.0) == 1.0);

    TransitionSystem linear = make_linear();
    CHECK(suboptimality_gap(linear, 0.0) == doctest::Approx(1.05).epsilon(1e-12));

    TransitionSystem tiny_gap = parse_system(
        "trans a p a 0\n"
        "trans b p b 1e-10\n");
    CHECK_THROWS_AS(suboptimality_gap(tiny_gap, 0.0), GapNotPositiveError);
}

TEST_CASE("alpha coefficient formula") {
    TransitionSystem loops = two_loop_system();
    Orbit pi = optimal_orbit(loops).orbit;
    CHECK(build_alpha(1.0, loops, pi, Metric::euclidean) == doctest::Approx(0.4995).epsilon(1e-15));
    CHECK(build_alpha(0.5, loops, pi, Metric::discrete) ==
          doctest::Approx(0.4995 * 0.5 / 0.5).epsilon(1e-15));  // (1-1e-3)*0.5/1
    CHECK(build_alpha(kInf, loops, pi, Metric::euclidean) == 1.0);

    // all pairs on the orbit: D_max = 0 falls back to the default coefficient
    TransitionSystem single = parse_system("trans a p a 3\n");
    Orbit only = optimal_orbit(single).orbit;
    CHECK(build_alpha(2.0, single, only, Metric::discrete) == 1.0);
}

TEST_CASE("supply rate") {
    TransitionSystem fig1 = make_fig1();
    Orbit pi = optimal_orbit(fig1).orbit;
    // on the orbit the distance term vanishes
    CHECK(supply_rate(fig1, pair_of(fig1, "x1", "u12"), pi, 0.0, 1.0, Metric::discrete) == -2.0);
    CHECK(supply_rate(fig1, pair_of(fig1, "x3", "u32"), pi, 0.0, 1.0, Metric::discrete) == -1.0);

    TransitionSystem linear = make_linear();
    Orbit pi_lin = optimal_orbit(linear).orbit;
    double c = 0.25;
    double expected = 6.2 - c * std::sqrt(18.0);
    CHECK(supply_rate(linear, pair_of(linear, "4", "5"), pi_lin, 0.0, c, Metric::euclidean) ==
          doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("available storage fixpoint on fig1") {
    TransitionSystem fig1 = make_fig1();
    Orbit pi = optimal_orbit(fig1).orbit;
    auto supply = supply_rate_table(fig1, pi, 0.0, 1.0, Metric::discrete);
    auto lambda = available_storage(fig1, supply);
    CHECK(lambda[*fig1.find_state("x1")] == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(lambda[*fig1.find_state("x2")] == 0.0);
    CHECK(lambda[*fig1.find_state("x3")] == doctest::Approx(2.9).epsilon(1e-12));
}

TEST_CASE("positive stored supply around a second optimal orbit is detected") {
    // two zero-cost loops: alpha > 0 off the first loop makes -s positive
    // around the second one, so the storage fixpoint diverges
    TransitionSystem loops = parse_system(
        "trans a p a 0\n"
        "trans a q b 0\n"
        "trans b p b 0\n"
        "trans b q a 0\n");
    Orbit pi = optimal_orbit(loops).orbit;  // loop at a
    auto supply = supply_rate_table(loops, pi, 0.0, 1.0, Metric::discrete);
    CHECK_THROWS_AS(available_storage(loops, supply), PositiveCycleError);
}

TEST_CASE("rotated cost table") {
    TransitionSystem fig1 = make_fig1();
    Orbit pi = optimal_orbit(fig1).orbit;

    // identity storage leaves the shifted cost untouched
    std::vector<double> zero(fig1.num_states(), 0.0);
    auto plain = rotated_cost_table(fig1, zero, 0.0);
    CHECK(plain[*fig1.find_state("x1")][0] == -2.0);

    auto supply = supply_rate_table(fig1, pi, 0.0, 1.0, Metric::discrete);
    auto lambda = available_storage(fig1, supply);
    auto rotated = rotated_cost_table(fig1, lambda, 0.0);
    CHECK(rotated[*fig1.find_state("x1")][0] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rotated[*fig1.find_state("x2")][0] == doctest::Approx(0.0).epsilon(1e-12));
    // x3 arcs: u31 then u32
    CHECK(rotated[*fig1.find_state("x3")][0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rotated[*fig1.find_state("x3")][1] == doctest::Approx(2.9).epsilon(1e-12));
}

TEST_CASE("full pipeline on fig1 and the linear builtin") {
    for (auto* make : {make_fig1, make_linear}) {
        TransitionSystem sys = make();
        DissipativityCertificate cert = build_certificate(sys);
        CHECK(cert.verdict.holds);
        CHECK(cert.ell_star == 0.0);
        // rotated cost vanishes on the orbit
        for (const auto& [x, u] : cert.orbit.pairs)
            CHECK(std::abs(cert.rotated_at(sys, x, u)) <= 1e-9);
        // storage is nonnegative and zero somewhere on the orbit
        double min_on_orbit = kInf;
        for (double v : cert.storage) CHECK(v >= 0.0);
        for (const auto& [x, u] : cert.orbit.pairs)
            min_on_orbit = std::min(min_on_orbit, cert.storage[x]);
        CHECK(min_on_orbit == 0.0);
        CHECK(cert.lambda_bar >= 0.0);
    }
}

TEST_CASE("pipeline rejects systems with two distinct optimal orbits") {
    CHECK_THROWS_AS(build_certificate(make_fig2()), NonUniqueOrbitError);
}

TEST_CASE("verification flags the second optimal loop under identity storage") {
    TransitionSystem fig2 = make_fig2();
    DissipativityCertificate cert;
    cert.metric = Metric::discrete;
    cert.orbit = optimal_orbit(fig2).orbit;  // self-loop at x1
    cert.ell_star = 0.0;
    cert.delta = 4.0 / 3.0;  // gap to the cheaper three-cycle
    cert.alpha_coeff = build_alpha(cert.delta, fig2, cert.orbit, cert.metric);
    cert.storage.assign(fig2.num_states(), 0.0);
    cert.rotated_cost = rotated_cost_table(fig2, cert.storage, cert.ell_star);
    CertificateVerdict verdict = verify_certificate(fig2, cert);
    CHECK_FALSE(verdict.holds);
    // the second zero-cost loop sits at positive distance with zero rotated cost
    double loop_margin =
        cert.rotated_at(fig2, *fig2.find_state("x2"), *fig2.find_input("u22")) -
        cert.alpha_coeff;
    CHECK(loop_margin == doctest::Approx(-cert.alpha_coeff).epsilon(1e-12));
    // the reported worst pair is the big negative shifted cost into x3
    CHECK(verdict.state == *fig2.find_state("x1"));
    CHECK(verdict.input == *fig2.find_input("u13"));
    CHECK(verdict.margin == doctest::Approx(-3.0 - cert.alpha_coeff).epsilon(1e-12));
}

TEST_CASE("identity storage verifies when the shifted cost already dominates alpha") {
    TransitionSystem loops = two_loop_system();
    DissipativityCertificate cert;
    cert.metric = Metric::euclidean;
    cert.orbit = optimal_orbit(loops).orbit;
    cert.ell_star = 0.0;
    cert.delta = 1.0;
    cert.alpha_coeff = build_alpha(cert.delta, loops, cert.orbit, cert.metric);  // 0.4995
    cert.storage.assign(loops.num_states(), 0.0);
    cert.rotated_cost = rotated_cost_table(loops, cert.storage, cert.ell_star);
    CHECK(verify_certificate(loops, cert).holds);
}

TEST_CASE("supply summed over every orbit is nonnegative") {
    for (auto* make : {make_fig1, make_linear}) {
        TransitionSystem sys = make();
        DissipativityCertificate cert = build_certificate(sys);
        for (const Orbit& orbit : enumerate_minimal_orbits(sys)) {
            double sum = 0.0;
            for (const auto& pair : orbit.pairs)
                sum += supply_rate(sys, pair, cert.orbit, cert.ell_star, cert.alpha_coeff,
                                   cert.metric);
            CHECK(sum >= -1e-9);
        }
    }
}

TEST_CASE("storage obeys the constructive bounds") {
    for (auto* make : {make_fig1, make_linear}) {
        TransitionSystem sys = make();
        DissipativityCertificate cert = build_certificate(sys);
        double cost_min = kInf, cost_max = -kInf, d_max = 0.0;
        for (StateIndex x = 0; x < sys.num_states(); ++x)
            for (const Arc& arc : sys.arcs(x)) {
                cost_min = std::min(cost_min, arc.cost);
                cost_max = std::max(cost_max, arc.cost);
                d_max = std::max(
                    d_max, orbit_distance(sys, {x, arc.input}, cert.orbit, cert.metric));
            }
        double alpha_max = cert.alpha_coeff * d_max;
        double upper = sys.num_states() * (alpha_max - cost_min + cert.ell_star) + 1e-9;
        double lower = -sys.num_states() * (cost_max - cert.ell_star) - 1e-9;
        for (double v : cert.storage) {
            CHECK(v <= upper);
            CHECK(v >= lower);
        }
    }
}

TEST_CASE("rotated cost identity along trajectories") {
    TransitionSystem fig1 = make_fig1();

    // identity storage collapses both sides exactly
    std::vector<double> zero(fig1.num_states(), 0.0);
    std::vector<InputIndex> seq = {*fig1.find_input("u31"), *fig1.find_input("u12"),
                                   *fig1.find_input("u21")};
    CHECK(rotated_cost_identity_check(fig1, DiscountFunction::linear(), 3,
                                      *fig1.find_state("x3"), seq, zero) == 0.0);

    DissipativityCertificate cert = build_certificate(fig1);
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 20; ++trial) {
        Trajectory traj = testsupport::random_trajectory(rng, fig1, 5);
        double defect =
            rotated_cost_identity_check(fig1, DiscountFunction::linear(), 5, traj.initial,
                                        traj.inputs, cert.storage, cert.ell_star);
        CHECK(defect < 1e-12);
    }

    TransitionSystem linear = make_linear();
    DissipativityCertificate cert_lin = build_certificate(linear);
    std::vector<InputIndex> orbit_following;
    for (int k = 0; k < 20; ++k)
        orbit_following.push_back(*linear.find_input(k % 2 == 0 ? "8" : "-8"));
    double defect = rotated_cost_identity_check(linear, DiscountFunction::quadratic(), 20,
                                                *linear.find_state("1"), orbit_following,
                                                cert_lin.storage, cert_lin.ell_star);
    CHECK(defect < 1e-12);
}

TEST_CASE("rotated values increase with the horizon and stay uniformly bounded") {
    for (auto* make : {make_fig1, make_linear}) {
        TransitionSystem sys = make();
        DissipativityCertificate cert = build_certificate(sys);
        auto reach = reachability_horizon(sys, cert.orbit);
        REQUIRE(reach.horizon.has_value());
        double rot_max = 0.0;
        for (const auto& row : cert.rotated_cost)
            for (double v : row) rot_max = std::max(rot_max, v);
        double bound = (*reach.horizon + cert.orbit.period()) * rot_max + 1e-9;

        CostVariant rotated = CostVariant::rotated(cert);
        VIRun run = cvi(sys, rotated, 2000);
        for (int horizon = 1; horizon <= run.n_max(); ++horizon) {
            auto prev = run.values(horizon - 1);
            auto cur = run.values(horizon);
            for (StateIndex x = 0; x < sys.num_states(); ++x) {
                CHECK(cur[x] >= prev[x] - 1e-9);
                CHECK(cur[x] <= bound);
            }
        }

        // same monotone shape for a general discount profile
        for (const DiscountFunction& beta :
             {DiscountFunction::linear(), DiscountFunction::quadratic()}) {
            std::vector<double> previous(sys.num_states(), 0.0);
            for (int horizon = 1; horizon <= 40; ++horizon) {
                BetaValue result = beta_value(sys, beta, rotated, horizon);
                for (StateIndex x = 0; x < sys.num_states(); ++x) {
                    CHECK(result.values[x] >= previous[x] - 1e-9);
                    CHECK(result.values[x] <= bound);
                }
                previous = result.values;
            }
        }
    }
}
