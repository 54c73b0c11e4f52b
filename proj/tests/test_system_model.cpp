#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "cesaro/builtins.hpp"
#include "cesaro/system_model.hpp"
#include "test_support.hpp"

using namespace cesaro;

namespace {

constexpr const char* kFig1Text =
    "# two-cycle with a fork state\n"
    "trans x1 u12 x2 -2\n"
    "trans x2 u21 x1 2\n"
    "trans x3 u31 x1 0.1\n"
    "trans x3 u32 x2 0\n";

constexpr const char* kFig2Text =
    "trans x0 u01 x1 2\n"
    "trans x0 u02 x2 1\n"
    "trans x1 u11 x1 0\n"
    "trans x1 u13 x3 -3\n"
    "trans x2 u22 x2 0\n"
    "trans x2 u23 x3 -1\n"
    "trans x3 u30 x0 5\n";

std::vector<InputIndex> inputs_by_name(const TransitionSystem& sys,
                                       std::initializer_list<const char*> names) {
    std::vector<InputIndex> out;
    for (const char* name : names) out.push_back(*sys.find_input(name));
    return out;
}

}  // namespace

TEST_CASE("parse assigns indices in order of first appearance") {
    TransitionSystem sys = parse_system(kFig1Text);
    CHECK(sys.num_states() == 3);
    CHECK(sys.num_inputs() == 4);
    CHECK(sys.num_transitions() == 4);
    CHECK(sys.state_name(0) == "x1");
    CHECK(sys.state_name(1) == "x2");
    CHECK(sys.state_name(2) == "x3");

    const Arc* arc = sys.find_arc(*sys.find_state("x3"), *sys.find_input("u31"));
    REQUIRE(arc != nullptr);
    CHECK(arc->next == *sys.find_state("x1"));
    CHECK(arc->cost == 0.1);
}

TEST_CASE("parse fig2 text") {
    TransitionSystem sys = parse_system(kFig2Text);
    CHECK(sys.num_states() == 4);
    CHECK(sys.num_transitions() == 7);
    const Arc* arc = sys.find_arc(*sys.find_state("x3"), *sys.find_input("u30"));
    REQUIRE(arc != nullptr);
    CHECK(arc->next == *sys.find_state("x0"));
    CHECK(arc->cost == 5.0);
}

TEST_CASE("duplicate transition is a determinism error") {
    std::string text = std::string(kFig1Text) + "trans x1 u12 x1 7\n";
    CHECK_THROWS_AS(parse_system(text), DeterminismError);
}

TEST_CASE("state without feasible inputs is rejected") {
    CHECK_THROWS_AS(parse_system("trans a p b 1\n"), DeadStateError);
}

TEST_CASE("malformed lines carry their line number") {
    try {
        parse_system("trans x1 u12 x2 -2\ntrans x1 u13\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_system("orbit x y\n"), ParseError);
    CHECK_THROWS_AS(parse_system("trans a p a zero\n"), ParseError);
    CHECK_THROWS_AS(parse_system("state a\nstate a\ntrans a p a 1\n"), ParseError);
}

TEST_CASE("explicit declarations attach coordinates") {
    TransitionSystem sys = parse_system(
        "state a 0.5 1\n"
        "state b -1 2\n"
        "input p 0\n"
        "trans a p b 1\n"
        "trans b p a 1\n");
    CHECK(sys.has_full_coordinates());
    CHECK(sys.state_coord(0)[0] == 0.5);
    CHECK(sys.input_coord(0)[0] == 0.0);

    TransitionSystem partial = parse_system(kFig1Text);
    CHECK_FALSE(partial.has_full_coordinates());
}

TEST_CASE("feasible inputs come back in ascending index order") {
    TransitionSystem fig1 = parse_system(kFig1Text);
    CHECK(feasible_inputs(fig1, *fig1.find_state("x3")) == inputs_by_name(fig1, {"u31", "u32"}));
    CHECK(feasible_inputs(fig1, *fig1.find_state("x1")) == inputs_by_name(fig1, {"u12"}));

    TransitionSystem linear = make_linear();
    auto at_one = feasible_inputs(linear, *linear.find_state("1"));
    REQUIRE(at_one.size() == 9);
    for (int u = 0; u <= 8; ++u)
        CHECK(linear.input_name(at_one[u]) == std::to_string(u));
}

TEST_CASE("simulate follows the successor map") {
    TransitionSystem fig1 = parse_system(kFig1Text);
    StateIndex x3 = *fig1.find_state("x3");
    auto inputs = inputs_by_name(fig1, {"u31", "u12"});
    Trajectory traj = simulate(fig1, x3, inputs);
    CHECK(traj.states == std::vector<StateIndex>{*fig1.find_state("x3"), *fig1.find_state("x1"),
                                                 *fig1.find_state("x2")});

    Trajectory empty = simulate(fig1, x3, {});
    CHECK(empty.states == std::vector<StateIndex>{x3});
    CHECK(empty.length() == 0);

    TransitionSystem linear = make_linear();
    Trajectory two_step =
        simulate(linear, *linear.find_state("4"), inputs_by_name(linear, {"5", "-8"}));
    CHECK(two_step.states ==
          std::vector<StateIndex>{*linear.find_state("4"), *linear.find_state("9"),
                                  *linear.find_state("1")});
}

TEST_CASE("infeasible inputs report the failing step") {
    TransitionSystem fig1 = parse_system(kFig1Text);
    auto inputs = inputs_by_name(fig1, {"u31", "u21"});  // u21 infeasible at x1
    try {
        simulate(fig1, *fig1.find_state("x3"), inputs);
        FAIL("expected InfeasibleInputError");
    } catch (const InfeasibleInputError& e) {
        CHECK(e.step() == 1);
    }
}

TEST_CASE("total cost sums edge costs left to right") {
    TransitionSystem linear = make_linear();
    Trajectory via_orbit =
        simulate(linear, *linear.find_state("4"), inputs_by_name(linear, {"5", "-8"}));
    CHECK(total_cost(linear, via_orbit) == doctest::Approx(0.6).epsilon(1e-12));
    Trajectory direct = simulate(linear, *linear.find_state("4"), inputs_by_name(linear, {"-3"}));
    CHECK(total_cost(linear, direct) == doctest::Approx(1.4).epsilon(1e-12));

    TransitionSystem fig1 = parse_system(kFig1Text);
    Trajectory cycle =
        simulate(fig1, *fig1.find_state("x1"), inputs_by_name(fig1, {"u12", "u21"}));
    CHECK(total_cost(fig1, cycle) == 0.0);
    CHECK(total_cost(fig1, cycle, 0.5) == -1.0);
}

TEST_CASE("builder rejects out-of-range indices") {
    SystemBuilder builder;
    builder.state("a");
    builder.input("p");
    CHECK_THROWS_AS(builder.add_transition(0, 0, 3, 1.0), UnknownStateError);
    CHECK_THROWS_AS(builder.add_transition(0, 2, 0, 1.0), UnknownInputError);
}

TEST_CASE("serialize/parse round-trip preserves indices and bit-exact costs") {
    std::mt19937_64 rng(20240811);
    for (int trial = 0; trial < 50; ++trial) {
        TransitionSystem sys = testsupport::random_system(rng, {6, 3, -2.0, 2.0});
        std::string text = serialize_system(sys);
        TransitionSystem reparsed = parse_system(text);
        REQUIRE(reparsed.num_states() == sys.num_states());
        REQUIRE(reparsed.num_inputs() == sys.num_inputs());
        REQUIRE(reparsed.num_transitions() == sys.num_transitions());
        for (StateIndex x = 0; x < sys.num_states(); ++x) {
            CHECK(reparsed.state_name(x) == sys.state_name(x));
            auto expected = sys.arcs(x);
            auto actual = reparsed.arcs(x);
            REQUIRE(actual.size() == expected.size());
            for (std::size_t a = 0; a < expected.size(); ++a) {
                CHECK(actual[a].input == expected[a].input);
                CHECK(actual[a].next == expected[a].next);
                CHECK(actual[a].cost == expected[a].cost);  // bit-equal
            }
        }
        CHECK(serialize_system(reparsed) == text);
    }

    TransitionSystem linear = make_linear();
    TransitionSystem reparsed = parse_system(serialize_system(linear));
    CHECK(reparsed.num_transitions() == 81);
    CHECK(reparsed.has_full_coordinates());
}

TEST_CASE("simulate then total_cost matches the direct edge sum exactly") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 30; ++trial) {
        TransitionSystem sys = testsupport::random_system(rng);
        Trajectory traj = testsupport::random_trajectory(rng, sys, 40);
        double direct = 0.0;
        for (int k = 0; k < traj.length(); ++k)
            direct += sys.find_arc(traj.states[k], traj.inputs[k])->cost;
        CHECK(total_cost(sys, traj) == direct);
    }
}

TEST_CASE("cost offset shifts every stage cost") {
    TransitionSystem fig1 = parse_system(kFig1Text);
    TransitionSystem shifted = with_cost_offset(fig1, 2.0);
    for (StateIndex x = 0; x < fig1.num_states(); ++x) {
        auto before = fig1.arcs(x);
        auto after = shifted.arcs(x);
        for (std::size_t a = 0; a < before.size(); ++a)
            CHECK(after[a].cost == before[a].cost + 2.0);
    }
}

TEST_CASE("builtins match their documented shape") {
    CHECK(make_fig1().num_transitions() == 4);
    CHECK(make_fig2().num_transitions() == 7);
    TransitionSystem linear = make_linear();
    CHECK(linear.num_states() == 9);
    CHECK(linear.num_inputs() == 17);
    CHECK(linear.num_transitions() == 81);
    CHECK_FALSE(make_builtin("nope").has_value());
    CHECK(builtin_names().size() == 3);
}
