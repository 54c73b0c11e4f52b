#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cesaro/errors.hpp"

namespace cesaro {

using StateIndex = int;
using InputIndex = int;

/// One feasible transition out of a state.
struct Arc {
    InputIndex input;
    StateIndex next;
    double cost;
};

/**
 * Finite deterministic constrained system x(k+1) = f(x(k), u(k)) with a stage
 * cost on every feasible (state, input) pair.
 *
 * States and inputs carry symbolic names and optional real coordinate vectors;
 * internally both are dense 0-based indices assigned in order of first
 * appearance. Immutable after construction; all member queries are const and
 * safe to call concurrently.
 */
class TransitionSystem {
public:
    int num_states() const noexcept { return static_cast<int>(state_names_.size()); }
    int num_inputs() const noexcept { return static_cast<int>(input_names_.size()); }
    int num_transitions() const noexcept { return num_transitions_; }

    const std::string& state_name(StateIndex x) const { return state_names_.at(x); }
    const std::string& input_name(InputIndex u) const { return input_names_.at(u); }

    std::optional<StateIndex> find_state(std::string_view name) const;
    std::optional<InputIndex> find_input(std::string_view name) const;

    /// Coordinate vector attached to a state (empty when none was declared).
    std::span<const double> state_coord(StateIndex x) const { return state_coords_.at(x); }
    std::span<const double> input_coord(InputIndex u) const { return input_coords_.at(u); }

    /// True when every state and every input carries coordinates of a uniform
    /// dimension, so that the euclidean pair metric is defined.
    bool has_full_coordinates() const noexcept { return full_coordinates_; }

    /// Feasible transitions out of x, ascending by input index. Never empty.
    std::span<const Arc> arcs(StateIndex x) const { return arcs_.at(x); }

    /// Transition for (x, u), or nullptr when u is infeasible at x.
    const Arc* find_arc(StateIndex x, InputIndex u) const;

    /// Largest feasible input set over all states.
    int max_branching() const noexcept { return max_branching_; }

private:
    friend class SystemBuilder;
    TransitionSystem() = default;

    std::vector<std::string> state_names_;
    std::vector<std::string> input_names_;
    std::vector<std::vector<double>> state_coords_;
    std::vector<std::vector<double>> input_coords_;
    std::vector<std::vector<Arc>> arcs_;
    std::unordered_map<std::string, StateIndex> state_lookup_;
    std::unordered_map<std::string, InputIndex> input_lookup_;
    int num_transitions_ = 0;
    int max_branching_ = 0;
    bool full_coordinates_ = false;
};

/**
 * Incremental construction of a TransitionSystem.
 *
 * Names may be declared explicitly (with optional coordinates) or implicitly
 * by first use in a transition; indices follow order of first appearance in
 * either form.
 */
class SystemBuilder {
public:
    /// Explicit declaration; attaches coordinates. Throws ParseError if the
    /// name was already declared explicitly.
    StateIndex declare_state(std::string_view name, std::vector<double> coord = {});
    InputIndex declare_input(std::string_view name, std::vector<double> coord = {});

    /// Find-or-create by name (implicit declaration, no coordinates).
    StateIndex state(std::string_view name);
    InputIndex input(std::string_view name);

    /// Throws DeterminismError when (from, input) already has a transition,
    /// UnknownStateError / UnknownInputError on out-of-range indices.
    void add_transition(StateIndex from, InputIndex input, StateIndex to, double cost);
    void add_transition(std::string_view from, std::string_view input, std::string_view to,
                        double cost);

    /// Validates and returns the finished system. Throws DeadStateError when
    /// some state has no feasible input.
    TransitionSystem build();

private:
    TransitionSystem sys_;
    std::vector<bool> state_explicit_;
    std::vector<bool> input_explicit_;
};

/// A realized run of the system: N inputs and the N+1 visited states.
struct Trajectory {
    StateIndex initial = 0;
    std::vector<InputIndex> inputs;
    std::vector<StateIndex> states;  // states.front() == initial

    int length() const noexcept { return static_cast<int>(inputs.size()); }
};

/**
 * Parses the line-oriented system file format:
 *
 *   state <name> [<c1> <c2> ...]
 *   input <name> [<c1> <c2> ...]
 *   trans <state> <input> <succ-state> <cost>
 *
 * `#` starts a comment, blank lines are ignored, tokens are whitespace
 * separated. States/inputs first seen in a `trans` line are declared
 * implicitly without coordinates.
 */
TransitionSystem parse_system(std::string_view text);

/// Reads the file at `path` and parses it; file-access problems surface as ParseError.
TransitionSystem parse_system_file(const std::string& path);

/// Text round-trip companion of parse_system: parse(serialize(s)) reproduces
/// `s` with identical indices and bit-equal costs.
std::string serialize_system(const TransitionSystem& sys);

/// Inputs feasible at x, ascending by input index (this is the global
/// tie-break order for every argmin in the library).
std::vector<InputIndex> feasible_inputs(const TransitionSystem& sys, StateIndex x);

/// Rolls the system forward from x0 under the given inputs.
/// Throws InfeasibleInputError at the first infeasible step.
Trajectory simulate(const TransitionSystem& sys, StateIndex x0, std::span<const InputIndex> inputs);

/// Sum over k of (cost(x(k), u(k)) - shift), accumulated left to right.
double total_cost(const TransitionSystem& sys, const Trajectory& traj, double shift = 0.0);

/// Copy of the system with `delta` added to every stage cost.
TransitionSystem with_cost_offset(const TransitionSystem& sys, double delta);

}  // namespace cesaro
