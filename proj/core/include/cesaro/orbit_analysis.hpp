#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "cesaro/system_model.hpp"

namespace cesaro {

/// How distances between (state, input) pairs are measured.
enum class Metric {
    euclidean,  ///< norm of the stacked coordinate difference; needs full coordinates
    discrete,   ///< 0 when the pair lies on the orbit, 1 otherwise
};

/// euclidean when the system carries full coordinates, otherwise discrete.
Metric default_metric(const TransitionSystem& sys);

/**
 * A feasible p-periodic orbit: p (state, input) pairs whose successors close
 * the cycle. `average_cost` is the left-to-right mean of the stage costs.
 * Minimal orbits visit each of their states exactly once; enumeration returns
 * the rotation starting at the smallest state index.
 */
struct Orbit {
    std::vector<std::pair<StateIndex, InputIndex>> pairs;
    double average_cost = 0.0;
    bool minimal = false;

    int period() const noexcept { return static_cast<int>(pairs.size()); }
    bool contains_state(StateIndex x) const;
    bool contains_pair(StateIndex x, InputIndex u) const;
};

struct EnumerationOptions {
    int p_max = 0;                    ///< 0 means the number of states
    std::uint64_t cap = 1'000'000;    ///< orbit-count cap; CycleCapError beyond
};

/**
 * Every minimal orbit of period <= p_max, each exactly once up to rotation.
 * Result is sorted by (period, lexicographic pair sequence); throws
 * CycleCapError when more than `cap` orbits exist.
 */
std::vector<Orbit> enumerate_minimal_orbits(const TransitionSystem& sys,
                                            const EnumerationOptions& options = {});

struct OptimalOrbit {
    Orbit orbit;
    double ell_star = 0.0;
};

/**
 * Minimal orbit with the smallest average cost; ties fall to the smaller
 * period, then to the lexicographically smallest canonical form. ell_star is
 * its average cost, the optimal asymptotic average performance.
 */
OptimalOrbit optimal_orbit(const TransitionSystem& sys, const EnumerationOptions& options = {});

/// Minimum mean cycle cost computed by Karp's recurrence over walk lengths.
/// Independent of the orbit enumerator; agrees with optimal_orbit's ell_star.
double min_mean_cycle(const TransitionSystem& sys);

struct MinUniqueVerdict {
    bool holds = false;
    std::optional<Orbit> witness;  ///< an optimal-cost orbit off pi_star when violated
};

/**
 * Checks that pi_star is minimal and that every minimal orbit matching its
 * average cost (within `tol`) lies entirely at distance zero from pi_star.
 */
MinUniqueVerdict check_min_unique(const TransitionSystem& sys, const Orbit& pi_star, Metric metric,
                                  double tol = 1e-12, const EnumerationOptions& options = {});

/// min over k of the distance from `pair` to orbit pair k under `metric`.
/// Throws MissingCoordinatesError for euclidean without full coordinates.
double orbit_distance(const TransitionSystem& sys, std::pair<StateIndex, InputIndex> pair,
                      const Orbit& orbit, Metric metric);

/**
 * Result of peeling periodic orbits off a trajectory: the excised orbits (in
 * excision order, with the original time indices they covered) plus a residual
 * of fewer than num_states() indices. For any per-pair function g, the
 * trajectory sum of g splits exactly into orbit sums plus the residual sum.
 */
struct Decomposition {
    std::vector<Orbit> orbits;
    std::vector<std::vector<int>> orbit_time_indices;
    std::vector<int> residual_indices;  // ascending
    Trajectory source;
};

/// Repeatedly excises the earliest-closing cycle (first repeated state in the
/// remaining trajectory) until no state repeats.
Decomposition decompose_trajectory(const TransitionSystem& sys, const Trajectory& traj);

struct Reachability {
    std::optional<int> horizon;           ///< smallest M with every state within M steps of the orbit
    std::vector<StateIndex> unreachable;  ///< states that never reach it
};

/// Backward breadth-first search from the orbit states.
Reachability reachability_horizon(const TransitionSystem& sys, const Orbit& pi_star);

}  // namespace cesaro
