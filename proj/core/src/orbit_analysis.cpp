#include "cesaro/orbit_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <stdexcept>

namespace cesaro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double orbit_average(const TransitionSystem& sys,
                     const std::vector<std::pair<StateIndex, InputIndex>>& pairs) {
    double sum = 0.0;
    for (const auto& [x, u] : pairs) sum += sys.find_arc(x, u)->cost;
    return sum / static_cast<double>(pairs.size());
}

}  // namespace

Metric default_metric(const TransitionSystem& sys) {
    return sys.has_full_coordinates() ? Metric::euclidean : Metric::discrete;
}

bool Orbit::contains_state(StateIndex x) const {
    for (const auto& p : pairs)
        if (p.first == x) return true;
    return false;
}

bool Orbit::contains_pair(StateIndex x, InputIndex u) const {
    for (const auto& p : pairs)
        if (p.first == x && p.second == u) return true;
    return false;
}

std::vector<Orbit> enumerate_minimal_orbits(const TransitionSystem& sys,
                                            const EnumerationOptions& options) {
    const int n = sys.num_states();
    const int p_max = options.p_max > 0 ? options.p_max : n;
    if (p_max < 1) throw Error("p_max must be at least 1");

    std::vector<Orbit> orbits;
    std::vector<std::pair<StateIndex, InputIndex>> path;
    std::vector<bool> on_path(n, false);

    // Every simple cycle is produced exactly once: from its smallest state
    // index, visiting only larger indices along the way.
    StateIndex start = 0;
    auto dfs = [&](auto&& self, StateIndex current) -> void {
        for (const Arc& arc : sys.arcs(current)) {
            if (arc.next == start) {
                if (orbits.size() >= options.cap)
                    throw CycleCapError("more than " + std::to_string(options.cap) +
                                        " minimal orbits; raise the cap or use the minimum "
                                        "mean cycle for the optimal average alone");
                Orbit orbit;
                orbit.pairs = path;
                orbit.pairs.emplace_back(current, arc.input);
                orbit.average_cost = orbit_average(sys, orbit.pairs);
                orbit.minimal = true;
                orbits.push_back(std::move(orbit));
            } else if (arc.next > start && !on_path[arc.next] &&
                       static_cast<int>(path.size()) + 2 <= p_max) {
                path.emplace_back(current, arc.input);
                on_path[arc.next] = true;
                self(self, arc.next);
                on_path[arc.next] = false;
                path.pop_back();
            }
        }
    };
    for (start = 0; start < n; ++start) {
        on_path[start] = true;
        dfs(dfs, start);
        on_path[start] = false;
    }

    std::sort(orbits.begin(), orbits.end(), [](const Orbit& a, const Orbit& b) {
        if (a.period() != b.period()) return a.period() < b.period();
        return a.pairs < b.pairs;
    });
    return orbits;
}

OptimalOrbit optimal_orbit(const TransitionSystem& sys, const EnumerationOptions& options) {
    auto orbits = enumerate_minimal_orbits(sys, options);
    if (orbits.empty()) throw Error("system has no periodic orbit");  // excluded by validation
    const Orbit* best = &orbits.front();
    for (const Orbit& orbit : orbits)
        if (orbit.average_cost < best->average_cost) best = &orbit;
    return {*best, best->average_cost};
}

double min_mean_cycle(const TransitionSystem& sys) {
    // Karp's recurrence with a super-source that reaches every state at cost 0.
    const int n = sys.num_states();
    const int rounds = n + 1;
    std::vector<double> prev(n, 0.0);  // walk length 1: exactly the source edges
    std::vector<std::vector<double>> best_by_len(rounds + 1, std::vector<double>(n, kInf));
    best_by_len[1] = prev;
    std::vector<double> cur(n);
    for (int k = 2; k <= rounds; ++k) {
        std::fill(cur.begin(), cur.end(), kInf);
        for (StateIndex x = 0; x < n; ++x) {
            if (prev[x] == kInf) continue;
            for (const Arc& arc : sys.arcs(x))
                cur[arc.next] = std::min(cur[arc.next], prev[x] + arc.cost);
        }
        best_by_len[k] = cur;
        prev = cur;
    }
    double mu = kInf;
    for (StateIndex v = 0; v < n; ++v) {
        if (best_by_len[rounds][v] == kInf) continue;
        double worst = -kInf;
        for (int k = 1; k < rounds; ++k) {
            if (best_by_len[k][v] == kInf) continue;
            double mean = (best_by_len[rounds][v] - best_by_len[k][v]) /
                          static_cast<double>(rounds - k);
            worst = std::max(worst, mean);
        }
        if (worst > -kInf) mu = std::min(mu, worst);
    }
    return mu;
}

MinUniqueVerdict check_min_unique(const TransitionSystem& sys, const Orbit& pi_star, Metric metric,
                                  double tol, const EnumerationOptions& options) {
    if (!pi_star.minimal) return {false, pi_star};
    for (const Orbit& orbit : enumerate_minimal_orbits(sys, options)) {
        if (std::abs(orbit.average_cost - pi_star.average_cost) > tol) continue;
        for (const auto& pair : orbit.pairs)
            if (orbit_distance(sys, pair, pi_star, metric) > 0.0) return {false, orbit};
    }
    return {true, std::nullopt};
}

double orbit_distance(const TransitionSystem& sys, std::pair<StateIndex, InputIndex> pair,
                      const Orbit& orbit, Metric metric) {
    if (orbit.pairs.empty()) throw Error("distance to an empty orbit");
    if (metric == Metric::discrete)
        return orbit.contains_pair(pair.first, pair.second) ? 0.0 : 1.0;

    if (!sys.has_full_coordinates())
        throw MissingCoordinatesError(
            "euclidean pair distance needs coordinates on every state and input");
    auto xc = sys.state_coord(pair.first);
    auto uc = sys.input_coord(pair.second);
    double best = kInf;
    for (const auto& [ox, ou] : orbit.pairs) {
        auto oxc = sys.state_coord(ox);
        auto ouc = sys.input_coord(ou);
        double sq = 0.0;
        for (std::size_t i = 0; i < xc.size(); ++i) {
            double d = xc[i] - oxc[i];
            sq += d * d;
        }
        for (std::size_t i = 0; i < uc.size(); ++i) {
            double d = uc[i] - ouc[i];
            sq += d * d;
        }
        best = std::min(best, std::sqrt(sq));
    }
    return best;
}

Decomposition decompose_trajectory(const TransitionSystem& sys, const Trajectory& traj) {
    struct Entry {
        StateIndex state;
        InputIndex input;
        int orig;
    };
    std::vector<Entry> remaining;
    remaining.reserve(traj.length());
    for (int k = 0; k < traj.length(); ++k)
        remaining.push_back({traj.states[k], traj.inputs[k], k});
    const StateIndex final_state = traj.states.empty() ? traj.initial : traj.states.back();

    Decomposition result;
    result.source = traj;

    std::vector<int> seen_at(sys.num_states(), -1);
    bool excised = true;
    while (excised) {
        excised = false;
        std::fill(seen_at.begin(), seen_at.end(), -1);
        const int m = static_cast<int>(remaining.size());
        for (int j = 0; j <= m; ++j) {
            StateIndex s = j < m ? remaining[j].state : final_state;
            int i = seen_at[s];
            if (i >= 0) {
                Orbit orbit;
                std::vector<int> indices;
                for (int t = i; t < j; ++t) {
                    orbit.pairs.emplace_back(remaining[t].state, remaining[t].input);
                    indices.push_back(remaining[t].orig);
                }
                orbit.average_cost = orbit_average(sys, orbit.pairs);
                orbit.minimal = true;
                result.orbits.push_back(std::move(orbit));
                result.orbit_time_indices.push_back(std::move(indices));
                remaining.erase(remaining.begin() + i, remaining.begin() + j);
                excised = true;
                break;
            }
            seen_at[s] = j;
        }
    }
    for (const Entry& e : remaining) result.residual_indices.push_back(e.orig);

    // The covered time indices must partition 0..N-1 exactly.
    std::vector<int> covered = result.residual_indices;
    for (const auto& idx : result.orbit_time_indices)
        covered.insert(covered.end(), idx.begin(), idx.end());
    std::sort(covered.begin(), covered.end());
    if (static_cast<int>(covered.size()) != traj.length())
        throw std::logic_error("decomposition index count mismatch");
    for (int k = 0; k < traj.length(); ++k)
        if (covered[k] != k) throw std::logic_error("decomposition lost a time index");

    double lhs = total_cost(sys, traj);
    double rhs = 0.0;
    for (const Orbit& orbit : result.orbits)
        for (const auto& [x, u] : orbit.pairs) rhs += sys.find_arc(x, u)->cost;
    for (int k : result.residual_indices)
        rhs += sys.find_arc(traj.states[k], traj.inputs[k])->cost;
    if (std::abs(lhs - rhs) > 1e-9)
        throw std::logic_error("decomposition cost identity violated");

    return result;
}

Reachability reachability_horizon(const TransitionSystem& sys, const Orbit& pi_star) {
    const int n = sys.num_states();
    std::vector<std::vector<StateIndex>> predecessors(n);
    for (StateIndex x = 0; x < n; ++x)
        for (const Arc& arc : sys.arcs(x)) predecessors[arc.next].push_back(x);

    std::vector<int> dist(n, -1);
    std::deque<StateIndex> queue;
    for (const auto& [x, u] : pi_star.pairs) {
        if (dist[x] == -1) {
            dist[x] = 0;
            queue.push_back(x);
        }
    }
    while (!queue.empty()) {
        StateIndex v = queue.front();
        queue.pop_front();
        for (StateIndex p : predecessors[v]) {
            if (dist[p] == -1) {
                dist[p] = dist[v] + 1;
                queue.push_back(p);
            }
        }
    }
    Reachability result;
    int horizon = 0;
    for (StateIndex x = 0; x < n; ++x) {
        if (dist[x] == -1)
            result.unreachable.push_back(x);
        else
            horizon = std::max(horizon, dist[x]);
    }
    if (result.unreachable.empty()) result.horizon = horizon;
    return result;
}

}  // namespace cesaro
