#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "cesaro/system_model.hpp"

namespace cesaro {

/// Three-state system whose classic value iteration oscillates between two
/// policies forever while the Cesaro iteration settles.
TransitionSystem make_fig1();

/// Four-state system with two zero-cost self-loops; the classic limit and the
/// Cesaro limit disagree on every state.
TransitionSystem make_fig2();

/// Integrator x(k+1) = x(k) + u(k) on x in [1,9], u in [-8,8] with
/// x + u in [1,9], stage cost 0.1*((x-4)^2 - (u-4)^2) + 6.3. Costs are exact
/// multiples of 0.1, so the optimal two-cycle (1,8),(9,-8) averages exactly 0.
TransitionSystem make_linear();

/// Lookup by name: "fig1", "fig2", "linear".
std::optional<TransitionSystem> make_builtin(std::string_view name);

const std::vector<std::string>& builtin_names();

}  // namespace cesaro
