#include "cesaro/builtins.hpp"

#include <string>

namespace cesaro {

TransitionSystem make_fig1() {
    SystemBuilder builder;
    builder.add_transition("x1", "u12", "x2", -2.0);
    builder.add_transition("x2", "u21", "x1", 2.0);
    builder.add_transition("x3", "u31", "x1", 0.1);
    builder.add_transition("x3", "u32", "x2", 0.0);
    return builder.build();
}

TransitionSystem make_fig2() {
    SystemBuilder builder;
    builder.add_transition("x0", "u01", "x1", 2.0);
    builder.add_transition("x0", "u02", "x2", 1.0);
    builder.add_transition("x1", "u11", "x1", 0.0);
    builder.add_transition("x1", "u13", "x3", -3.0);
    builder.add_transition("x2", "u22", "x2", 0.0);
    builder.add_transition("x2", "u23", "x3", -1.0);
    builder.add_transition("x3", "u30", "x0", 5.0);
    return builder.build();
}

TransitionSystem make_linear() {
    SystemBuilder builder;
    for (int x = 1; x <= 9; ++x)
        builder.declare_state(std::to_string(x), {static_cast<double>(x)});
    for (int u = -8; u <= 8; ++u)
        builder.declare_input(std::to_string(u), {static_cast<double>(u)});
    for (int x = 1; x <= 9; ++x) {
        for (int u = -8; u <= 8; ++u) {
            int next = x + u;
            if (next < 1 || next > 9) continue;
            // All costs are integer multiples of 0.1; the factored form keeps
            // the two legs of the optimal cycle exact negatives of each other.
            int tenths = (x - 4) * (x - 4) - (u - 4) * (u - 4) + 63;
            builder.add_transition(std::to_string(x), std::to_string(u), std::to_string(next),
                                   0.1 * static_cast<double>(tenths));
        }
    }
    return builder.build();
}

std::optional<TransitionSystem> make_builtin(std::string_view name) {
    if (name == "fig1") return make_fig1();
    if (name == "fig2") return make_fig2();
    if (name == "linear") return make_linear();
    return std::nullopt;
}

const std::vector<std::string>& builtin_names() {
    static const std::vector<std::string> names = {"fig1", "fig2", "linear"};
    return names;
}

}  // namespace cesaro
