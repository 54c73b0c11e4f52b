#include "cesaro/vi_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cesaro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::size_t arc_position(const TransitionSystem& sys, StateIndex x, InputIndex u) {
    const Arc* arc = sys.find_arc(x, u);
    if (!arc)
        throw InfeasibleInputError("input '" + sys.input_name(u) + "' infeasible at state '" +
                                       sys.state_name(x) + "'",
                                   -1);
    return static_cast<std::size_t>(arc - sys.arcs(x).data());
}

}  // namespace

CostVariant CostVariant::shifted(double ell_star) {
    CostVariant v;
    v.kind = CostKind::shifted;
    v.ell_star = ell_star;
    return v;
}

CostVariant CostVariant::rotated(const DissipativityCertificate& cert) {
    CostVariant v;
    v.kind = CostKind::rotated;
    v.certificate = &cert;
    return v;
}

std::vector<std::vector<double>> resolve_stage_cost(const TransitionSystem& sys,
                                                    const CostVariant& variant) {
    std::vector<std::vector<double>> cost(sys.num_states());
    switch (variant.kind) {
        case CostKind::raw:
        case CostKind::shifted: {
            double shift = 0.0;
            if (variant.kind == CostKind::shifted) {
                if (!std::isfinite(variant.ell_star))
                    throw Error("shifted stage cost needs a finite ell_star");
                shift = variant.ell_star;
            }
            for (StateIndex x = 0; x < sys.num_states(); ++x) {
                auto row = sys.arcs(x);
                cost[x].reserve(row.size());
                for (const Arc& arc : row) cost[x].push_back(arc.cost - shift);
            }
            return cost;
        }
        case CostKind::rotated: {
            if (!variant.certificate) throw Error("rotated stage cost needs a certificate");
            if (!variant.certificate->verdict.holds)
                throw Error("rotated stage cost needs a certificate whose verdict holds");
            const auto& table = variant.certificate->rotated_cost;
            if (static_cast<int>(table.size()) != sys.num_states())
                throw Error("certificate does not match the system");
            return table;
        }
    }
    throw Error("unknown cost variant");
}

VIRun::VIRun(Family family, CostKind variant, int n_max, int num_states)
    : family_(std::move(family)),
      variant_(variant),
      n_max_(n_max),
      num_states_(num_states),
      values_(static_cast<std::size_t>(n_max + 1) * num_states, 0.0),
      policies_(static_cast<std::size_t>(n_max) * num_states, -1) {}

std::span<const double> VIRun::values(int horizon) const {
    if (horizon < 0 || horizon > n_max_) throw Error("horizon out of range");
    return {values_.data() + static_cast<std::size_t>(horizon) * num_states_,
            static_cast<std::size_t>(num_states_)};
}

std::span<const InputIndex> VIRun::policy(int horizon) const {
    if (horizon < 1 || horizon > n_max_) throw Error("horizon out of range");
    return {policies_.data() + static_cast<std::size_t>(horizon - 1) * num_states_,
            static_cast<std::size_t>(num_states_)};
}

ValueTable VIRun::table_at(int horizon) const {
    auto v = values(horizon);
    return {{v.begin(), v.end()}, horizon, family_, variant_};
}

Policy VIRun::policy_at(int horizon) const {
    auto p = policy(horizon);
    return {{p.begin(), p.end()}, horizon, family_};
}

std::optional<int> VIRun::stable_policy_horizon(int window) const {
    if (window < 0) throw Error("window must be non-negative");
    int run_start = 1;
    for (int horizon = 1; horizon <= n_max_; ++horizon) {
        if (horizon > 1) {
            auto prev = policy(horizon - 1);
            auto cur = policy(horizon);
            if (!std::equal(prev.begin(), prev.end(), cur.begin())) run_start = horizon;
        }
        if (horizon - run_start >= window) return run_start;
    }
    return std::nullopt;
}

VIRun run_weighted_vi(const TransitionSystem& sys, const CostVariant& variant, Family family,
                      const std::function<double(int)>& weight, int n_max) {
    if (n_max < 0) throw Error("n_max must be non-negative");
    const auto cost = resolve_stage_cost(sys, variant);
    const int n = sys.num_states();
    VIRun run(std::move(family), variant.kind, n_max, n);

    const double* prev = run.values_.data();
    for (int horizon = 1; horizon <= n_max; ++horizon) {
        const double w = weight(horizon);
        double* cur = run.values_.data() + static_cast<std::size_t>(horizon) * n;
        InputIndex* pol = run.policies_.data() + static_cast<std::size_t>(horizon - 1) * n;
        for (StateIndex x = 0; x < n; ++x) {
            auto row = sys.arcs(x);
            double best = kInf;
            InputIndex arg = -1;
            for (std::size_t a = 0; a < row.size(); ++a) {
                double v = cost[x][a] + w * prev[row[a].next];
                if (v < best) {
                    best = v;
                    arg = row[a].input;
                }
            }
            cur[x] = best;
            pol[x] = arg;
        }
        prev = cur;
    }
    return run;
}

VIRun classic_vi(const TransitionSystem& sys, const CostVariant& variant, int n_max) {
    return run_weighted_vi(sys, variant, Family::classic(), [](int) { return 1.0; }, n_max);
}

VIRun gamma_vi(const TransitionSystem& sys, double gamma, const CostVariant& variant, int n_max) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error("gamma must lie in (0, 1)");
    return run_weighted_vi(sys, variant, Family::discounted(gamma),
                           [gamma](int) { return gamma; }, n_max);
}

VIRun cvi(const TransitionSystem& sys, const CostVariant& variant, int n_max) {
    return run_weighted_vi(sys, variant, Family::cesaro(),
                           [](int horizon) { return (horizon - 1.0) / horizon; }, n_max);
}

CesaroCost cesaro_cost_direct(const TransitionSystem& sys, StateIndex x,
                              std::span<const InputIndex> inputs, const CostVariant& variant) {
    const auto cost = resolve_stage_cost(sys, variant);
    Trajectory traj = simulate(sys, x, inputs);
    const int horizon = traj.length();
    CesaroCost result;
    if (horizon == 0) return result;

    std::vector<double> stage(horizon);
    for (int k = 0; k < horizon; ++k)
        stage[k] = cost[traj.states[k]][arc_position(sys, traj.states[k], traj.inputs[k])];

    double outer = 0.0;
    double prefix = 0.0;
    for (int k = 0; k < horizon; ++k) {
        prefix += stage[k];
        outer += prefix;
    }
    result.double_sum = outer / static_cast<double>(horizon);

    double weighted = 0.0;
    for (int k = 0; k < horizon; ++k)
        weighted += (1.0 - static_cast<double>(k) / horizon) * stage[k];
    result.weighted_sum = weighted;
    return result;
}

DiscountFunction DiscountFunction::linear() {
    return DiscountFunction("linear", 1.0, [](double xi) { return 1.0 - xi; });
}

DiscountFunction DiscountFunction::quadratic() {
    return DiscountFunction("quad", 2.0, [](double xi) { return 1.0 - xi * xi; });
}

DiscountFunction DiscountFunction::from_table(std::string id,
                                              std::vector<std::pair<double, double>> knots) {
    if (knots.size() < 2) throw InvalidDiscountError("discount table needs at least two knots");
    for (std::size_t i = 1; i < knots.size(); ++i)
        if (!(knots[i - 1].first < knots[i].first))
            throw InvalidDiscountError("discount table knots must be strictly increasing in xi");
    double lipschitz = 0.0;
    for (std::size_t i = 1; i < knots.size(); ++i) {
        double slope = (knots[i].second - knots[i - 1].second) /
                       (knots[i].first - knots[i - 1].first);
        lipschitz = std::max(lipschitz, std::abs(slope));
    }
    auto eval = [knots = std::move(knots)](double xi) {
        if (xi <= knots.front().first) return knots.front().second;
        if (xi >= knots.back().first) return knots.back().second;
        auto it = std::upper_bound(knots.begin(), knots.end(), xi,
                                   [](double v, const auto& k) { return v < k.first; });
        const auto& hi = *it;
        const auto& lo = *(it - 1);
        double t = (xi - lo.first) / (hi.first - lo.first);
        return lo.second + t * (hi.second - lo.second);
    };
    return DiscountFunction(std::move(id), lipschitz, std::move(eval));
}

void DiscountFunction::validate() const {
    constexpr double kGrid = 1e-3;
    if (std::abs(eval_(0.0) - 1.0) > 1e-12)
        throw InvalidDiscountError("beta(0) must equal 1");
    if (std::abs(eval_(1.0)) > 1e-12) throw InvalidDiscountError("beta(1) must equal 0");
    double prev = eval_(0.0);
    for (int i = 1; i <= 1000; ++i) {
        double value = eval_(static_cast<double>(i) / 1000.0);
        if (value > prev + 1e-12)
            throw InvalidDiscountError("beta must be non-increasing on [0, 1]");
        prev = value;
    }
    double end_slope = (eval_(1.0) - eval_(1.0 - kGrid)) / kGrid;
    if (!(end_slope <= -1e-6))
        throw InvalidDiscountError("beta must have strictly negative slope at 1");
}

BetaValue beta_value(const TransitionSystem& sys, const DiscountFunction& beta,
                     const CostVariant& variant, int horizon) {
    if (horizon < 1) throw Error("horizon must be at least 1");
    beta.validate();
    const auto cost = resolve_stage_cost(sys, variant);
    const int n = sys.num_states();

    BetaValue result;
    result.horizon = horizon;
    result.policy.assign(n, -1);
    std::vector<double> after(n, 0.0);  // W_{k+1}
    std::vector<double> here(n, 0.0);
    for (int k = horizon - 1; k >= 0; --k) {
        const double w = beta(static_cast<double>(k) / horizon);
        for (StateIndex x = 0; x < n; ++x) {
            auto row = sys.arcs(x);
            double best = kInf;
            InputIndex arg = -1;
            for (std::size_t a = 0; a < row.size(); ++a) {
                double v = w * cost[x][a] + after[row[a].next];
                if (v < best) {
                    best = v;
                    arg = row[a].input;
                }
            }
            here[x] = best;
            if (k == 0) result.policy[x] = arg;
        }
        after.swap(here);
    }
    result.values = std::move(after);
    return result;
}

double brute_force_value(const TransitionSystem& sys, StateIndex x, int horizon,
                         std::span<const double> weights, double cap) {
    if (horizon < 0) throw Error("horizon must be non-negative");
    if (static_cast<int>(weights.size()) < horizon)
        throw Error("need one weight per stage");
    if (horizon > 12) throw ExplosionError("brute force capped at horizon 12");
    if (std::pow(static_cast<double>(std::max(1, sys.max_branching())), horizon) > cap)
        throw ExplosionError("brute force would exceed the branch cap");

    auto rec = [&](auto&& self, StateIndex state, int k) -> double {
        if (k == horizon) return 0.0;
        double best = kInf;
        for (const Arc& arc : sys.arcs(state)) {
            double v = weights[k] * arc.cost + self(self, arc.next, k + 1);
            best = std::min(best, v);
        }
        return best;
    };
    return rec(rec, x, 0);
}

double bellman_residual(const TransitionSystem& sys, const ValueTable& table,
                        const CostVariant& variant) {
    const auto cost = resolve_stage_cost(sys, variant);
    if (static_cast<int>(table.values.size()) != sys.num_states())
        throw Error("value table does not match the system");
    double residual = 0.0;
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        auto row = sys.arcs(x);
        double best = kInf;
        for (std::size_t a = 0; a < row.size(); ++a)
            best = std::min(best, cost[x][a] + table.values[row[a].next]);
        residual = std::max(residual, std::abs(table.values[x] - best));
    }
    return residual;
}

PolicyConvergence policy_convergence(const TransitionSystem& sys, const Family& family,
                                     const CostVariant& variant, int window, int n_cap) {
    if (n_cap < std::max(1, window)) throw Error("n_cap must cover the stability window");
    VIRun run = [&] {
        switch (family.kind) {
            case FamilyKind::classic:
                return classic_vi(sys, variant, n_cap);
            case FamilyKind::gamma:
                return gamma_vi(sys, family.gamma, variant, n_cap);
            case FamilyKind::cesaro:
                return cvi(sys, variant, n_cap);
            case FamilyKind::beta:
                break;
        }
        throw Error("policy convergence needs a horizon-recursive family");
    }();
    PolicyConvergence result;
    result.window = window;
    result.n_cap = n_cap;
    result.n_star = run.stable_policy_horizon(window);
    auto last = run.policy(result.n_star ? *result.n_star : n_cap);
    result.policy.assign(last.begin(), last.end());
    return result;
}

std::vector<double> cvi_difference_sequence(const TransitionSystem& sys, StateIndex x,
                                            int n_max) {
    if (x < 0 || x >= sys.num_states())
        throw UnknownStateError("state index " + std::to_string(x) + " out of range");
    VIRun run = cvi(sys, CostVariant::raw(), n_max);
    std::vector<double> diffs(n_max);
    for (int horizon = 1; horizon <= n_max; ++horizon)
        diffs[horizon - 1] = run.values(horizon)[x] - run.values(horizon - 1)[x];
    return diffs;
}

}  // namespace cesaro
