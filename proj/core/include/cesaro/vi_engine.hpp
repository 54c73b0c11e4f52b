#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cesaro/dissipativity.hpp"
#include "cesaro/system_model.hpp"

namespace cesaro {

enum class CostKind {
    raw,      ///< the stage cost as stored
    shifted,  ///< stage cost minus ell_star
    rotated,  ///< rotated cost from a verified certificate
};

/// Which stage cost a value iteration runs on.
struct CostVariant {
    CostKind kind = CostKind::raw;
    double ell_star = 0.0;
    const DissipativityCertificate* certificate = nullptr;

    static CostVariant raw() { return {}; }
    static CostVariant shifted(double ell_star);
    static CostVariant rotated(const DissipativityCertificate& cert);
};

/// Materializes the per-arc stage costs for a variant, aligned with sys.arcs(x).
/// Throws Error when the variant's requirements are not met (finite ell_star,
/// verified certificate).
std::vector<std::vector<double>> resolve_stage_cost(const TransitionSystem& sys,
                                                    const CostVariant& variant);

enum class FamilyKind { classic, gamma, cesaro, beta };

struct Family {
    FamilyKind kind = FamilyKind::cesaro;
    double gamma = 0.0;    ///< gamma family only
    std::string beta_id;   ///< beta family only

    static Family classic() { return {FamilyKind::classic, 0.0, {}}; }
    static Family discounted(double gamma) { return {FamilyKind::gamma, gamma, {}}; }
    static Family cesaro() { return {FamilyKind::cesaro, 0.0, {}}; }
    static Family beta(std::string id) { return {FamilyKind::beta, 0.0, std::move(id)}; }
};

/// State-indexed values at one horizon, tagged with how they were produced.
struct ValueTable {
    std::vector<double> values;
    int horizon = 0;
    Family family;
    CostKind variant = CostKind::raw;
};

/// State-indexed greedy inputs at one horizon. Ties resolve to the smallest
/// input index.
struct Policy {
    std::vector<InputIndex> choice;
    int horizon = 0;
    Family family;
};

/**
 * A full horizon sweep of one value-iteration family: values for N = 0..n_max
 * and the greedy policy recorded at every N >= 1. Tables are bit-reproducible:
 * states sweep in index order, inputs scan in index order.
 */
class VIRun {
public:
    VIRun(Family family, CostKind variant, int n_max, int num_states);

    int n_max() const noexcept { return n_max_; }
    const Family& family() const noexcept { return family_; }
    CostKind variant() const noexcept { return variant_; }

    std::span<const double> values(int horizon) const;
    std::span<const InputIndex> policy(int horizon) const;  // horizon >= 1
    ValueTable table_at(int horizon) const;
    Policy policy_at(int horizon) const;

    /// Smallest N >= 1 whose greedy policy is identical across [N, N+window];
    /// empty when no such window exists below n_max.
    std::optional<int> stable_policy_horizon(int window) const;

private:
    friend VIRun run_weighted_vi(const TransitionSystem&, const CostVariant&, Family,
                                 const std::function<double(int)>&, int);
    Family family_;
    CostKind variant_;
    int n_max_;
    int num_states_;
    std::vector<double> values_;        // (n_max + 1) x num_states
    std::vector<InputIndex> policies_;  // n_max x num_states
};

/// Classic undiscounted value iteration: V_N(x) = min_u [ c(x,u) + V_{N-1}(f(x,u)) ], V_0 = 0.
VIRun classic_vi(const TransitionSystem& sys, const CostVariant& variant, int n_max);

/// Constant-discount value iteration: V_N(x) = min_u [ c(x,u) + gamma * V_{N-1}(f(x,u)) ].
VIRun gamma_vi(const TransitionSystem& sys, double gamma, const CostVariant& variant, int n_max);

/// Cesaro value iteration: V_N(x) = min_u [ c(x,u) + ((N-1)/N) * V_{N-1}(f(x,u)) ].
/// Its horizon-N table optimizes the linearly discounted cost with weights (1 - k/N).
VIRun cvi(const TransitionSystem& sys, const CostVariant& variant, int n_max);

/// Both algebraic routes to the Cesaro cost of one trajectory: the averaged
/// double sum (1/N) sum_n sum_{k<=n} c_k and the weighted single sum
/// sum_k (1 - k/N) c_k. Equal up to floating-point roundoff.
struct CesaroCost {
    double double_sum = 0.0;
    double weighted_sum = 0.0;
};
CesaroCost cesaro_cost_direct(const TransitionSystem& sys, StateIndex x,
                              std::span<const InputIndex> inputs, const CostVariant& variant);

/**
 * Discount profile beta : [0,1] -> [0,1]. Validity (checked on a 1e-3 grid):
 * beta(0) = 1, beta(1) = 0, non-increasing, and strictly negative slope at the
 * right end.
 */
class DiscountFunction {
public:
    static DiscountFunction linear();     ///< beta(xi) = 1 - xi
    static DiscountFunction quadratic();  ///< beta(xi) = 1 - xi^2, id "quad"
    /// Piecewise-linear interpolation through (xi, value) knots sorted by xi.
    static DiscountFunction from_table(std::string id,
                                       std::vector<std::pair<double, double>> knots);

    double operator()(double xi) const { return eval_(xi); }
    const std::string& id() const noexcept { return id_; }
    double lipschitz() const noexcept { return lipschitz_; }

    /// Throws InvalidDiscountError when the grid checks fail.
    void validate() const;

private:
    DiscountFunction(std::string id, double lipschitz, std::function<double(double)> eval)
        : id_(std::move(id)), lipschitz_(lipschitz), eval_(std::move(eval)) {}
    std::string id_;
    double lipschitz_ = 0.0;
    std::function<double(double)> eval_;
};

/// Exact finite-horizon optimum of sum_k beta(k/N) c_k via backward induction
/// with stage-dependent weights (no horizon recursion exists for general
/// beta). The returned policy is the greedy choice of the first stage.
struct BetaValue {
    std::vector<double> values;
    std::vector<InputIndex> policy;
    int horizon = 0;
};
BetaValue beta_value(const TransitionSystem& sys, const DiscountFunction& beta,
                     const CostVariant& variant, int horizon);

/// Exhaustive minimum of sum_k weights[k] * cost_k over every feasible input
/// sequence from x. Throws ExplosionError when horizon > 12 or the branch
/// count exceeds `cap`.
double brute_force_value(const TransitionSystem& sys, StateIndex x, int horizon,
                         std::span<const double> weights, double cap = 1e7);

/// max over x of | V(x) - min_u [ c(x,u) + V(f(x,u)) ] |.
double bellman_residual(const TransitionSystem& sys, const ValueTable& table,
                        const CostVariant& variant);

struct PolicyConvergence {
    std::optional<int> n_star;         ///< empty when not converged within n_cap
    std::vector<InputIndex> policy;    ///< the stable policy (final one when not converged)
    int window = 0;
    int n_cap = 0;
};

/// Runs the family to n_cap and reports the smallest horizon from which the
/// greedy policy stays unchanged over `window` further iterations.
PolicyConvergence policy_convergence(const TransitionSystem& sys, const Family& family,
                                     const CostVariant& variant, int window = 50,
                                     int n_cap = 5000);

/// Differences d_N = V_N(x) - V_{N-1}(x) of the Cesaro iteration on the raw
/// stage cost, N = 1..n_max; they approach half the optimal average cost.
std::vector<double> cvi_difference_sequence(const TransitionSystem& sys, StateIndex x, int n_max);

}  // namespace cesaro
