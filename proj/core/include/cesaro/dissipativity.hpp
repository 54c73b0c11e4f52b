#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cesaro/orbit_analysis.hpp"
#include "cesaro/system_model.hpp"

namespace cesaro {

struct CertificateOptions {
    std::optional<Metric> metric;       ///< default: default_metric(sys)
    double epsilon = 1e-3;              ///< safety margin keeping alpha_max below delta
    double default_alpha_coeff = 1.0;   ///< used when no second orbit constrains alpha
    double tol_equal = 1e-12;           ///< equality tolerance on averages
    double min_gap = 1e-9;              ///< smallest acceptable suboptimality gap
    EnumerationOptions enumeration;
};

struct CertificateVerdict {
    bool holds = false;
    StateIndex state = -1;   ///< worst pair (also filled when holds)
    InputIndex input = -1;
    double margin = 0.0;     ///< min over pairs of rotated cost minus alpha(distance)
};

/**
 * Constructive strict-dissipativity certificate around the optimal orbit:
 * gap delta between the optimal and the next-best orbit average, a linear
 * bound alpha(r) = alpha_coeff * r with alpha_max < delta, the available
 * storage lambda per state, and the rotated stage cost
 *
 *   rotated(x, u) = cost(x, u) - ell_star + lambda(x) - lambda(f(x, u)),
 *
 * which vanishes on the orbit and dominates alpha(distance) everywhere when
 * the verdict holds.
 */
struct DissipativityCertificate {
    double delta = 0.0;  ///< +infinity when no second orbit exists
    double alpha_coeff = 0.0;
    std::vector<double> storage;                    ///< lambda, indexed by state
    double lambda_bar = 0.0;                        ///< max |lambda|
    std::vector<std::vector<double>> rotated_cost;  ///< aligned with sys.arcs(x)
    Orbit orbit;
    double ell_star = 0.0;
    Metric metric = Metric::discrete;
    CertificateVerdict verdict;

    /// Rotated cost of (x, u); throws UnknownInputError when u is infeasible at x.
    double rotated_at(const TransitionSystem& sys, StateIndex x, InputIndex u) const;
};

/**
 * Smallest positive distance in average cost from ell_star to any other
 * minimal orbit; +infinity when every minimal orbit attains ell_star.
 * Throws GapNotPositiveError when the gap is positive but below min_gap.
 */
double suboptimality_gap(const TransitionSystem& sys, double ell_star, double tol_equal = 1e-12,
                         double min_gap = 1e-9, const EnumerationOptions& options = {});

/**
 * Coefficient c of alpha(r) = c * r with (1 - epsilon) slack below
 * delta / D_max, where D_max is the largest feasible-pair distance to the
 * orbit. Falls back to default_coeff when delta is infinite or D_max is zero.
 */
double build_alpha(double delta, const TransitionSystem& sys, const Orbit& pi_star, Metric metric,
                   double epsilon = 1e-3, double default_coeff = 1.0);

/// Supply rate s(x, u) = cost(x, u) - ell_star - alpha_coeff * distance((x, u), pi_star).
double supply_rate(const TransitionSystem& sys, std::pair<StateIndex, InputIndex> pair,
                   const Orbit& pi_star, double ell_star, double alpha_coeff, Metric metric);

/// Supply rate of every feasible pair, aligned with sys.arcs(x).
std::vector<std::vector<double>> supply_rate_table(const TransitionSystem& sys,
                                                   const Orbit& pi_star, double ell_star,
                                                   double alpha_coeff, Metric metric);

/**
 * Available storage: per state the supremum of accumulated negative supply
 * over all feasible continuations, via the fixpoint
 *
 *   lambda(x) <- max(0, max_u [ -s(x, u) + lambda(f(x, u)) ]).
 *
 * Improvements below 1e-12 count as converged. Throws PositiveCycleError when
 * values still grow after num_states * num_transitions sweeps.
 */
std::vector<double> available_storage(const TransitionSystem& sys,
                                      const std::vector<std::vector<double>>& supply);

/// rotated(x, u) = cost(x, u) - ell_star + lambda(x) - lambda(f(x, u)) per feasible pair.
std::vector<std::vector<double>> rotated_cost_table(const TransitionSystem& sys,
                                                    const std::vector<double>& lambda,
                                                    double ell_star);

/// Scans every feasible pair for rotated >= alpha(distance) - tol; reports the
/// worst pair and its margin.
CertificateVerdict verify_certificate(const TransitionSystem& sys,
                                      const DissipativityCertificate& cert, double tol = 1e-9);

/**
 * Full pipeline: enumerate orbits, pick the optimal one, check minimality and
 * uniqueness (NonUniqueOrbitError on violation), compute delta, alpha, the
 * storage fixpoint and the rotated cost table, then verify.
 */
DissipativityCertificate build_certificate(const TransitionSystem& sys,
                                           const CertificateOptions& options = {});

class DiscountFunction;  // vi_engine.hpp

/**
 * Absolute defect between the two routes of the rotated-cost identity along a
 * trajectory: sum of beta(k/N) * rotated_k versus the shifted cost plus
 * boundary storage terms
 *
 *   lambda(x(0)) - sum_{k=1..N} (beta((k-1)/N) - beta(k/N)) * lambda(x(k)).
 *
 * The defect is independent of ell_star (the shift cancels).
 */
double rotated_cost_identity_check(const TransitionSystem& sys, const DiscountFunction& beta,
                                   int horizon, StateIndex x, std::span<const InputIndex> inputs,
                                   const std::vector<double>& lambda, double ell_star = 0.0);

}  // namespace cesaro
