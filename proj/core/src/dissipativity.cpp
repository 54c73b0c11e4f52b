#include "cesaro/dissipativity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cesaro/csv_io.hpp"
#include "cesaro/vi_engine.hpp"

namespace cesaro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Improvements at or below this size count as converged in the storage
// fixpoint; keeps roundoff-level cycle sums from masquerading as growth.
constexpr double kFixpointTol = 1e-12;

}  // namespace

double DissipativityCertificate::rotated_at(const TransitionSystem& sys, StateIndex x,
                                            InputIndex u) const {
    auto row = sys.arcs(x);
    for (std::size_t a = 0; a < row.size(); ++a)
        if (row[a].input == u) return rotated_cost.at(x).at(a);
    throw UnknownInputError("input '" + sys.input_name(u) + "' infeasible at state '" +
                            sys.state_name(x) + "'");
}

double suboptimality_gap(const TransitionSystem& sys, double ell_star, double tol_equal,
                         double min_gap, const EnumerationOptions& options) {
    double gap = kInf;
    for (const Orbit& orbit : enumerate_minimal_orbits(sys, options)) {
        double diff = orbit.average_cost - ell_star;
        if (std::abs(diff) <= tol_equal) continue;
        gap = std::min(gap, diff);
    }
    if (gap <= min_gap)
        throw GapNotPositiveError("suboptimality gap " + format_double(gap) +
                                  " is not bounded away from zero");
    return gap;
}

double build_alpha(double delta, const TransitionSystem& sys, const Orbit& pi_star, Metric metric,
                   double epsilon, double default_coeff) {
    if (!std::isfinite(delta)) return default_coeff;
    double d_max = 0.0;
    for (StateIndex x = 0; x < sys.num_states(); ++x)
        for (const Arc& arc : sys.arcs(x))
            d_max = std::max(d_max, orbit_distance(sys, {x, arc.input}, pi_star, metric));
    if (d_max <= 0.0) return default_coeff;
    return (1.0 - epsilon) * delta / d_max;
}

double supply_rate(const TransitionSystem& sys, std::pair<StateIndex, InputIndex> pair,
                   const Orbit& pi_star, double ell_star, double alpha_coeff, Metric metric) {
    const Arc* arc = sys.find_arc(pair.first, pair.second);
    if (!arc)
        throw UnknownInputError("input '" + sys.input_name(pair.second) +
                                "' infeasible at state '" + sys.state_name(pair.first) + "'");
    return arc->cost - ell_star - alpha_coeff * orbit_distance(sys, pair, pi_star, metric);
}

std::vector<std::vector<double>> supply_rate_table(const TransitionSystem& sys,
                                                   const Orbit& pi_star, double ell_star,
                                                   double alpha_coeff, Metric metric) {
    std::vector<std::vector<double>> table(sys.num_states());
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        auto row = sys.arcs(x);
        table[x].reserve(row.size());
        for (const Arc& arc : row)
            table[x].push_back(arc.cost - ell_star -
                               alpha_coeff * orbit_distance(sys, {x, arc.input}, pi_star, metric));
    }
    return table;
}

std::vector<double> available_storage(const TransitionSystem& sys,
                                      const std::vector<std::vector<double>>& supply) {
    const int n = sys.num_states();
    const long cap = static_cast<long>(n) * std::max(1, sys.num_transitions());
    std::vector<double> lambda(n, 0.0);
    std::vector<double> next(n, 0.0);
    for (long iter = 0;; ++iter) {
        bool changed = false;
        for (StateIndex x = 0; x < n; ++x) {
            double best = 0.0;
            auto row = sys.arcs(x);
            for (std::size_t a = 0; a < row.size(); ++a)
                best = std::max(best, -supply[x][a] + lambda[row[a].next]);
            if (best > lambda[x] + kFixpointTol) {
                next[x] = best;
                changed = true;
            } else {
                next[x] = lambda[x];
            }
        }
        lambda.swap(next);
        if (!changed) return lambda;
        if (iter >= cap)
            throw PositiveCycleError(
                "storage fixpoint still increasing after " + std::to_string(cap) +
                " sweeps: some cycle accumulates positive stored supply");
    }
}

std::vector<std::vector<double>> rotated_cost_table(const TransitionSystem& sys,
                                                    const std::vector<double>& lambda,
                                                    double ell_star) {
    std::vector<std::vector<double>> table(sys.num_states());
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        auto row = sys.arcs(x);
        table[x].reserve(row.size());
        for (const Arc& arc : row)
            table[x].push_back(arc.cost - ell_star + lambda[x] - lambda[arc.next]);
    }
    return table;
}

CertificateVerdict verify_certificate(const TransitionSystem& sys,
                                      const DissipativityCertificate& cert, double tol) {
    CertificateVerdict verdict;
    verdict.margin = kInf;
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        auto row = sys.arcs(x);
        for (std::size_t a = 0; a < row.size(); ++a) {
            double bound =
                cert.alpha_coeff *
                orbit_distance(sys, {x, row[a].input}, cert.orbit, cert.metric);
            double margin = cert.rotated_cost[x][a] - bound;
            if (margin < verdict.margin) {
                verdict.margin = margin;
                verdict.state = x;
                verdict.input = row[a].input;
            }
        }
    }
    verdict.holds = verdict.margin >= -tol;
    return verdict;
}

DissipativityCertificate build_certificate(const TransitionSystem& sys,
                                           const CertificateOptions& options) {
    DissipativityCertificate cert;
    cert.metric = options.metric.value_or(default_metric(sys));

    auto opt = optimal_orbit(sys, options.enumeration);
    cert.orbit = opt.orbit;
    cert.ell_star = opt.ell_star;

    auto unique = check_min_unique(sys, cert.orbit, cert.metric, options.tol_equal,
                                   options.enumeration);
    if (!unique.holds) {
        std::string witness =
            unique.witness ? orbit_line(sys, *unique.witness) : std::string("<none>");
        throw NonUniqueOrbitError("optimal orbit is not unique; witness: " + witness);
    }

    cert.delta = suboptimality_gap(sys, cert.ell_star, options.tol_equal, options.min_gap,
                                   options.enumeration);
    cert.alpha_coeff = build_alpha(cert.delta, sys, cert.orbit, cert.metric, options.epsilon,
                                   options.default_alpha_coeff);
    auto supply = supply_rate_table(sys, cert.orbit, cert.ell_star, cert.alpha_coeff, cert.metric);
    cert.storage = available_storage(sys, supply);
    cert.lambda_bar = 0.0;
    for (double v : cert.storage) cert.lambda_bar = std::max(cert.lambda_bar, std::abs(v));
    cert.rotated_cost = rotated_cost_table(sys, cert.storage, cert.ell_star);
    cert.verdict = verify_certificate(sys, cert);
    return cert;
}

double rotated_cost_identity_check(const TransitionSystem& sys, const DiscountFunction& beta,
                                   int horizon, StateIndex x, std::span<const InputIndex> inputs,
                                   const std::vector<double>& lambda, double ell_star) {
    if (horizon != static_cast<int>(inputs.size()))
        throw Error("horizon does not match the input sequence length");
    Trajectory traj = simulate(sys, x, inputs);
    const double n = static_cast<double>(horizon);

    double lhs = 0.0;  // discounted rotated cost
    double shifted = 0.0;
    for (int k = 0; k < horizon; ++k) {
        double w = beta(static_cast<double>(k) / n);
        double stage = sys.find_arc(traj.states[k], traj.inputs[k])->cost - ell_star;
        lhs += w * (stage + lambda[traj.states[k]] - lambda[traj.states[k + 1]]);
        shifted += w * stage;
    }
    double rhs = shifted + lambda[traj.states[0]];
    for (int k = 1; k <= horizon; ++k) {
        double drop = beta(static_cast<double>(k - 1) / n) - beta(static_cast<double>(k) / n);
        rhs -= drop * lambda[traj.states[k]];
    }
    return std::abs(lhs - rhs);
}

}  // namespace cesaro
