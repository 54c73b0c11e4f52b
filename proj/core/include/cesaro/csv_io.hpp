#pragma once

#include <iosfwd>
#include <string>

#include "cesaro/dissipativity.hpp"
#include "cesaro/vi_engine.hpp"

namespace cesaro {

/// Shortest decimal form that round-trips to the same double ("." decimal
/// point, no locale). Infinities print as "inf"/"-inf".
std::string format_double(double value);

/// One-line orbit rendering: `orbit p=<p> lavg=<avg> (state,input) ...`.
std::string orbit_line(const TransitionSystem& sys, const Orbit& orbit);

struct ViCsvMeta {
    std::string shift = "-";  ///< shift applied for the shifted variant
    int window = 50;
    int stride = 1;           ///< emit every stride-th horizon (the last always)
};

/// Value/policy rows `N,state,value,policy_input` behind a `#` metadata line
/// recording family, parameters, variant, tie-break rule and window.
void write_vi_csv(std::ostream& out, const TransitionSystem& sys, const VIRun& run,
                  const ViCsvMeta& meta = {});

/// Single-horizon variant for beta-discounted values.
void write_beta_csv(std::ostream& out, const TransitionSystem& sys, const BetaValue& result,
                    const std::string& beta_id, CostKind variant, const ViCsvMeta& meta = {});

/// Certificate blocks: a `cert,...` header row with delta, alpha coefficient,
/// ell_star and verdict, then `lambda,<state>,<value>` and
/// `rotcost,<state>,<input>,<value>` rows.
void write_certificate_csv(std::ostream& out, const TransitionSystem& sys,
                           const DissipativityCertificate& cert);

}  // namespace cesaro
