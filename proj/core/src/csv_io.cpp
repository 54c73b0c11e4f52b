#include "cesaro/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <ostream>

namespace cesaro {

std::string format_double(double value) {
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    if (ec != std::errc{}) throw Error("number formatting failed");
    return std::string(buffer, ptr);
}

std::string orbit_line(const TransitionSystem& sys, const Orbit& orbit) {
    std::string line = "orbit p=" + std::to_string(orbit.period()) +
                       " lavg=" + format_double(orbit.average_cost);
    for (const auto& [x, u] : orbit.pairs) {
        line += " (";
        line += sys.state_name(x);
        line += ',';
        line += sys.input_name(u);
        line += ')';
    }
    return line;
}

namespace {

std::string family_label(const Family& family) {
    switch (family.kind) {
        case FamilyKind::classic:
            return "classic";
        case FamilyKind::gamma:
            return "gamma";
        case FamilyKind::cesaro:
            return "cesaro";
        case FamilyKind::beta:
            return "beta";
    }
    return "?";
}

std::string variant_label(CostKind kind) {
    switch (kind) {
        case CostKind::raw:
            return "raw";
        case CostKind::shifted:
            return "shifted";
        case CostKind::rotated:
            return "rotated";
    }
    return "?";
}

void write_meta_line(std::ostream& out, const Family& family, CostKind variant,
                     const ViCsvMeta& meta) {
    out << "# family=" << family_label(family)
        << " gamma=" << (family.kind == FamilyKind::gamma ? format_double(family.gamma) : "-")
        << " beta=" << (family.kind == FamilyKind::beta ? family.beta_id : "-")
        << " variant=" << variant_label(variant) << " shift=" << meta.shift
        << " tie_break=min-input-index window=" << meta.window << "\n";
}

}  // namespace

void write_vi_csv(std::ostream& out, const TransitionSystem& sys, const VIRun& run,
                  const ViCsvMeta& meta) {
    write_meta_line(out, run.family(), run.variant(), meta);
    out << "N,state,value,policy_input\n";
    const int stride = meta.stride > 0 ? meta.stride : 1;
    for (int horizon = 1; horizon <= run.n_max(); ++horizon) {
        if (horizon % stride != 0 && horizon != run.n_max()) continue;
        auto values = run.values(horizon);
        auto policy = run.policy(horizon);
        for (StateIndex x = 0; x < sys.num_states(); ++x) {
            out << horizon << ',' << sys.state_name(x) << ',' << format_double(values[x]) << ','
                << sys.input_name(policy[x]) << "\n";
        }
    }
}

void write_beta_csv(std::ostream& out, const TransitionSystem& sys, const BetaValue& result,
                    const std::string& beta_id, CostKind variant, const ViCsvMeta& meta) {
    Family family = Family::beta(beta_id);
    write_meta_line(out, family, variant, meta);
    out << "N,state,value,policy_input\n";
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        out << result.horizon << ',' << sys.state_name(x) << ','
            << format_double(result.values[x]) << ',' << sys.input_name(result.policy[x]) << "\n";
    }
}

void write_certificate_csv(std::ostream& out, const TransitionSystem& sys,
                           const DissipativityCertificate& cert) {
    out << "cert,delta=" << format_double(cert.delta)
        << ",c=" << format_double(cert.alpha_coeff)
        << ",ell_star=" << format_double(cert.ell_star)
        << ",metric=" << (cert.metric == Metric::euclidean ? "euclidean" : "discrete")
        << ",verdict=" << (cert.verdict.holds ? "holds" : "violated") << "\n";
    for (StateIndex x = 0; x < sys.num_states(); ++x)
        out << "lambda," << sys.state_name(x) << ',' << format_double(cert.storage[x]) << "\n";
    for (StateIndex x = 0; x < sys.num_states(); ++x) {
        auto row = sys.arcs(x);
        for (std::size_t a = 0; a < row.size(); ++a)
            out << "rotcost," << sys.state_name(x) << ',' << sys.input_name(row[a].input) << ','
                << format_double(cert.rotated_cost[x][a]) << "\n";
    }
}

}  // namespace cesaro
