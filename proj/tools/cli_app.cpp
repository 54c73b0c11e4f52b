#include "cli_app.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "cesaro/builtins.hpp"
#include "cesaro/csv_io.hpp"
#include "cesaro/dissipativity.hpp"
#include "cesaro/orbit_analysis.hpp"
#include "cesaro/system_model.hpp"
#include "cesaro/vi_engine.hpp"

namespace cesaro::cli {

namespace {

struct SystemOptions {
    std::string system_path;
    std::string builtin;
    double cost_offset = 0.0;
    std::string emit_path;
    std::string metric = "auto";
};

void add_system_options(CLI::App* cmd, SystemOptions& opts) {
    auto* system = cmd->add_option("--system", opts.system_path, "system file (.tsys)");
    auto* builtin =
        cmd->add_option("--builtin", opts.builtin, "builtin example: fig1, fig2 or linear");
    system->excludes(builtin);
    cmd->add_option("--cost-offset", opts.cost_offset, "add a constant to every stage cost");
    cmd->add_option("--emit-system", opts.emit_path, "also write the loaded system as .tsys");
    cmd->add_option("--metric", opts.metric, "pair metric: euclidean, discrete or auto")
        ->check(CLI::IsMember({"euclidean", "discrete", "auto"}));
}

TransitionSystem load_system(const SystemOptions& opts) {
    TransitionSystem sys = [&] {
        if (!opts.builtin.empty()) {
            auto builtin = make_builtin(opts.builtin);
            if (!builtin) throw Error("unknown builtin '" + opts.builtin + "'");
            return *std::move(builtin);
        }
        if (!opts.system_path.empty()) return parse_system_file(opts.system_path);
        throw Error("pass exactly one of --system or --builtin");
    }();
    if (opts.cost_offset != 0.0) sys = with_cost_offset(sys, opts.cost_offset);
    if (!opts.emit_path.empty()) {
        std::ofstream file(opts.emit_path, std::ios::binary);
        if (!file) throw Error("cannot write '" + opts.emit_path + "'");
        file << serialize_system(sys);
    }
    return sys;
}

Metric resolve_metric(const TransitionSystem& sys, const std::string& name) {
    if (name == "euclidean") {
        if (!sys.has_full_coordinates())
            throw MissingCoordinatesError(
                "euclidean metric needs coordinates on every state and input");
        return Metric::euclidean;
    }
    if (name == "discrete") return Metric::discrete;
    return default_metric(sys);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error("cannot write '" + path + "'");
    return file;
}

struct ViArgs {
    SystemOptions system;
    std::string family = "cesaro";
    double gamma = 0.6;
    bool gamma_set = false;
    std::string beta = "linear";
    std::string variant = "shifted";
    std::string shift = "auto";
    int n_max = 1000;
    int window = 50;
    int stride = 1;
    std::string output = "-";
};

int cmd_vi(const ViArgs& args, std::ostream& out) {
    TransitionSystem sys = load_system(args.system);

    CostVariant variant = CostVariant::raw();
    std::string shift_label = "-";
    std::optional<DissipativityCertificate> cert;
    if (args.variant == "shifted") {
        double shift = 0.0;
        if (args.shift == "auto") {
            shift = optimal_orbit(sys).ell_star;
        } else {
            try {
                shift = std::stod(args.shift);
            } catch (const std::exception&) {
                throw Error("--shift expects 'auto' or a number");
            }
        }
        variant = CostVariant::shifted(shift);
        shift_label = format_double(shift);
    } else if (args.variant == "rotated") {
        CertificateOptions copts;
        copts.metric = resolve_metric(sys, args.system.metric);
        cert = build_certificate(sys, copts);
        variant = CostVariant::rotated(*cert);
    }

    ViCsvMeta meta;
    meta.shift = shift_label;
    meta.window = args.window;
    meta.stride = args.stride;

    std::ostringstream buffer;
    if (args.family == "beta") {
        DiscountFunction beta = args.beta == "quad" ? DiscountFunction::quadratic()
                                                    : DiscountFunction::linear();
        BetaValue result = beta_value(sys, beta, variant, args.n_max);
        write_beta_csv(buffer, sys, result, beta.id(), variant.kind, meta);
    } else {
        VIRun run = [&] {
            if (args.family == "classic") return classic_vi(sys, variant, args.n_max);
            if (args.family == "gamma") {
                if (!args.gamma_set) throw Error("--family gamma needs --gamma");
                return gamma_vi(sys, args.gamma, variant, args.n_max);
            }
            return cvi(sys, variant, args.n_max);
        }();
        write_vi_csv(buffer, sys, run, meta);
    }

    if (args.output == "-") {
        out << buffer.str();
    } else {
        open_output(args.output) << buffer.str();
    }
    return 0;
}

struct OrbitArgs {
    SystemOptions system;
    bool certify = false;
    std::string output;
};

int cmd_orbit(const OrbitArgs& args, std::ostream& out) {
    TransitionSystem sys = load_system(args.system);
    Metric metric = resolve_metric(sys, args.system.metric);

    OptimalOrbit opt = optimal_orbit(sys);
    out << orbit_line(sys, opt.orbit) << "\n";
    out << "p_star=" << opt.orbit.period() << "\n";
    out << "ell_star=" << format_double(opt.ell_star) << "\n";

    MinUniqueVerdict unique = check_min_unique(sys, opt.orbit, metric);
    if (unique.holds) {
        out << "min_unique=holds\n";
    } else {
        out << "min_unique=violated witness: " << orbit_line(sys, *unique.witness) << "\n";
    }
    out << "delta=" << format_double(suboptimality_gap(sys, opt.ell_star)) << "\n";
    if (!unique.holds) return 2;

    if (args.certify) {
        CertificateOptions copts;
        copts.metric = metric;
        DissipativityCertificate cert = build_certificate(sys, copts);
        out << "alpha_coeff=" << format_double(cert.alpha_coeff) << "\n";
        out << "lambda_bar=" << format_double(cert.lambda_bar) << "\n";
        out << "verdict=" << (cert.verdict.holds ? "holds" : "violated")
            << " margin=" << format_double(cert.verdict.margin) << "\n";
        if (!args.output.empty()) {
            auto file = open_output(args.output);
            write_certificate_csv(file, sys, cert);
        }
        if (!cert.verdict.holds) return 2;
    }
    return 0;
}

struct DecomposeArgs {
    SystemOptions system;
    std::string start;
    std::string inputs_path;
};

int cmd_decompose(const DecomposeArgs& args, std::ostream& out) {
    TransitionSystem sys = load_system(args.system);
    auto start = sys.find_state(args.start);
    if (!start) throw UnknownStateError("unknown state '" + args.start + "'");

    std::ifstream file(args.inputs_path);
    if (!file) throw Error("cannot open input file '" + args.inputs_path + "'");
    std::vector<InputIndex> inputs;
    std::string line;
    while (std::getline(file, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        std::istringstream tokens(line);
        std::string name;
        while (tokens >> name) {
            auto input = sys.find_input(name);
            if (!input) throw UnknownInputError("unknown input '" + name + "'");
            inputs.push_back(*input);
        }
    }

    Trajectory traj = simulate(sys, *start, inputs);
    Decomposition dec = decompose_trajectory(sys, traj);
    for (const Orbit& orbit : dec.orbits) out << orbit_line(sys, orbit) << "\n";
    out << "residual:";
    if (dec.residual_indices.empty()) out << " (none)";
    for (int k : dec.residual_indices) out << ' ' << k;
    out << "\n";

    double rhs = 0.0;
    for (const Orbit& orbit : dec.orbits)
        for (const auto& [x, u] : orbit.pairs) rhs += sys.find_arc(x, u)->cost;
    for (int k : dec.residual_indices)
        rhs += sys.find_arc(traj.states[k], traj.inputs[k])->cost;
    out << "trajectory_cost=" << format_double(total_cost(sys, traj)) << "\n";
    out << "decomposed_cost=" << format_double(rhs) << "\n";
    return 0;
}

struct ReproduceArgs {
    std::string example;
    std::string outdir = ".";
    int window = 50;
};

std::ofstream open_in_dir(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return open_output((std::filesystem::path(dir) / name).string());
}

void reproduce_fig1(const std::string& dir, std::ostream& out) {
    TransitionSystem sys = make_fig1();
    CostVariant shifted = CostVariant::shifted(optimal_orbit(sys).ell_star);

    auto osc = open_in_dir(dir, "fig1_oscillation.csv");
    write_vi_csv(osc, sys, classic_vi(sys, shifted, 100));
    out << "fig1_oscillation.csv\n";

    VIRun run = cvi(sys, shifted, 100000);
    auto limits = open_in_dir(dir, "fig1_cesaro_limits.csv");
    limits << "state,value,policy_input\n";
    for (StateIndex x = 0; x < sys.num_states(); ++x)
        limits << sys.state_name(x) << ',' << format_double(run.values(100000)[x]) << ','
               << sys.input_name(run.policy(100000)[x]) << "\n";
    out << "fig1_cesaro_limits.csv\n";
}

void reproduce_fig2(const std::string& dir, std::ostream& out) {
    TransitionSystem sys = make_fig2();
    CostVariant shifted = CostVariant::shifted(optimal_orbit(sys).ell_star);

    VIRun classic = classic_vi(sys, shifted, 100);
    VIRun cesaro = cvi(sys, shifted, 100000);
    auto table = open_in_dir(dir, "fig2_table1.csv");
    table << "state,classic_limit,cesaro_limit\n";
    for (StateIndex x = 0; x < sys.num_states(); ++x)
        table << sys.state_name(x) << ',' << format_double(classic.values(100)[x]) << ','
              << format_double(cesaro.values(100000)[x]) << "\n";
    out << "fig2_table1.csv\n";

    auto trace = open_in_dir(dir, "fig2_x0_trace.csv");
    trace << "N,value\n";
    StateIndex x0 = *sys.find_state("x0");
    for (int horizon = 1; horizon <= 1000; ++horizon)
        trace << horizon << ',' << format_double(cesaro.values(horizon)[x0]) << "\n";
    out << "fig2_x0_trace.csv\n";
}

void reproduce_linear(const std::string& dir, int window, std::ostream& out) {
    TransitionSystem sys = make_linear();
    CostVariant shifted = CostVariant::shifted(optimal_orbit(sys).ell_star);
    const int n_cap = 3000;

    VIRun ces = cvi(sys, shifted, n_cap);
    VIRun g08 = gamma_vi(sys, 0.8, shifted, 500);
    VIRun g06 = gamma_vi(sys, 0.6, shifted, 500);
    StateIndex x6 = *sys.find_state("6");
    auto values = open_in_dir(dir, "linear_values_x6.csv");
    values << "N,cesaro,gamma08,gamma06\n";
    for (int horizon = 1; horizon <= 500; ++horizon)
        values << horizon << ',' << format_double(ces.values(horizon)[x6]) << ','
               << format_double(g08.values(horizon)[x6]) << ','
               << format_double(g06.values(horizon)[x6]) << "\n";
    out << "linear_values_x6.csv\n";

    auto ces_stable = ces.stable_policy_horizon(window);
    std::vector<InputIndex> ces_policy(ces.policy(ces_stable.value_or(n_cap)).begin(),
                                       ces.policy(ces_stable.value_or(n_cap)).end());
    auto sweep = open_in_dir(dir, "linear_nstar.csv");
    sweep << "family,gamma,n_star,policy_matches_cesaro\n";
    sweep << "cesaro,-," << (ces_stable ? std::to_string(*ces_stable) : "none") << ",1\n";
    for (int i = 55; i <= 99; ++i) {
        double gamma = static_cast<double>(i) / 100.0;
        PolicyConvergence pc =
            policy_convergence(sys, Family::discounted(gamma), shifted, window, n_cap);
        bool matches = pc.policy == ces_policy;
        sweep << "gamma," << format_double(gamma) << ','
              << (pc.n_star ? std::to_string(*pc.n_star) : "none") << ',' << (matches ? 1 : 0)
              << "\n";
    }
    out << "linear_nstar.csv\n";

    // inputs chosen from x=4 until the orbit state 1 is reached
    auto policies = open_in_dir(dir, "linear_policies_x4.csv");
    policies << "family,inputs,cost\n";
    auto follow = [&](const std::vector<InputIndex>& policy) {
        std::vector<InputIndex> applied;
        StateIndex cur = *sys.find_state("4");
        StateIndex target = *sys.find_state("1");
        for (int step = 0; step < sys.num_states() && cur != target; ++step) {
            applied.push_back(policy[cur]);
            cur = sys.find_arc(cur, policy[cur])->next;
        }
        return applied;
    };
    auto emit = [&](const std::string& label, const std::vector<InputIndex>& policy) {
        auto applied = follow(policy);
        Trajectory traj = simulate(sys, *sys.find_state("4"), applied);
        std::string names;
        for (InputIndex u : applied) {
            if (!names.empty()) names += ' ';
            names += sys.input_name(u);
        }
        policies << label << ',' << names << ',' << format_double(total_cost(sys, traj)) << "\n";
    };
    emit("cesaro", ces_policy);
    PolicyConvergence g06pc =
        policy_convergence(sys, Family::discounted(0.6), shifted, window, n_cap);
    emit("gamma06", g06pc.policy);
    out << "linear_policies_x4.csv\n";
}

int cmd_reproduce(const ReproduceArgs& args, std::ostream& out) {
    if (args.example == "fig1") {
        reproduce_fig1(args.outdir, out);
    } else if (args.example == "fig2") {
        reproduce_fig2(args.outdir, out);
    } else if (args.example == "linear") {
        reproduce_linear(args.outdir, args.window, out);
    } else {
        throw Error("unknown example '" + args.example + "'");
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Cesaro value iteration solver for finite deterministic systems"};
    app.require_subcommand(1);

    ViArgs vi_args;
    auto* vi_cmd = app.add_subcommand("vi", "run a value iteration and write value/policy CSV");
    add_system_options(vi_cmd, vi_args.system);
    vi_cmd->add_option("--family", vi_args.family, "classic, gamma, cesaro or beta")
        ->check(CLI::IsMember({"classic", "gamma", "cesaro", "beta"}));
    vi_cmd->add_option("--gamma", vi_args.gamma, "discount factor in (0,1)")
        ->trigger_on_parse()
        ->each([&vi_args](const std::string&) { vi_args.gamma_set = true; });
    vi_cmd->add_option("--beta", vi_args.beta, "discount profile: linear or quad")
        ->check(CLI::IsMember({"linear", "quad"}));
    vi_cmd->add_option("--variant", vi_args.variant, "stage cost: raw, shifted or rotated")
        ->check(CLI::IsMember({"raw", "shifted", "rotated"}));
    vi_cmd->add_option("--shift", vi_args.shift, "'auto' or an explicit shift value");
    vi_cmd->add_option("-N,--n-max", vi_args.n_max, "horizon")->check(CLI::PositiveNumber);
    vi_cmd->add_option("--window", vi_args.window, "policy stability window (metadata)");
    vi_cmd->add_option("--stride", vi_args.stride, "emit every stride-th horizon")
        ->check(CLI::PositiveNumber);
    vi_cmd->add_option("-o,--output", vi_args.output, "output path, '-' for stdout");

    OrbitArgs orbit_args;
    auto* orbit_cmd =
        app.add_subcommand("orbit", "optimal periodic orbit and dissipativity certificate");
    add_system_options(orbit_cmd, orbit_args.system);
    orbit_cmd->add_flag("--certify", orbit_args.certify, "build the full certificate");
    orbit_cmd->add_option("-o,--output", orbit_args.output, "certificate CSV path");

    DecomposeArgs dec_args;
    auto* dec_cmd =
        app.add_subcommand("decompose", "split a trajectory into periodic orbits plus residual");
    add_system_options(dec_cmd, dec_args.system);
    dec_cmd->add_option("--start", dec_args.start, "initial state name")->required();
    dec_cmd->add_option("--inputs", dec_args.inputs_path, "file with one input name per line")
        ->required();

    ReproduceArgs rep_args;
    auto* rep_cmd = app.add_subcommand("reproduce", "write the CSV bundle for a builtin example");
    rep_cmd->add_option("example", rep_args.example, "fig1, fig2 or linear")->required();
    rep_cmd->add_option("-o,--outdir", rep_args.outdir, "output directory");
    rep_cmd->add_option("--window", rep_args.window, "policy stability window");

    try {
        app.parse(argc, argv);
        if (vi_cmd->parsed()) return cmd_vi(vi_args, out);
        if (orbit_cmd->parsed()) return cmd_orbit(orbit_args, out);
        if (dec_cmd->parsed()) return cmd_decompose(dec_args, out);
        if (rep_cmd->parsed()) return cmd_reproduce(rep_args, out);
        return 1;
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const AssumptionError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    std::vector<const char*> argv;
    argv.push_back("cesaro");
    for (const std::string& arg : args) argv.push_back(arg.c_str());
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace cesaro::cli
