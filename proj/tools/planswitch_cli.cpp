#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "planswitch/harness.hpp"
#include "planswitch/verify.hpp"

using namespace planswitch;

namespace {

// exit codes
constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;
constexpr int kInput = 3;

struct CommonOptions {
    std::string trace_path;
    std::size_t synth_horizon = 12;
    std::string profile = "seasonal";
    double underusage_fraction = 0.1;
    double underusage_rate = -1.0;
    double beta = 100.0;
    double alpha = 10.0;
    int contract_len = 12;
    std::string regime = "constant";
    std::string fee_mode = "literal";
    std::string algorithms;
    std::size_t mc_runs = 100;
    std::uint64_t seed = 1;
    std::string benchmark = "all-variable";
    std::string out;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--trace", o.trace_path, "Trace CSV (t,e,p0,p1,B); omit to synthesize one");
    cmd->add_option("--synth-horizon", o.synth_horizon, "Slots to synthesize when no trace is given")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--profile", o.profile, "Synthesis profile")->check(CLI::IsMember({"seasonal", "flat"}));
    cmd->add_option("--underusage", o.underusage_fraction, "Underusage penalty as a fraction of p0");
    cmd->add_option("--underusage-rate", o.underusage_rate, "Absolute underusage penalty ($/kWh); overrides --underusage");
    cmd->add_option("--beta", o.beta, "Constant cancellation fee ($)");
    cmd->add_option("--alpha", o.alpha, "Linear fee per remaining month ($)");
    cmd->add_option("--contract-len", o.contract_len, "Fixed-rate contract length L (months)");
    cmd->add_option("--fee-regime", o.regime, "constant or linear")->check(CLI::IsMember({"constant", "linear"}));
    cmd->add_option("--fee-mode", o.fee_mode, "Linear fee accounting")
        ->check(CLI::IsMember({"literal", "transition-only"}));
    cmd->add_option("--algorithms", o.algorithms, "Comma list from ofa,dp,gchase,gchase_r,cchase");
    cmd->add_option("--mc-runs", o.mc_runs, "Randomized replications")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Seed for synthesis and replications");
    cmd->add_option("--benchmark", o.benchmark, "Stay-put benchmark plan")
        ->check(CLI::IsMember({"all-variable", "all-fixed"}));
    cmd->add_option("--out", o.out, "Write output here instead of stdout");
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read trace '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path + "'");
    out << text;
    if (!out) throw Error("write to '" + path + "' failed");
}

std::pair<RunConfig, Trace> load(const CommonOptions& o) {
    RunConfig cfg;
    cfg.regime = o.regime == "linear" ? FeeRegime::linear : FeeRegime::constant;
    cfg.fee_mode = o.fee_mode == "transition-only" ? FeeMode::transition_only : FeeMode::literal;
    cfg.benchmark = o.benchmark == "all-fixed" ? Benchmark::all_fixed : Benchmark::all_variable;
    cfg.beta = o.beta;
    cfg.alpha = o.alpha;
    cfg.contract_len = o.contract_len;
    cfg.underusage_fraction = o.underusage_fraction;
    if (o.underusage_rate >= 0.0) cfg.underusage_rate = o.underusage_rate;
    cfg.mc_runs = o.mc_runs;
    cfg.seed = o.seed;
    if (o.algorithms.empty())
        cfg.algorithms = cfg.regime == FeeRegime::constant
                             ? std::vector<Algorithm>{Algorithm::ofa, Algorithm::gchase, Algorithm::gchase_r}
                             : std::vector<Algorithm>{Algorithm::dp, Algorithm::gchase, Algorithm::gchase_r};
    else
        cfg.algorithms = parse_algorithm_list(o.algorithms);

    Trace trace;
    if (!o.trace_path.empty()) {
        trace = parse_trace(read_file(o.trace_path));
        cfg.trace_source = o.trace_path;
    } else {
        trace = synth_trace(o.synth_horizon, o.seed, parse_profile(o.profile));
        cfg.trace_source = "synthetic:T=" + std::to_string(o.synth_horizon) + ",seed=" + std::to_string(o.seed) +
                           ",profile=" + o.profile;
    }
    cfg.validate();
    return {cfg, trace};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fixed vs variable electricity plan switching: offline, online and randomized algorithms"};
    app.require_subcommand(1);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "Compare algorithms on one trace; JSON report");
    add_common(run, run_opts);

    CommonOptions sweep_opts;
    double from = 1.0, to = 100.0, step = 1.0;
    auto* sw = app.add_subcommand("sweep", "Savings across a range of cancellation fees; CSV");
    add_common(sw, sweep_opts);
    sw->add_option("--from", from, "First fee");
    sw->add_option("--to", to, "Last fee");
    sw->add_option("--step", step, "Fee increment");

    std::size_t synth_t = 12;
    std::uint64_t synth_seed = 1;
    std::string synth_profile = "seasonal";
    std::string synth_out;
    auto* syn = app.add_subcommand("synth", "Write a seeded synthetic trace CSV");
    syn->add_option("-T,--horizon", synth_t, "Number of monthly slots");
    syn->add_option("--seed", synth_seed, "Generator seed");
    syn->add_option("--profile", synth_profile, "seasonal or flat")->check(CLI::IsMember({"seasonal", "flat"}));
    syn->add_option("--out", synth_out, "Write here instead of stdout");

    std::string suite = "all";
    std::uint64_t verify_seed = 42;
    auto* ver = app.add_subcommand("verify", "Run self-check suites");
    ver->add_option("suite", suite, "oracle, ratio, montecarlo, identity or all");
    ver->add_option("--seed", verify_seed, "Seed for generated instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kUsage;
    }

    try {
        if (*run) {
            const auto [cfg, trace] = load(run_opts);
            const auto report = run_report(cfg, trace);
            for (const auto& r : report.results)
                if (r.forced_switches > 0)
                    std::cerr << "note: " << to_string(r.algorithm) << " hit the contract cap " << r.forced_switches
                              << " time(s); forced a switch to the variable plan\n";
            emit(run_opts.out, to_json(report).dump(2) + "\n");
        } else if (*sw) {
            const auto [cfg, trace] = load(sweep_opts);
            const auto result = sweep(cfg, trace, from, to, step);
            for (const auto& m : result.monitor) std::cerr << "monitor: " << m << "\n";
            emit(sweep_opts.out, to_csv(result));
        } else if (*syn) {
            emit(synth_out, format_trace(synth_trace(synth_t, synth_seed, parse_profile(synth_profile))));
        } else if (*ver) {
            const auto results = run_verify(suite, verify_seed);
            bool ok = true;
            for (const auto& s : results) {
                for (const auto& c : s.checks) {
                    std::cout << (c.passed ? "PASS " : "FAIL ") << s.suite << ": " << c.name << " (" << c.detail
                              << ")\n";
                }
                ok = ok && s.passed();
            }
            std::cout << (ok ? "verify: all checks passed\n" : "verify: FAILED\n");
            return ok ? kOk : kCheckFailed;
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInput;
    }
    return kOk;
}
