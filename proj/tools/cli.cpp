#include "cli.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "risgame/harness.hpp"
#include "risgame/suite.hpp"

namespace risgame::cli {

namespace {

std::vector<std::string> split(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');) {
        const auto a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
        if (a == std::string::npos) throw std::invalid_argument("empty entry in list '" + text + "'");
        out.push_back(item.substr(a, b - a + 1));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::vector<double> parse_values(const std::string& text)
{
    std::vector<double> v;
    for (const std::string& s : split(text)) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != s.size()) throw std::invalid_argument("--values: not a number: '" + s + "'");
        v.push_back(x);
    }
    return v;
}

std::vector<Scheme> parse_schemes(const std::string& text)
{
    std::vector<Scheme> v;
    for (const std::string& s : split(text)) {
        const auto scheme = parse_scheme(s);
        if (!scheme) throw std::invalid_argument("--schemes: unknown scheme '" + s + "'");
        v.push_back(*scheme);
    }
    return v;
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot read " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

struct RunArgs {
    std::string config, sweep, values, schemes, out;
    int trials = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    bool quiet = false;
};

int cmd_run(const RunArgs& a, CLI::App& app, std::ostream& out, std::ostream& err)
{
    ExperimentSpec spec;
    if (!a.config.empty()) {
        const std::string text = read_file(a.config);
        spec.base = scene_from_json(text);
        apply_experiment_json(spec, text);
    }
    if (!a.sweep.empty()) {
        const auto s = parse_sweep(a.sweep);
        if (!s) throw std::invalid_argument("--sweep: unknown sweep '" + a.sweep + "'");
        spec.sweep = *s;
    }
    if (!a.values.empty()) spec.values = parse_values(a.values);
    if (spec.values.empty()) spec.values = default_sweep_values(spec.sweep);
    if (!a.schemes.empty()) spec.schemes = parse_schemes(a.schemes);
    if (app.count("--trials")) spec.trials = a.trials;
    if (app.count("--seed")) spec.seed = a.seed;
    if (app.count("--workers")) spec.workers = a.workers;
    if (!a.out.empty()) spec.out = a.out;
    spec.validate();

    ProgressFn progress;
    if (!a.quiet) {
        progress = [&err](int done, int total) { err << "\r" << done << "/" << total << " trials" << std::flush; };
    }
    const ExperimentResult res = run_experiment(spec, progress);
    if (!a.quiet) err << '\n';
    if (spec.out.empty()) write_csv(out, res.rows);
    err << res.rows.size() << " rows";
    if (!spec.out.empty()) err << " written to " << spec.out;
    err << ", " << res.failures << " failed solves\n";
    return kOk;
}

int cmd_verify(bool full, const std::string& criteria, const std::string& config, CLI::App& app,
               std::uint64_t seed, std::ostream& out, std::ostream& err)
{
    SuiteProfile p = full ? SuiteProfile::acceptance() : SuiteProfile::quick();
    if (!config.empty()) {
        const int N = p.base.N;
        p.base = scene_from_json(read_file(config));
        if (!full) p.base.N = N;
    }
    if (app.count("--seed")) p.seed = seed;
    if (!criteria.empty()) {
        p.criteria.clear();
        for (double v : parse_values(criteria)) {
            if (v < 1 || v > 9 || v != static_cast<int>(v)) throw std::invalid_argument("--criteria: expected 1..9");
            p.criteria.push_back(static_cast<int>(v));
        }
    }
    const auto results = run_suite(p, &err);
    bool ok = true;
    for (const CheckResult& r : results) {
        print_result(out, r);
        ok = ok && r.pass;
    }
    out << (ok ? "all checks passed" : "some checks failed") << '\n';
    return ok ? kOk : kCheckFailed;
}

int cmd_demo(const std::string& config, const std::string& scheme_name, std::uint64_t seed, bool seeded,
             std::ostream& out)
{
    SceneConfig cfg = config.empty() ? SceneConfig{} : scene_from_json(read_file(config));
    if (seeded) cfg.seed = seed;
    const auto scheme = parse_scheme(scheme_name);
    if (!scheme) throw std::invalid_argument("--scheme: unknown scheme '" + scheme_name + "'");
    Rng rng(cfg.seed);
    const ChannelSet ch = draw_channels(cfg, rng);
    const ChannelSet truth = *scheme == Scheme::NoRis ? ch.without_surface() : ch;
    const LeaderSolution sol = solve_leader(leader_view(ch, *scheme), cfg);
    const Equilibrium e = assemble_equilibrium(sol, truth, cfg);
    const SolverReport& rep = sol.report;

    out << std::setprecision(8);
    out << "scene: N=" << cfg.N << " N_S=" << cfg.N_S << " N_D=" << cfg.N_D << " N_J=" << cfg.N_J
        << " c_S=" << cfg.c_S << " c_J=" << cfg.c_J << " delta=" << cfg.delta << " seed=" << cfg.seed << '\n';
    out << "scheme: " << to_string(*scheme) << '\n';
    out << "outer  utility\n";
    for (std::size_t k = 0; k < rep.utility_trace.size(); ++k)
        out << std::setw(5) << k << "  " << rep.utility_trace[k] << '\n';
    out << "termination: " << rep.termination << " after " << rep.outer_iterations << " outer iterations, "
        << std::setprecision(4) << rep.ms_total << " ms\n"
        << std::setprecision(8);
    for (const auto& w : rep.warnings) out << "warning: " << w << '\n';
    out << "P_S = " << sol.leader.P_S << ", anticipated P_J = " << sol.anticipated.P_J
        << ", realized P_J = " << e.realized.P_J << '\n';
    out << "u_L = " << e.u_L << " (worst case " << e.u_L_worst << "), u_J = " << e.u_J << ", SINR = " << e.sinr << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Robust Stackelberg anti-jamming with an active reflecting surface", "risgame"};
    app.require_subcommand(1);

    RunArgs ra;
    CLI::App* run_cmd = app.add_subcommand("run", "Run a parameter sweep and write a CSV");
    run_cmd->add_option("--config", ra.config, "JSON file with scene and experiment fields");
    run_cmd->add_option("--sweep", ra.sweep, "cj | cs | n | xj");
    run_cmd->add_option("--values", ra.values, "Comma-separated sweep values");
    run_cmd->add_option("--schemes", ra.schemes, "Comma-separated subset of robust,perfect,nonrobust,noris");
    run_cmd->add_option("--trials", ra.trials, "Trials per sweep point");
    run_cmd->add_option("--seed", ra.seed, "Base seed");
    run_cmd->add_option("--out", ra.out, "CSV path (stdout when omitted)");
    run_cmd->add_option("--workers", ra.workers, "Worker threads");
    run_cmd->add_flag("--quiet", ra.quiet, "No progress output");

    bool full = false;
    std::string criteria, vconfig;
    std::uint64_t vseed = 0;
    CLI::App* verify_cmd = app.add_subcommand("verify", "Run the oracle checks and print a pass/fail table");
    verify_cmd->add_flag("--full", full, "Acceptance sizes (default scene, long run)");
    verify_cmd->add_option("--criteria", criteria, "Comma-separated criterion numbers");
    verify_cmd->add_option("--config", vconfig, "JSON scene file");
    verify_cmd->add_option("--seed", vseed, "Base seed");

    std::string dconfig, scheme = "robust";
    std::uint64_t dseed = 0;
    CLI::App* demo_cmd = app.add_subcommand("demo", "Solve one scene and print the utility trace");
    demo_cmd->add_option("--config", dconfig, "JSON scene file");
    demo_cmd->add_option("--scheme", scheme, "robust | perfect | nonrobust | noris");
    demo_cmd->add_option("--seed", dseed, "Channel seed");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kBadArguments;
    }

    try {
        if (*run_cmd) return cmd_run(ra, *run_cmd, out, err);
        if (*verify_cmd) return cmd_verify(full, criteria, vconfig, *verify_cmd, vseed, out, err);
        if (*demo_cmd) return cmd_demo(dconfig, scheme, dseed, demo_cmd->count("--seed") > 0, out);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kBadArguments;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kBadArguments;
}

}  // namespace risgame::cli
