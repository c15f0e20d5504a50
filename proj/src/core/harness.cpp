#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "risgame/harness.hpp"

namespace risgame {

using json = nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v, const char* spec = "%.10g")
{
    if (std::isnan(v)) return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

ResultRow failed_row(Scheme s, const std::string& message)
{
    ResultRow r;
    r.scheme = s;
    r.failed = true;
    r.u_L = r.u_J = r.u_L_worst = r.P_S = r.P_J = r.gamma = r.iters = r.ms = kNaN;
    r.message = message;
    return r;
}

}  // namespace

const char* to_string(Sweep s)
{
    switch (s) {
    case Sweep::Cj: return "cj";
    case Sweep::Cs: return "cs";
    case Sweep::N: return "n";
    case Sweep::Xj: return "xj";
    }
    return "?";
}

std::optional<Sweep> parse_sweep(const std::string& name)
{
    for (Sweep s : {Sweep::Cj, Sweep::Cs, Sweep::N, Sweep::Xj})
        if (name == to_string(s)) return s;
    return std::nullopt;
}

std::vector<double> default_sweep_values(Sweep s)
{
    std::vector<double> v;
    switch (s) {
    case Sweep::Cj:
    case Sweep::Cs:
        for (int i = 1; i <= 10; ++i) v.push_back(0.5 * i);
        break;
    case Sweep::N:
        for (int n = 4; n <= 40; n += 4) v.push_back(n);
        break;
    case Sweep::Xj:
        for (int x = 0; x <= 400; x += 50) v.push_back(x);
        break;
    }
    return v;
}

SceneConfig apply_sweep(const SceneConfig& base, Sweep s, double value)
{
    SceneConfig c = base;
    switch (s) {
    case Sweep::Cj: c.c_J = value; break;
    case Sweep::Cs: c.c_S = value; break;
    case Sweep::N: c.N = static_cast<int>(std::lround(value)); break;
    case Sweep::Xj: c.pos_J = {value, 400.0}; break;
    }
    return c;
}

void ExperimentSpec::validate() const
{
    if (values.empty()) throw std::invalid_argument("values: empty sweep");
    if (schemes.empty()) throw std::invalid_argument("schemes: empty list");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
    const double lo = std::min(base.pos_S.x, base.pos_D.x), hi = std::max(base.pos_S.x, base.pos_D.x);
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("values: non-finite entry");
        switch (sweep) {
        case Sweep::Cj:
        case Sweep::Cs:
            if (v <= 0.0) throw std::invalid_argument("values: prices must be positive");
            break;
        case Sweep::N:
            if (v < 0.0 || v != std::round(v)) throw std::invalid_argument("values: N must be a nonnegative integer");
            break;
        case Sweep::Xj:
            if (v < lo || v > hi) throw std::invalid_argument("values: x_J outside the arena");
            break;
        }
        apply_sweep(base, sweep, v).validate();
    }
}

void apply_experiment_json(ExperimentSpec& spec, const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("experiment")) return;
    const json& e = doc["experiment"];
    if (!e.is_object()) throw std::invalid_argument("experiment: expected an object");
    for (const auto& [k, v] : e.items()) {
        try {
            if (k == "sweep") {
                const auto s = parse_sweep(v.get<std::string>());
                if (!s) throw std::invalid_argument("experiment.sweep: unknown sweep");
                spec.sweep = *s;
            } else if (k == "values") {
                spec.values = v.get<std::vector<double>>();
            } else if (k == "schemes") {
                spec.schemes.clear();
                for (const auto& name : v.get<std::vector<std::string>>()) {
                    const auto s = parse_scheme(name);
                    if (!s) throw std::invalid_argument("experiment.schemes: unknown scheme '" + name + "'");
                    spec.schemes.push_back(*s);
                }
            } else if (k == "trials") {
                spec.trials = v.get<int>();
            } else if (k == "seed") {
                spec.seed = v.get<std::uint64_t>();
            } else if (k == "out") {
                spec.out = v.get<std::string>();
            } else if (k == "workers") {
                spec.workers = v.get<int>();
            } else {
                throw std::invalid_argument("experiment: unknown field '" + k + "'");
            }
        } catch (const json::exception& ex) {
            throw std::invalid_argument("experiment." + k + ": " + ex.what());
        }
    }
}

std::uint64_t trial_seed(std::uint64_t seed, int trial)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial)};
    std::uint32_t out[2];
    seq.generate(out, out + 2);
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

std::vector<ResultRow> run_trial(const SceneConfig& cfg, const std::vector<Scheme>& schemes, std::uint64_t seed,
                                 const BsumOptions& o)
{
    Rng rng(seed);
    const ChannelSet ch = draw_channels(cfg, rng);
    std::vector<ResultRow> rows;
    for (Scheme s : schemes) {
        try {
            const ChannelSet truth = s == Scheme::NoRis ? ch.without_surface() : ch;
            const LeaderSolution sol = solve_leader(leader_view(ch, s), cfg, o);
            const Equilibrium e = assemble_equilibrium(sol, truth, cfg);
            ResultRow r;
            r.scheme = s;
            r.u_L = e.u_L;
            r.u_J = e.u_J;
            r.u_L_worst = e.u_L_worst;
            r.P_S = sol.leader.P_S;
            r.P_J = e.realized.P_J;
            r.gamma = e.sinr;
            r.iters = sol.report.outer_iterations;
            r.ms = sol.report.ms_total;
            rows.push_back(r);
        } catch (const std::exception& ex) {
            rows.push_back(failed_row(s, ex.what()));
        }
    }
    return rows;
}

ResultRow mean_row(const std::vector<ResultRow>& group)
{
    ResultRow m;
    if (!group.empty()) {
        m.sweep = group.front().sweep;
        m.value = group.front().value;
        m.scheme = group.front().scheme;
    }
    m.trial = -1;
    int n = 0;
    for (const ResultRow& r : group) {
        if (r.failed) continue;
        ++n;
        m.u_L += r.u_L;
        m.u_J += r.u_J;
        m.u_L_worst += r.u_L_worst;
        m.P_S += r.P_S;
        m.P_J += r.P_J;
        m.gamma += r.gamma;
        m.iters += r.iters;
        m.ms += r.ms;
    }
    if (n == 0) {
        ResultRow f = failed_row(m.scheme, "no successful trial");
        f.sweep = m.sweep;
        f.value = m.value;
        f.trial = -1;
        return f;
    }
    for (double* f : {&m.u_L, &m.u_J, &m.u_L_worst, &m.P_S, &m.P_J, &m.gamma, &m.iters, &m.ms}) *f /= n;
    return m;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const ProgressFn& progress)
{
    spec.validate();
    const int points = static_cast<int>(spec.values.size());
    const int total = points * spec.trials;
    std::vector<std::vector<ResultRow>> cells(total);

    std::atomic<int> next{0};
    std::atomic<int> done{0};
    std::mutex report;
    const auto worker = [&] {
        for (int t = next++; t < total; t = next++) {
            const int point = t / spec.trials, trial = t % spec.trials;
            const double value = spec.values[point];
            const SceneConfig cfg = apply_sweep(spec.base, spec.sweep, value);
            cells[t] = run_trial(cfg, spec.schemes, trial_seed(spec.seed, trial), spec.solver);
            for (ResultRow& r : cells[t]) {
                r.sweep = to_string(spec.sweep);
                r.value = value;
                r.trial = trial;
            }
            const int d = ++done;
            if (progress) {
                std::lock_guard<std::mutex> lock(report);
                progress(d, total);
            }
        }
    };
    const int nthreads = std::min(spec.workers, total);
    if (nthreads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    ExperimentResult res;
    for (int point = 0; point < points; ++point) {
        for (std::size_t s = 0; s < spec.schemes.size(); ++s) {
            std::vector<ResultRow> group;
            for (int trial = 0; trial < spec.trials; ++trial) group.push_back(cells[point * spec.trials + trial][s]);
            for (const ResultRow& r : group) {
                res.rows.push_back(r);
                if (r.failed) ++res.failures;
            }
            res.rows.push_back(mean_row(group));
        }
    }
    if (!spec.out.empty()) {
        std::ofstream f(spec.out, std::ios::binary);
        if (!f) throw std::runtime_error("cannot open " + spec.out);
        write_csv(f, res.rows);
        if (!f) throw std::runtime_error("write failed: " + spec.out);
    }
    return res;
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows)
{
    os << kCsvHeader << '\n';
    for (const ResultRow& r : rows) {
        os << r.sweep << ',' << fmt(r.value) << ',' << to_string(r.scheme) << ','
           << (r.trial < 0 ? std::string("mean") : std::to_string(r.trial)) << ',' << fmt(r.u_L) << ','
           << fmt(r.u_J) << ',' << fmt(r.u_L_worst) << ',' << fmt(r.P_S) << ',' << fmt(r.P_J) << ','
           << fmt(r.gamma) << ',' << fmt(r.iters) << ',' << fmt(r.ms, "%.3f") << '\n';
    }
}

}  // namespace risgame
